"""Explicit solutions of the linear problems with flux or value boundary data.

Neumann (u_x(0) = psi1, u_x(L) = psi2):

    u = int G0 u0 dxi - 2 eps int theta_0(x, t - tau) psi1 dtau
        + 2 eps int theta_0(L - x, t - tau) psi2 dtau + int int G0 f

Dirichlet (u(0) = g1, u(L) = g2), with the odd Green kernel
theta_0(|x - xi|) - theta_0(x + xi):

    u = int G0^D u0 dxi - 2 eps int theta_0'(x, t - tau) g1 dtau
        - 2 eps int theta_0'(L - x, t - tau) g2 dtau + int int G0^D f

where theta_0' is the derivative with respect to the first argument. Both
are evaluated on a uniform grid by :class:`~fhngreen.propagator.Propagator`.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, RegimeError
from .kernels import FhnParams
from .propagator import Grid, Propagator

NEUMANN = "Neumann"
DIRICHLET = "Dirichlet"


# ------------------------------------------------------------------ types

@dataclass(frozen=True)
class InitialData:
    """Initial profiles u0, v0 on [0, L]: callables, constants or uniform samples."""

    u0: object = 0.0
    v0: object = 0.0


@dataclass(frozen=True)
class BoundaryData:
    """Boundary signals on [0, T]: fluxes (Neumann) or values (Dirichlet)."""

    kind: str = NEUMANN
    left: object = 0.0
    right: object = 0.0

    def __post_init__(self):
        if self.kind not in (NEUMANN, DIRICHLET):
            raise DomainError(f"boundary kind must be Neumann or Dirichlet, got {self.kind!r}")

    def is_zero(self):
        return _is_zero(self.left) and _is_zero(self.right)


@dataclass
class Field:
    """Samples of a scalar field: ``values[k, j]`` is the value at (grid_x[j], grid_t[k])."""

    grid_x: np.ndarray
    grid_t: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid_x = np.asarray(self.grid_x, dtype=float)
        self.grid_t = np.asarray(self.grid_t, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        for name, g in (("grid_x", self.grid_x), ("grid_t", self.grid_t)):
            if g.ndim != 1 or g.size == 0:
                raise DomainError(f"{name} must be a non-empty 1-D array")
            if np.any(np.diff(g) <= 0):
                raise DomainError(f"{name} must be strictly increasing")
            if not np.all(np.isfinite(g)):
                raise DomainError(f"{name} contains non-finite entries")
        if self.grid_t[0] < 0:
            raise DomainError("grid_t must be non-negative")
        shape = (self.grid_t.size, self.grid_x.size)
        if self.values.shape != shape:
            raise DomainError(f"values have shape {self.values.shape}, expected {shape}")
        bad = ~np.isfinite(self.values)
        if np.any(bad):
            k, j = np.argwhere(bad)[0]
            raise DomainError(
                f"field has {int(bad.sum())} non-finite values, first at "
                f"x={self.grid_x[j]}, t={self.grid_t[k]}")

    def at_time(self, t):
        """Row of values at grid time t (must be a grid time)."""
        k = _match(self.grid_t, np.atleast_1d(t), "t")
        return self.values[k[0]]

    def restrict(self, xs=None, ts=None):
        """Sub-field on the grid nodes coinciding with xs and ts."""
        j = slice(None) if xs is None else _match(self.grid_x, np.asarray(xs, float), "x")
        k = slice(None) if ts is None else _match(self.grid_t, np.asarray(ts, float), "t")
        return Field(self.grid_x[j], self.grid_t[k], self.values[k][:, j], dict(self.meta))

    def sup(self):
        return float(np.max(np.abs(self.values)))


def _match(grid, pts, name):
    idx = np.searchsorted(grid, pts)
    idx = np.clip(idx, 0, grid.size - 1)
    lower = np.clip(idx - 1, 0, grid.size - 1)
    pick = np.where(np.abs(grid[lower] - pts) < np.abs(grid[idx] - pts), lower, idx)
    scale = max(1.0, float(np.max(np.abs(grid))))
    if np.any(np.abs(grid[pick] - pts) > 1e-9 * scale):
        raise DomainError(f"requested {name} values are not grid nodes")
    return pick


# ------------------------------------------------------------- sampling

def _is_zero(w):
    return not callable(w) and np.ndim(w) == 0 and float(w) == 0.0


def sample_profile(w, x, length):
    """Profile on [0, length] evaluated at x.

    Callables are evaluated; scalars are broadcast; 1-D arrays are read as
    samples on a uniform grid over [0, length] and interpolated with a
    cubic spline unless they already match ``x``.
    """
    x = np.asarray(x, dtype=float)
    if callable(w):
        out = np.broadcast_to(np.asarray(w(x), dtype=float), x.shape).copy()
    elif np.ndim(w) == 0:
        out = np.full(x.shape, float(w))
    else:
        arr = np.asarray(w, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise DomainError("sampled data must be a 1-D array with at least 2 entries")
        if arr.size == x.size and np.allclose(x, np.linspace(0, length, x.size)):
            out = arr.copy()
        else:
            out = CubicSpline(np.linspace(0.0, length, arr.size), arr)(x)
    if not np.all(np.isfinite(out)):
        raise DomainError("data contain non-finite values")
    return out


def sample_source(f, x, t):
    """Space-time source on the grid, shape (len(t), len(x))."""
    shape = (t.size, x.size)
    if f is None:
        return np.zeros(shape)
    if callable(f):
        out = np.broadcast_to(np.asarray(f(x[None, :], t[:, None]), dtype=float), shape)
    elif np.ndim(f) == 0:
        out = np.full(shape, float(f))
    else:
        out = np.asarray(f, dtype=float)
        if out.shape != shape:
            raise DomainError(f"sampled source has shape {out.shape}, expected {shape}")
    if not np.all(np.isfinite(out)):
        raise DomainError("source contains non-finite values")
    return np.array(out)


def interp_error(arr, axis):
    """Max interpolation error of the piecewise-linear interpolant, from second differences."""
    arr = np.asarray(arr, dtype=float)
    if arr.shape[axis] < 3:
        return 0.0
    return float(np.max(np.abs(np.diff(arr, n=2, axis=axis)))) / 8.0


def integrated_interp_error(arr, dt):
    """int_0^T of the max-in-x interpolation error of a space-time array (time on axis 0).

    Spatial errors come from second differences along each row. Temporal
    errors come from second differences across rows, attributed to the
    two steps they straddle.
    """
    arr = np.asarray(arr, dtype=float)
    ex = np.max(np.abs(np.diff(arr, n=2, axis=1)), axis=1) / 8.0 if arr.shape[1] > 2 else 0 * arr[:, 0]
    total = dt * float(np.sum(ex))
    if arr.shape[0] > 2:
        et = np.max(np.abs(np.diff(arr, n=2, axis=0)), axis=1) / 8.0
        total += 2.0 * dt * float(np.sum(et))
    return total


def mass_bound(p, t):
    """Upper bound for sup_x int_0^L |G0(x, xi, s)| dxi over s <= t (used in error budgets)."""
    return 2.0 * (1.0 + math.pi * math.sqrt(max(p.b, 0.0)) * t) * math.exp(max(-p.a, 0.0) * t)


def boundary_error(p, g1, g2, dt):
    """Interpolation error of the boundary signals, weighted by the theta mass."""
    e = 0.0
    for g in (g1, g2):
        if g.size > 2:
            e = max(e, float(np.max(np.abs(np.diff(g, n=2)))) / 8.0)
    return 2.0 * p.eps * e * (1.0 + 2.0 * math.sqrt(p.T / (math.pi * p.eps)) + p.T / p.L)


# ---------------------------------------------------------------- solvers

def _prepare(params, grid, kind, propagator):
    if propagator is not None:
        if propagator.bc != kind or propagator.p != params or propagator.grid != grid:
            raise DomainError("propagator does not match params, grid and boundary type")
        return propagator
    return Propagator(params, grid, kind)


def _solve_linear(params, init, bdry, f, grid, kind, propagator):
    if bdry.kind != kind:
        raise DomainError(f"{kind} solver called with {bdry.kind} boundary data")
    P = _prepare(params, grid, kind, propagator)
    x, t = P.x, P.t
    u0 = sample_profile(init.u0, x, params.L)
    g1 = sample_profile(bdry.left, t, params.T)
    g2 = sample_profile(bdry.right, t, params.T)
    fs = sample_source(f, x, t)
    u = P.data(0, u0) + P.boundary(0, g1, g2) + P.source(0, fs)
    if kind == DIRICHLET:
        u[:, 0], u[:, -1] = g1, g2
    mb = mass_bound(params, params.T)
    err = mb * (interp_error(u0, 0) + integrated_interp_error(fs, P.dt))
    err += boundary_error(params, g1, g2, P.dt) * mb
    meta = {"params": params.as_dict(), "bc": kind, "grid": {"nx": grid.nx, "nt": grid.nt},
            "quantity": "u", "boundary_zero": bdry.is_zero(), "quad_error_est": err}
    return Field(x, t, u, meta)


def solve_linear_neumann(params, init, bdry, f=None, grid=Grid(), propagator=None):
    """u for u_t - eps u_xx + a u + b int exp(-beta (t - tau)) u = f with flux data."""
    return _solve_linear(params, init, bdry, f, grid, NEUMANN, propagator)


def solve_linear_dirichlet(params, init, bdry, f=None, grid=Grid(), propagator=None):
    """Same operator with prescribed boundary values; boundary nodes hold g1, g2."""
    return _solve_linear(params, init, bdry, f, grid, DIRICHLET, propagator)


def mckean_params(params):
    """Operator constants of the frozen-step piecewise-linear kinetics.

    The kinetics eta(u - a) - u move the whole linear term into the
    operator, whose decay coefficient becomes 1; ``a`` only sets the
    threshold, which is frozen here.
    """
    return params.replace(a=1.0)


def mckean_linear_scenario(params, init, bdry, eta_bar, grid=Grid()):
    """Linear problem with the unit step frozen at eta_bar in {0, 1}."""
    if not params.estimates_valid:
        raise RegimeError("piecewise-linear scenario needs a > 0, b >= 0, beta > 0")
    if eta_bar not in (0, 1):
        raise DomainError(f"eta_bar must be 0 or 1, got {eta_bar}")
    p = mckean_params(params)
    v0 = init.v0

    def f(x, t):
        return eta_bar - sample_profile(v0, x, p.L) * np.exp(-p.beta * t)

    solver = solve_linear_neumann if bdry.kind == NEUMANN else solve_linear_dirichlet
    out = solver(p, InitialData(init.u0, 0.0), bdry, f, grid)
    out.meta["eta_bar"] = eta_bar
    return out


__all__ = [
    "InitialData", "BoundaryData", "Field", "Grid", "FhnParams",
    "solve_linear_neumann", "solve_linear_dirichlet", "mckean_linear_scenario",
    "mckean_params", "sample_profile", "sample_source",
]
