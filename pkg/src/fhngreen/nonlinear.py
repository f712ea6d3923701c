"""Picard iteration for the nonlinear system and the recovery variable.

With f(u) = -a u + phi(u) the system

    u_t = eps u_xx - v + f(u),     v_t = b u - beta v

is equivalent to one integral equation for u,

    u = int [G0 u0 - G1 v0] dxi + (boundary terms with theta_0)
        + int int G0 phi(u) dxi dtau,

together with an explicit formula for v,

    v = v0 exp(-beta t) + b int [G1 u0 - G2 v0] dxi
        + b (boundary terms with theta_1) + b int int G1 phi(u) dxi dtau.

The first is solved by successive substitution; the second is then a
single evaluation.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .certificate import BoundCertificate, digest
from .errors import ConvergenceError, DivergenceError, DomainError, RegimeError
from .kernels import aux_quantities, decay_e
from .linear import (DIRICHLET, NEUMANN, Field, _prepare, boundary_error,
                     integrated_interp_error, interp_error, mass_bound, sample_profile)
from .propagator import Grid


# ------------------------------------------------------------------ types

@dataclass(frozen=True)
class Kinetics:
    """Nonlinear part phi of the kinetics f(u) = -a u + phi(u).

    ``working_interval`` is the box the Picard iterates are required to
    stay in; ``phi_lipschitz_bound`` is a Lipschitz constant of phi there.
    """

    phi: object
    phi_lipschitz_bound: float
    description: str = ""
    working_interval: tuple = (-math.inf, math.inf)

    def __call__(self, u):
        return self.phi(u)


@dataclass
class PicardReport:
    iterations: int = 0
    residual_history: list = field(default_factory=list)
    converged: bool = False
    final_residual: float = math.inf

    def to_dict(self):
        return {"iterations": self.iterations, "residual_history": list(self.residual_history),
                "converged": self.converged, "final_residual": self.final_residual}


@dataclass
class FhnSolution:
    u: Field
    v: Field
    report: PicardReport
    solver: object = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class JosephsonParams:
    a: float
    b: float
    beta: float
    estimates_valid: bool


# ----------------------------------------------------------------- kinetics

def phi_cubic(a, u):
    """phi(u) = u^2 (a + 1 - u)."""
    return u * u * (a + 1.0 - u)


def cubic_kinetics(a):
    """Cubic kinetics with the monitored box [-2(a+1), 2(a+1)].

    On |u| <= R the derivative 2(a+1)u - 3u^2 is bounded by
    2(a+1)R + 3R^2, which is the Lipschitz constant reported.
    """
    r = 2.0 * abs(a + 1.0)
    lip = 2.0 * abs(a + 1.0) * r + 3.0 * r * r
    return Kinetics(lambda u: phi_cubic(a, u), lip, f"u^2 ({a} + 1 - u)", (-r, r))


def source_F(kin, v0, beta, x, t, u):
    """F(x, t, u) = phi(u) - v0(x) exp(-beta t)."""
    phi = kin(u) if callable(kin) else kin.phi(u)
    v = v0(x) if callable(v0) else v0
    return phi - v * np.exp(-beta * np.asarray(t, dtype=float))


# ----------------------------------------------------------- recovery of v

def _exp_hat_weights(beta, dt):
    """int_0^dt exp(-beta (dt - s)) {1 - s/dt, s/dt} ds for an array of steps."""
    q = beta * dt
    small = np.abs(q) < 1e-2
    qs = np.where(small, 1.0, q)
    e = np.exp(-qs)
    w_old = np.where(small, dt * (0.5 - q / 3 + q**2 / 8 - q**3 / 30 + q**4 / 144),
                     dt * (-np.expm1(-qs) - qs * e) / (qs * qs))
    w_new = np.where(small, dt * (0.5 - q / 6 + q**2 / 24 - q**3 / 120 + q**4 / 720),
                     dt * (qs + np.expm1(-qs)) / (qs * qs))
    return w_old, w_new


def exp_trapezoid(times, values, rate):
    """Running int_0^t exp(-rate (t - tau)) g(tau) dtau for piecewise-linear g.

    ``values`` has time along axis 0. Returns an array of the same shape.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    dt = np.diff(times)
    w_old, w_new = _exp_hat_weights(rate, dt)
    decay = np.exp(-rate * dt)
    out = np.zeros_like(values)
    for k in range(dt.size):
        out[k + 1] = decay[k] * out[k] + w_old[k] * values[k] + w_new[k] * values[k + 1]
    return out


def recover_v(params, u, v0):
    """v = v0 exp(-beta t) + b int_0^t exp(-beta (t - tau)) u dtau on u's grid.

    The integral is taken from the grid's first time, which must be 0.
    """
    if not isinstance(u, Field):
        raise DomainError("u must be a Field")
    if abs(u.grid_t[0]) > 0:
        raise DomainError("recover_v needs u sampled from t = 0")
    v0s = sample_profile(v0, u.grid_x, params.L)
    conv = exp_trapezoid(u.grid_t, u.values, params.beta)
    vals = v0s[None, :] * np.exp(-params.beta * u.grid_t)[:, None] + params.b * conv
    meta = dict(u.meta)
    meta["quantity"] = "v"
    meta["quad_error_est"] = abs(params.b) * _trapezoid_error(u.grid_t, u.values, params.beta)
    return Field(u.grid_x, u.grid_t, vals, meta)


def _trapezoid_error(times, values, rate):
    """Bound on the exponential trapezoid error from second differences of the integrand."""
    if values.shape[0] < 3:
        return 0.0
    dt = np.diff(times)
    d2 = np.max(np.abs(np.diff(values, n=2, axis=0)), axis=tuple(range(1, values.ndim)))
    local = np.zeros(dt.size)
    local[:-1] = np.maximum(local[:-1], d2)
    local[1:] = np.maximum(local[1:], d2)
    # |g - I g| <= (max second difference) / 8 on each step; exp weights are <= e^{|rate| dt}
    acc = 0.0
    for k in range(dt.size):
        acc = acc * math.exp(-rate * dt[k]) + dt[k] * local[k] / 8.0 * math.exp(max(-rate, 0) * dt[k])
    return acc


# ------------------------------------------------------------- Josephson

def josephson_params(alpha, eps):
    """(a, b, beta) = (alpha - 1/eps, -a/eps, 1/eps)."""
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    a = alpha - 1.0 / eps
    b = -a / eps
    beta = 1.0 / eps
    return JosephsonParams(a, b, beta, bool(a > 0 and b >= 0 and beta > 0))


@dataclass(frozen=True)
class JosephsonSource:
    """Memory source -int_0^t exp(-(t - tau)/eps) (gamma + sin u) dtau."""

    gamma: float
    eps: float


def josephson_source(gamma, eps, u_history, t=None):
    """Memory source at time t from samples ``(times, values)`` of u at one x.

    The integrand gamma + sin u is interpolated linearly between samples
    and integrated exactly against the exponential.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    times, values = (np.asarray(a, dtype=float) for a in u_history)
    if times.ndim != 1 or times.shape != values.shape or times.size == 0:
        raise DomainError("history must be two 1-D arrays of equal length")
    if times[0] != 0.0:
        raise DomainError("history must start at t = 0")
    if np.any(np.diff(times) <= 0):
        raise DomainError("history times must be strictly increasing")
    if t is None:
        t = float(times[-1])
    if t < 0 or t > times[-1]:
        raise DomainError(f"history covers [0, {times[-1]}], not t={t}")
    keep = times < t
    tt = np.append(times[keep], t)
    vv = np.append(values[keep], np.interp(t, times, values))
    if tt.size == 1:
        return 0.0
    g = gamma + np.sin(vv)
    return -float(exp_trapezoid(tt, g, 1.0 / eps)[-1])


# ----------------------------------------------------------------- solver

class FhnSolver:
    """The Picard map of the integral equation and the v formula on one grid."""

    def __init__(self, params, init, bdry, kin, grid, kind, propagator=None):
        if bdry.kind != kind:
            raise DomainError(f"{kind} solver called with {bdry.kind} boundary data")
        self.params, self.kin, self.kind = params, kin, kind
        self.bdry = bdry
        P = self.P = _prepare(params, grid, kind, propagator)
        x, t = P.x, P.t
        self.u0 = sample_profile(init.u0, x, params.L)
        self.v0 = sample_profile(init.v0, x, params.L)
        self.g1 = sample_profile(bdry.left, t, params.T)
        self.g2 = sample_profile(bdry.right, t, params.T)
        lin = P.data(0, self.u0) - P.data(1, self.v0) + P.boundary(0, self.g1, self.g2)
        self.linear_part = self._pin(lin)

    def _pin(self, u):
        if self.kind == DIRICHLET:
            u[:, 0], u[:, -1] = self.g1, self.g2
        return u

    def apply(self, u):
        """One application of the Picard map to grid values u."""
        return self._pin(self.linear_part + self.P.source(0, self.kin(u)))

    def v_from(self, u):
        p, P = self.params, self.P
        t = P.t
        v = self.v0[None, :] * np.exp(-p.beta * t)[:, None] + p.b * (
            P.data(1, self.u0) - P.data(2, self.v0) + P.boundary(1, self.g1, self.g2)
            + P.source(1, self.kin(u)))
        if self.kind == DIRICHLET:
            # boundary nodes: the pointwise ODE driven by the prescribed values
            for col, g in ((0, self.g1), (-1, self.g2)):
                v[:, col] = self.v0[col] * np.exp(-p.beta * t) + p.b * exp_trapezoid(t, g, p.beta)
        return v

    def error_estimate(self, u):
        """A-posteriori bound on the interpolation error of the computed fields."""
        p = self.params
        phi = self.kin(u)
        mb = mass_bound(p, p.T)
        e = interp_error(self.u0, 0) + interp_error(self.v0, 0) * p.T
        e += integrated_interp_error(phi, self.P.dt)
        e += boundary_error(p, self.g1, self.g2, self.P.dt)
        return mb * e

    def solve(self, picard_tol=1e-8, max_iter=50):
        if not picard_tol > 0:
            raise DomainError("picard_tol must be positive")
        lo, hi = self.kin.working_interval
        report = PicardReport()
        u = self.linear_part.copy()
        for it in range(1, max_iter + 1):
            new = self.apply(u)
            if not np.all(np.isfinite(new)):
                report.iterations = it
                raise DivergenceError(f"Picard iterate {it} is not finite", report)
            res = float(np.max(np.abs(new - u)))
            report.iterations = it
            report.residual_history.append(res)
            report.final_residual = res
            u = new
            if np.min(u) < lo or np.max(u) > hi:
                raise DivergenceError(
                    f"Picard iterate {it} left the working interval [{lo}, {hi}] "
                    f"(range [{np.min(u):.3g}, {np.max(u):.3g}])", report)
            if res <= picard_tol:
                report.converged = True
                break
        if not report.converged:
            raise ConvergenceError(
                f"Picard iteration did not reach {picard_tol:.1e} in {max_iter} "
                f"iterations (residual {report.final_residual:.2e})", report)
        v = self.v_from(u)
        P, p = self.P, self.params
        meta = {"params": p.as_dict(), "bc": self.kind,
                "grid": {"nx": P.grid.nx, "nt": P.grid.nt},
                "boundary_zero": self.bdry.is_zero(), "kinetics": self.kin.description,
                "quad_error_est": self.error_estimate(u), "picard_tol": picard_tol}
        uf = Field(P.x, P.t, u, dict(meta, quantity="u"))
        vf = Field(P.x, P.t, v, dict(meta, quantity="v"))
        return FhnSolution(uf, vf, report, self)


def solve_fhn_neumann(params, init, bdry, kin, grid=Grid(), picard_tol=1e-8, max_iter=50,
                      propagator=None):
    """Nonlinear system with flux boundary data."""
    return FhnSolver(params, init, bdry, kin, grid, NEUMANN, propagator).solve(
        picard_tol, max_iter)


def solve_fhn_dirichlet(params, init, bdry, kin, grid=Grid(), picard_tol=1e-8, max_iter=50,
                        propagator=None):
    """Nonlinear system with prescribed boundary values."""
    return FhnSolver(params, init, bdry, kin, grid, DIRICHLET, propagator).solve(
        picard_tol, max_iter)


# ------------------------------------------------------------ certificates

def nonlinear_rhs(params, t, nu0, nv0, nphi):
    """Right-hand sides of the two pointwise bounds at times t."""
    aux = [aux_quantities(params, float(tt)) for tt in np.atleast_1d(t)]
    t = np.atleast_1d(np.asarray(t, dtype=float))
    E = np.array([q.E_t for q in aux])
    om, b0, b1 = aux[0].omega, aux[0].beta0, aux[0].beta1
    b, be = params.b, params.beta
    ru = 2.0 * (nu0 * (1.0 + math.pi * math.sqrt(b) * t) * np.exp(-om * t)
                + nv0 * E + b0 * nphi)
    rv = nv0 * np.exp(-be * t) + 2.0 * (b * (nu0 + t * nv0) * E + b * b1 * nphi)
    return ru, rv


def offgrid_points(rng, P, count):
    """Random interior x (generally off the grid) at up to five random grid times."""
    nt = P.grid.nt
    times = rng.choice(np.arange(1, nt + 1), size=min(5, nt), replace=False)
    per = int(math.ceil(count / times.size))
    L = P.p.L
    return [(int(k), np.clip(rng.uniform(0.0, L, per), 1e-3 * L, L - 1e-3 * L))
            for k in sorted(times)]


def certify_nonlinear_bounds(params, sol, norms=None, offgrid=0, seed=0):
    """Pointwise check of both a priori bounds.

    The check set is the solution grid plus ``offgrid`` random points where
    u and v are evaluated directly from the integral representations.
    """
    if not params.estimates_valid:
        raise RegimeError(
            f"bounds need a > 0, b >= 0, beta > 0; got {params.as_dict()}")
    if not sol.u.meta.get("boundary_zero", False):
        raise RegimeError("the bounds are stated for homogeneous boundary data")
    S = sol.solver
    if norms is None:
        if S is None:
            raise DomainError("norms are required when the solution carries no solver")
        norms = {"u0": float(np.max(np.abs(S.u0))),
                 "v0": float(np.max(np.abs(S.v0))),
                 "phi": float(np.max(np.abs(S.kin(sol.u.values))))}
    t = sol.u.grid_t
    ru, rv = nonlinear_rhs(params, t, norms["u0"], norms["v0"], norms["phi"])
    lhs_u = list(np.max(np.abs(sol.u.values), axis=1))
    lhs_v = list(np.max(np.abs(sol.v.values), axis=1))
    ru, rv = list(ru), list(rv)
    dg = digest("nonlinear", params.as_dict(), sol.u.meta.get("grid"), norms,
                sol.u.meta.get("bc"), sol.u.meta.get("kinetics"), seed)
    n_off = 0
    if offgrid and S is not None:
        P, p = S.P, params
        phi = S.kin(sol.u.values)
        rng = np.random.default_rng(int(dg, 16) % 2**32)
        for k, xs in offgrid_points(rng, P, offgrid):
            heat = P.heat_at(xs, k)
            uu = (P.at(0, xs, k, data=S.u0, source=phi, heat=heat)
                  - P.at(1, xs, k, data=S.v0, heat=heat))
            vv = (np.interp(xs, P.x, S.v0) * math.exp(-p.beta * P.t[k])
                  + p.b * (P.at(1, xs, k, data=S.u0, source=phi, heat=heat)
                           - P.at(2, xs, k, data=S.v0, heat=heat)))
            a, b = nonlinear_rhs(p, P.t[k], norms["u0"], norms["v0"], norms["phi"])
            lhs_u.append(float(np.max(np.abs(uu))))
            lhs_v.append(float(np.max(np.abs(vv))))
            ru.append(float(a[0]))
            rv.append(float(b[0]))
            n_off += xs.size
    slack = float(sol.u.meta.get("quad_error_est", 0.0)) + 2.0 * float(
        sol.u.meta.get("picard_tol", 0.0))
    common = {"norms": norms, "offgrid_points": n_off,
              "picard_iterations": sol.report.iterations}
    return [
        BoundCertificate.from_arrays("nonlinear_u", lhs_u, ru, slack, dg, **common),
        BoundCertificate.from_arrays("nonlinear_v", lhs_v, rv,
                                     max(params.b, 1.0) * slack * (1.0 + params.T), dg, **common),
    ]
