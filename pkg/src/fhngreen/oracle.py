"""Method-of-lines finite differences for the full system — the reference solver.

    u_t = eps u_xx - a u - v + S,      v_t = b u - beta v,

with second-order central differences in x. The source S is one of:

* a :class:`~fhngreen.nonlinear.Kinetics` (S = phi(u), v(0) = v0),
* a :class:`~fhngreen.nonlinear.JosephsonSource`. S is then a memory term
  carried as an extra pointwise ODE, z_t = -z / eps_m - (gamma + sin u).
* a callable ``f(x, t)`` (linear problem: S = f, memory started at zero).

Neumann data enter through ghost points, u_{-1} = u_1 - 2 h psi1; Dirichlet
values are pinned at every stage. The scheme is either classical RK4 or
IMEX (Crank-Nicolson diffusion with second-order Adams-Bashforth for the
remaining terms).
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.linalg import solve_banded

from .errors import ConfigError, DivergenceError, StabilityError
from .linear import DIRICHLET, NEUMANN, Field, sample_profile
from .nonlinear import FhnSolution, JosephsonSource, Kinetics, PicardReport

BLOWUP = 1e6
SCHEMES = ("explicit_rk4", "imex")


@dataclass(frozen=True)
class FdConfig:
    """Spatial intervals, time step (None = automatic), scheme and boundary type."""

    nx: int = 64
    dt: float = None
    scheme: str = "explicit_rk4"
    bc: str = NEUMANN

    def __post_init__(self):
        if int(self.nx) != self.nx or self.nx < 16:
            raise ConfigError(f"nx must be an integer >= 16, got {self.nx}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.bc not in (NEUMANN, DIRICHLET):
            raise ConfigError(f"bc must be Neumann or Dirichlet, got {self.bc!r}")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")

    def stable_dt(self, params):
        """Largest step allowed for the explicit scheme."""
        h = params.L / self.nx
        return 0.4 * h * h / params.eps

    def step(self, params):
        if self.scheme == "explicit_rk4":
            limit = self.stable_dt(params)
            if self.dt is None:
                return limit
            if self.dt > limit * (1 + 1e-12):
                raise StabilityError(
                    f"explicit_rk4 needs dt <= 0.4 h^2/eps = {limit:.3e}, got dt={self.dt:.3e}")
            return self.dt
        if self.dt is not None:
            return self.dt
        h = params.L / self.nx
        return min(0.5 * h, 0.01)


def _laplacian(u, h, bc, psi1, psi2):
    lap = np.empty_like(u)
    lap[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (h * h)
    if bc == NEUMANN:
        lap[0] = (2.0 * u[1] - 2.0 * u[0] - 2.0 * h * psi1) / (h * h)
        lap[-1] = (2.0 * u[-2] - 2.0 * u[-1] + 2.0 * h * psi2) / (h * h)
    else:
        lap[0] = lap[-1] = 0.0
    return lap


def _time_signal(w, T):
    """Scalar function of t for a constant, callable or uniformly sampled signal."""
    if callable(w):
        return lambda t: float(w(t))
    if np.ndim(w) == 0:
        c = float(w)
        return lambda t: c
    arr = np.asarray(w, dtype=float)
    from scipy.interpolate import CubicSpline
    spline = CubicSpline(np.linspace(0.0, T, arr.size), arr)
    return lambda t: float(spline(t))


class _System:
    def __init__(self, params, init, bdry, source, cfg):
        self.p, self.cfg = params, cfg
        self.x = np.linspace(0.0, params.L, cfg.nx + 1)
        self.h = params.L / cfg.nx
        self.left = _time_signal(bdry.left, params.T)
        self.right = _time_signal(bdry.right, params.T)
        u0 = sample_profile(init.u0, self.x, params.L)
        if isinstance(source, Kinetics):
            self.mode, v0 = "kinetics", sample_profile(init.v0, self.x, params.L)
        elif isinstance(source, JosephsonSource):
            self.mode, v0 = "josephson", sample_profile(init.v0, self.x, params.L)
        elif source is None or callable(source) or np.ndim(source) == 0:
            self.mode, v0 = "linear", np.zeros_like(self.x)
        else:
            raise ConfigError("source must be Kinetics, JosephsonSource or a callable f(x, t)")
        self.source = 0.0 if source is None else source
        z0 = np.zeros_like(self.x)
        self.state0 = np.stack([u0, v0, z0])
        if cfg.bc == DIRICHLET:
            self._pin(self.state0, 0.0)

    @staticmethod
    def signal(which, t):
        return which(t)

    def _pin(self, st, t):
        st[0, 0] = self.signal(self.left, t)
        st[0, -1] = self.signal(self.right, t)

    def source_term(self, u, z, t):
        if self.mode == "kinetics":
            return self.source(u)
        if self.mode == "josephson":
            return z
        if callable(self.source):
            return self.source(self.x, t)
        return float(self.source)

    def reaction(self, st, t):
        """Everything except diffusion: d/dt of (u, v, z)."""
        u, v, z = st
        p = self.p
        d = np.empty_like(st)
        d[0] = self.source_term(u, z, t) - p.a * u - v
        d[1] = p.b * u - p.beta * v
        if self.mode == "josephson":
            d[2] = -z / self.source.eps - (self.source.gamma + np.sin(u))
        else:
            d[2] = 0.0
        return d

    def rhs(self, st, t):
        if self.cfg.bc == DIRICHLET:
            st = st.copy()
            self._pin(st, t)
            d = self.reaction(st, t)
            d[0] += self.p.eps * _laplacian(st[0], self.h, DIRICHLET, 0.0, 0.0)
            d[0, 0] = d[0, -1] = 0.0
            return d
        d = self.reaction(st, t)
        d[0] += self.p.eps * _laplacian(st[0], self.h, NEUMANN, self.left(t), self.right(t))
        return d


def _rk4(sysm, dt, nsteps, record):
    st = sysm.state0.copy()
    out = {0: st.copy()} if 0 in record else {}
    t = 0.0
    for n in range(nsteps):
        k1 = sysm.rhs(st, t)
        k2 = sysm.rhs(st + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = sysm.rhs(st + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = sysm.rhs(st + dt * k3, t + dt)
        st = st + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = (n + 1) * dt
        if sysm.cfg.bc == DIRICHLET:
            sysm._pin(st, t)
        _guard(st, t)
        if n + 1 in record:
            out[n + 1] = st.copy()
    return out


def _imex(sysm, dt, nsteps, record):
    p, h, bc = sysm.p, sysm.h, sysm.cfg.bc
    n = sysm.x.size
    r = p.eps * dt / (2.0 * h * h)
    # banded (I - r D) with D the three-point Laplacian (times h^2)
    ab = np.zeros((3, n))
    ab[0, 1:] = -r
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :-1] = -r
    if bc == NEUMANN:
        ab[0, 1] = -2.0 * r
        ab[2, -2] = -2.0 * r
    else:
        ab[1, 0] = ab[1, -1] = 1.0
        ab[0, 1] = 0.0
        ab[2, -2] = 0.0

    def explicit_diffusion(u, t):
        psi1 = sysm.signal(sysm.left, t) if bc == NEUMANN else 0.0
        psi2 = sysm.signal(sysm.right, t) if bc == NEUMANN else 0.0
        return p.eps * _laplacian(u, h, bc, psi1, psi2)

    st = sysm.state0.copy()
    out = {0: st.copy()} if 0 in record else {}
    prev = sysm.reaction(st, 0.0)
    t = 0.0
    for k in range(nsteps):
        cur = sysm.reaction(st, t)
        react = cur if k == 0 else 1.5 * cur - 0.5 * prev
        t1 = (k + 1) * dt
        rhs = st[0] + 0.5 * dt * explicit_diffusion(st[0], t) + dt * react[0]
        if bc == NEUMANN:
            # boundary flux contribution of the implicit half step
            rhs[0] += -dt * p.eps * sysm.signal(sysm.left, t1) / h
            rhs[-1] += dt * p.eps * sysm.signal(sysm.right, t1) / h
        else:
            rhs[0] = sysm.signal(sysm.left, t1)
            rhs[-1] = sysm.signal(sysm.right, t1)
        new = st.copy()
        new[0] = solve_banded((1, 1), ab, rhs)
        new[1:] = st[1:] + dt * react[1:]
        prev, st, t = cur, new, t1
        _guard(st, t)
        if k + 1 in record:
            out[k + 1] = st.copy()
    return out


def _guard(st, t):
    if not np.all(np.isfinite(st)) or np.max(np.abs(st[0])) > BLOWUP:
        raise DivergenceError(f"finite-difference solution blew up at t={t:.4g}")


def fd_solve(params, init, bdry, source, cfg, times=None):
    """Integrate to params.T and return (u, v) sampled at ``times``.

    ``times`` defaults to 11 equispaced instants; the step is shortened so
    that every requested time is hit exactly.
    """
    if bdry.kind != cfg.bc:
        raise ConfigError(f"boundary data are {bdry.kind} but cfg.bc is {cfg.bc}")
    times = np.linspace(0.0, params.T, 11) if times is None else np.asarray(times, float)
    if times.ndim != 1 or np.any(np.diff(times) <= 0) or times[0] < 0 or times[-1] > params.T * (1 + 1e-12):
        raise ConfigError("output times must be increasing and inside [0, T]")
    dt_max = cfg.step(params)
    # a common step dividing all output times: subdivide the base unit T/m
    nsteps = int(math.ceil(params.T / dt_max - 1e-9))
    ks = times / params.T * nsteps
    while np.max(np.abs(ks - np.round(ks))) > 1e-7:
        nsteps += 1
        ks = times / params.T * nsteps
        if nsteps > 10**8:
            raise ConfigError("output times are not commensurate with T")
    dt = params.T / nsteps
    record = set(int(k) for k in np.round(ks))
    sysm = _System(params, init, bdry, source, cfg)
    integrate = _rk4 if cfg.scheme == "explicit_rk4" else _imex
    states = integrate(sysm, dt, nsteps, record)
    u = np.array([states[int(k)][0] for k in np.round(ks)])
    v = np.array([states[int(k)][1] for k in np.round(ks)])
    meta = {"params": params.as_dict(), "bc": cfg.bc, "scheme": cfg.scheme, "nx": cfg.nx,
            "dt": dt, "source": sysm.mode, "boundary_zero": bdry.is_zero()}
    report = PicardReport(iterations=0, residual_history=[], converged=True, final_residual=0.0)
    return FhnSolution(Field(sysm.x, times, u, dict(meta, quantity="u")),
                       Field(sysm.x, times, v, dict(meta, quantity="v")), report)


# ------------------------------------------------------------ convergence

@dataclass(frozen=True)
class FdScenario:
    """Inputs of a convergence study; ``exact(x, t)`` is optional."""

    params: object
    init: object
    bdry: object
    source: object
    exact: object = None
    scheme: str = "explicit_rk4"


@dataclass
class ConvergenceTable:
    nx: list
    errors: list
    orders: list
    observed_order: float = None
    exact: bool = False
    reference: str = "analytic"
    notes: dict = field(default_factory=dict)


def fd_convergence_study(scenario, nx_list, dt_factor=0.25):
    """Errors at t = T for each nx and the observed order of accuracy.

    With an analytic solution, errors are measured against it. Otherwise
    consecutive grids are differenced (Richardson) and the order is taken
    from the ratio of successive differences. The time step is tied to
    h^2 so the O(dt^4) time error stays invisible.
    """
    nx_list = [int(n) for n in nx_list]
    if len(nx_list) < 3 or any(b <= a for a, b in zip(nx_list, nx_list[1:])):
        raise ConfigError("nx_list must be strictly increasing with at least 3 entries")
    p = scenario.params
    coarse = nx_list[0]
    if any(n % coarse for n in nx_list):
        raise ConfigError("every nx must be a multiple of the first")
    xs = np.linspace(0.0, p.L, coarse + 1)
    sols = []
    for n in nx_list:
        cfg = FdConfig(nx=n, scheme=scenario.scheme, bc=scenario.bdry.kind)
        cfg = FdConfig(nx=n, dt=dt_factor * cfg.stable_dt(p), scheme=scenario.scheme,
                       bc=scenario.bdry.kind)
        sol = fd_solve(p, scenario.init, scenario.bdry, scenario.source, cfg,
                       times=np.array([0.0, p.T]))
        sols.append(sol.u.restrict(xs=xs).values[-1])
    if scenario.exact is not None:
        ref = np.asarray(scenario.exact(xs, p.T), dtype=float)
        errors = [float(np.max(np.abs(s - ref))) for s in sols]
        ratios = list(zip(errors, errors[1:], nx_list, nx_list[1:]))
        reference = "analytic"
    else:
        errors = [float(np.max(np.abs(a - b))) for a, b in zip(sols, sols[1:])]
        ratios = list(zip(errors, errors[1:], nx_list, nx_list[1:]))
        reference = "successive differences"
    orders = []
    for e1, e2, n1, n2 in ratios:
        if e1 == 0.0 or e2 == 0.0:
            orders.append(None)
        else:
            orders.append(math.log(e1 / e2) / math.log(n2 / n1))
    exact = all(e == 0.0 for e in errors)
    valid = [o for o in orders if o is not None]
    observed = valid[-1] if valid else None
    return ConvergenceTable(nx_list, errors, orders, observed, exact, reference)
