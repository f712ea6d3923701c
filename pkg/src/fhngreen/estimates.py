"""Certification of the a priori bounds across parameter sets and scenarios.

For every parameter set the suite emits the six kernel certificates, then
for every scenario the certificates of the solution bounds: ``linear_u``
for linear scenarios, ``nonlinear_u`` / ``nonlinear_v`` for nonlinear ones.
Left-hand sides are sampled on the solver grid and at extra off-grid points
evaluated directly from the solution formulas.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np

from .certificate import BoundCertificate, digest
from .errors import RegimeError
from .kernels import aux_quantities, certify_kernel_bounds
from .linear import (DIRICHLET, NEUMANN, BoundaryData, InitialData, Grid,
                     sample_profile, sample_source, solve_linear_dirichlet,
                     solve_linear_neumann)
from .nonlinear import (certify_nonlinear_bounds, cubic_kinetics, offgrid_points,
                        solve_fhn_dirichlet, solve_fhn_neumann)
from .propagator import Propagator


@dataclass(frozen=True)
class Scenario:
    """A data set run under every parameter set of a suite.

    ``kind`` is ``"linear"`` (source ``f``) or ``"fhn"`` (cubic kinetics with
    the parameter set's ``a``). Boundary data are homogeneous, as the bounds
    require.
    """

    name: str
    kind: str = "linear"
    bc: str = NEUMANN
    u0: object = 0.0
    v0: object = 0.0
    f: object = None
    nx: int = 32
    nt: int = 50

    def describe(self):
        def tag(w):
            return w if (w is None or np.ndim(w) == 0 and not callable(w)) else getattr(
                w, "__name__", repr(w))
        return {"name": self.name, "kind": self.kind, "bc": self.bc, "u0": tag(self.u0),
                "v0": tag(self.v0), "f": tag(self.f), "nx": self.nx, "nt": self.nt}


def _bump(x):
    return 0.3 * np.exp(-40.0 * (x - 0.35) ** 2)


def _wave(x, t):
    return 0.5 * np.cos(np.pi * x) * np.exp(-t)


def standard_scenarios():
    return [
        Scenario("zero-data", "linear"),
        Scenario("bump-linear", "linear", NEUMANN, u0=_bump, f=_wave),
        Scenario("cubic-bump", "fhn", NEUMANN, u0=_bump, v0=0.05),
    ]


def check_regime(param_sets):
    for idx, p in enumerate(param_sets):
        if not p.estimates_valid:
            raise RegimeError(
                f"param_set[{idx}] = {p.as_dict()} is outside the regime a > 0, b >= 0, beta > 0")


# --------------------------------------------------------------- linear

def linear_rhs(params, t, nf, nu0):
    """2 [||f|| beta0 + ||u0|| (1 + pi sqrt(b) t) exp(-omega t)]."""
    aux = aux_quantities(params, 1.0)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return 2.0 * (nf * aux.beta0 + nu0 * (1.0 + math.pi * math.sqrt(params.b) * t)
                  * np.exp(-aux.omega * t))


def certify_linear(params, scenario, seed=0, offgrid=100):
    if scenario.kind != "linear":
        raise ValueError("linear certificate needs a linear scenario")
    grid = Grid(scenario.nx, scenario.nt)
    bdry = BoundaryData(scenario.bc)
    solver = solve_linear_neumann if scenario.bc == NEUMANN else solve_linear_dirichlet
    P = Propagator(params, grid, scenario.bc)
    u = solver(params, InitialData(scenario.u0), bdry, scenario.f, grid, propagator=P)
    u0 = sample_profile(scenario.u0, P.x, params.L)
    fs = sample_source(scenario.f, P.x, P.t)
    nf, nu0 = float(np.max(np.abs(fs))), float(np.max(np.abs(u0)))
    lhs = list(np.max(np.abs(u.values), axis=1))
    rhs = list(linear_rhs(params, P.t, nf, nu0))
    dg = digest("linear_u", params.as_dict(), scenario.describe(), seed)
    rng = np.random.default_rng(int(dg, 16) % 2**32 + seed)
    n_off = 0
    for k, xs in offgrid_points(rng, P, offgrid) if offgrid else []:
        val = P.at(0, xs, k, data=u0, source=fs)
        lhs.append(float(np.max(np.abs(val))))
        rhs.append(float(linear_rhs(params, P.t[k], nf, nu0)[0]))
        n_off += xs.size
    return BoundCertificate.from_arrays(
        "linear_u", lhs, rhs, u.meta["quad_error_est"], dg,
        scenario=scenario.name, offgrid_points=n_off, norms={"f": nf, "u0": nu0})


def certify_fhn(params, scenario, seed=0, offgrid=100, picard_tol=1e-8, max_iter=50):
    grid = Grid(scenario.nx, scenario.nt)
    kin = cubic_kinetics(params.a)
    solve = solve_fhn_neumann if scenario.bc == NEUMANN else solve_fhn_dirichlet
    sol = solve(params, InitialData(scenario.u0, scenario.v0), BoundaryData(scenario.bc),
                kin, grid, picard_tol, max_iter)
    certs = certify_nonlinear_bounds(params, sol, offgrid=offgrid, seed=seed)
    for c in certs:
        c.notes["scenario"] = scenario.name
    return certs


# ---------------------------------------------------------------- suite

def run_certification_suite(param_sets, scenarios=None, report_path=None, seed=0,
                            offgrid=100, kernel_bounds=True, kernel_tol=1e-9):
    """Certificates for every (bound, parameter set, scenario); optional JSON report.

    Kernel bounds do not depend on the scenario and are emitted once per
    parameter set.
    """
    param_sets = list(param_sets)
    check_regime(param_sets)
    scenarios = standard_scenarios() if scenarios is None else list(scenarios)
    certs, rows = [], []
    for idx, p in enumerate(param_sets):
        found = []
        if kernel_bounds:
            found += certify_kernel_bounds(p, tol=kernel_tol)
        for sc in scenarios:
            if sc.kind == "linear":
                found.append(certify_linear(p, sc, seed, offgrid))
            elif sc.kind == "fhn":
                found += certify_fhn(p, sc, seed, offgrid)
            else:
                raise ValueError(f"unknown scenario kind {sc.kind!r}")
        for c in found:
            rows.append(dict(c.to_dict(), param_set=idx))
        certs += found
    if report_path is not None:
        write_report(report_path, param_sets, scenarios, rows)
    return certs


def suite_passed(certs):
    return all(c.passed for c in certs)


def write_report(path, param_sets, scenarios, rows):
    report = {
        "passed": all(r["passed"] for r in rows),
        "param_sets": [p.as_dict() for p in param_sets],
        "scenarios": [s.describe() for s in scenarios],
        "certificates": rows,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    return report


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return repr(obj)


# ------------------------------------------------------- long-horizon run

@dataclass
class DecayReport:
    T: float
    data_sup_initial: float
    data_sup_final: float
    decay_factor: float
    sup_u_final: float
    source_bound: float
    bound_slack: float
    notes: dict = field(default_factory=dict)

    @property
    def passed(self):
        return (self.decay_factor >= 1e6
                and self.sup_u_final <= self.source_bound + 1e-6 + self.bound_slack)


def asymptotic_decay(params, init, grid, picard_tol=1e-8, max_iter=50):
    """Compare the data-driven part of u at t = T with its size at t = 0.

    The data part is everything in the integral equation except the
    nonlinear source; the remainder of u must stay below 2 beta0 sup|phi|.
    """
    kin = cubic_kinetics(params.a)
    sol = solve_fhn_neumann(params, init, BoundaryData(NEUMANN), kin, grid, picard_tol, max_iter)
    lin = sol.solver.linear_part
    d0 = float(np.max(np.abs(lin[0])))
    dT = float(np.max(np.abs(lin[-1])))
    aux = aux_quantities(params, params.T)
    nphi = float(np.max(np.abs(kin(sol.u.values))))
    return DecayReport(
        T=params.T, data_sup_initial=d0, data_sup_final=dT,
        decay_factor=math.inf if dT == 0 else d0 / dT,
        sup_u_final=float(np.max(np.abs(sol.u.values[-1]))),
        source_bound=2.0 * aux.beta0 * nphi,
        bound_slack=float(sol.u.meta["quad_error_est"]),
        notes={"picard_iterations": sol.report.iterations, "phi_sup": nphi,
               "omega": aux.omega, "beta0": aux.beta0})
