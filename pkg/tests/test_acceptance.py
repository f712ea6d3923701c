"""Acceptance criteria 1-13, one test each, at the stated tolerances."""

import math

import numpy as np
import pytest

from fhngreen import (BoundaryData, FdConfig, FhnParams, Grid, InitialData, asymptotic_decay,
                      certify_kernel_bounds, certify_nonlinear_bounds, cubic_kinetics, fd_solve,
                      josephson_params, josephson_source, k0, k_i, laplace_check_k0,
                      recover_v, solve_fhn_dirichlet, solve_fhn_neumann, solve_linear_dirichlet,
                      solve_linear_neumann)
from fhngreen.config import build_config
from fhngreen.estimates import Scenario, certify_linear, standard_scenarios
from fhngreen.kernels import kernel_values
from fhngreen.oracle import FdScenario, fd_convergence_study

import oracles

BUMP_PARAMS = FhnParams(eps=1.0, a=0.25, b=1.0, beta=1.0, L=1.0, T=1.0)


def _bump(x):
    return 0.8 * np.exp(-30.0 * (x - 0.4) ** 2)


def _preset(name):
    cfg = build_config({"scenario": name, "grid": {"nx": 32, "nt": 50}})
    sc = cfg.scenario
    solve = solve_fhn_neumann if sc.bc == "Neumann" else solve_fhn_dirichlet
    return cfg, solve(cfg.params, InitialData(sc.u0, sc.v0), BoundaryData(sc.bc),
                      cubic_kinetics(cfg.params.a), Grid(32, 50), picard_tol=1e-8, max_iter=25)


@pytest.fixture(scope="module")
def preset_solutions():
    return {name: _preset(name) for name in ("cubic-bump-neumann", "cubic-bump-dirichlet")}


@pytest.fixture(scope="module")
def bump_solutions():
    out = {}
    for kind in ("Neumann", "Dirichlet"):
        solve = solve_fhn_neumann if kind == "Neumann" else solve_fhn_dirichlet
        v0 = 0.1 if kind == "Neumann" else 0.0
        out[kind] = solve(BUMP_PARAMS, InitialData(_bump, v0), BoundaryData(kind),
                          cubic_kinetics(BUMP_PARAMS.a), Grid(64, 100))
    return out


# 1 -------------------------------------------------------------------------
def test_01_laplace_identity_of_k0():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(20):
        p = oracles.random_params(rng)
        r, s = rng.uniform(0.2, 3.0), rng.uniform(0.1, 3.0)
        worst = max(worst, laplace_check_k0(p, r, s, tol=1e-6))
    assert worst <= 1e-6


# 2 -------------------------------------------------------------------------
def test_02_iterated_kernels_equal_convolutions():
    rng = np.random.default_rng(202)

    def kernel(p, i, x, t):
        return float(kernel_values(p, i, np.array([x]), t, panels=8)[0])

    worst = 0.0
    for n in range(20):
        p = oracles.random_params(rng, b=(0.1, 2.0))
        x, t, i = rng.uniform(-2.0, 2.0), rng.uniform(0.1, 3.0), 1 + n % 2
        direct = k_i(p, i, x, t).value
        worst = max(worst, abs(direct - oracles.convolve_previous(p, i, x, t, kernel)))
    assert worst <= 1e-6


# 3 -------------------------------------------------------------------------
@pytest.mark.slow
def test_03_kernel_bound_certificates():
    rng = np.random.default_rng(303)
    failures = []
    for _ in range(5):
        p = oracles.random_params(rng, eps=(0.2, 1.5), a=(0.3, 2.0), b=(0.0, 2.0),
                                  beta=(0.3, 2.0))
        for c in certify_kernel_bounds(p, ts=(0.1, 0.5, 1.0, 2.0, 5.0)):
            if not (c.passed and c.margin + c.slack >= 0):
                failures.append((p, c.bound_id, c.margin, c.slack))
    assert not failures


# 4 -------------------------------------------------------------------------
@pytest.mark.parametrize("kind", ["Neumann", "Dirichlet"])
def test_04_linear_solver_reproduces_modal_solutions(kind):
    p = FhnParams(eps=0.1, a=0.5, b=0.0, beta=1.0, L=1.0, T=1.0)
    grid = Grid(256, 100)
    worst = 0.0
    for mode in (1, 2):
        k = mode * math.pi
        u0 = (lambda x: np.cos(k * x)) if kind == "Neumann" else (lambda x: np.sin(k * x))
        solve = solve_linear_neumann if kind == "Neumann" else solve_linear_dirichlet
        u = solve(p, InitialData(u0), BoundaryData(kind), None, grid)
        exact = oracles.modal_solution(p, mode, kind, u.grid_x, u.grid_t)
        worst = max(worst, float(np.max(np.abs(u.values - exact))))
    assert worst <= 1e-4


# 5 -------------------------------------------------------------------------
@pytest.mark.parametrize("kind", ["Neumann", "Dirichlet"])
def test_05_linear_solver_matches_fd_oracle(kind):
    p = FhnParams(eps=1.0, a=1.0, b=1.0, beta=1.0, L=1.0, T=1.0)
    bdry = BoundaryData(kind, lambda t: np.sin(2 * t), lambda t: 0.5 * t)

    def f(x, t):
        return 1.0 + np.cos(np.pi * x) * np.exp(-t)

    def u0(x):
        return x * (1 - x)

    solve = solve_linear_neumann if kind == "Neumann" else solve_linear_dirichlet
    u = solve(p, InitialData(u0), bdry, f, Grid(64, 100))
    ts = np.array([0.25, 0.5, 1.0])
    ref = fd_solve(p, InitialData(u0), bdry, f, FdConfig(nx=128, bc=kind), times=ts)
    diff = u.restrict(ts=ts).values - ref.u.restrict(xs=u.grid_x).values
    assert float(np.max(np.abs(diff))) <= 5e-4


# 6 -------------------------------------------------------------------------
@pytest.mark.slow
def test_06_linear_bound_certificates():
    scenarios = [s for s in standard_scenarios() if s.kind == "linear"]
    scenarios += [Scenario(s.name + "-dirichlet", "linear", "Dirichlet", s.u0, s.v0, s.f)
                  for s in list(scenarios)]
    params = [FhnParams(eps=0.1, a=1.0, b=1.0, beta=1.0),
              FhnParams(eps=1.0, a=0.3, b=2.0, beta=0.5, T=2.0)]
    certs = [certify_linear(p, sc, seed=0, offgrid=100) for p in params for sc in scenarios]
    assert certs and all(c.passed for c in certs)


# 7 -------------------------------------------------------------------------
def test_07_picard_fixed_point(preset_solutions):
    for name, (cfg, sol) in preset_solutions.items():
        rep = sol.report
        assert rep.converged and rep.final_residual <= 1e-8, name
        assert rep.iterations <= 25, name
        hist = np.array(rep.residual_history)
        assert np.all(np.diff(hist) <= 0), name
        moved = np.max(np.abs(sol.solver.apply(sol.u.values) - sol.u.values))
        assert moved <= 2e-8, name


# 8 -------------------------------------------------------------------------
def test_08_nonlinear_matches_ode_and_pde_oracles(bump_solutions):
    p = FhnParams(eps=1.0, a=0.25, b=1.0, beta=1.0, L=1.0, T=1.0)
    sol = solve_fhn_neumann(p, InitialData(0.1, 0.0), BoundaryData(), cubic_kinetics(p.a),
                            Grid(32, 100))
    ode = oracles.fhn_ode(p.a, p.b, p.beta, 0.1, 0.0, 1.0, 10000)[::100]
    assert np.max(np.abs(sol.u.values - ode[:, :1])) <= 1e-4
    assert np.max(np.abs(sol.v.values - ode[:, 1:])) <= 1e-4

    for kind, s in bump_solutions.items():
        v0 = 0.1 if kind == "Neumann" else 0.0
        ref = fd_solve(BUMP_PARAMS, InitialData(_bump, v0), BoundaryData(kind),
                       cubic_kinetics(BUMP_PARAMS.a), FdConfig(nx=128, bc=kind),
                       times=np.array([0.0, 1.0]))
        u_ref = ref.u.restrict(xs=s.u.grid_x).values[-1]
        assert np.max(np.abs(s.u.values[-1] - u_ref)) <= 2e-3, kind


# 9 -------------------------------------------------------------------------
def test_09_recovered_v_matches_solver_v(bump_solutions):
    for kind, s in bump_solutions.items():
        v0 = 0.1 if kind == "Neumann" else 0.0
        rv = recover_v(BUMP_PARAMS, s.u, v0)
        tol = rv.meta["quad_error_est"]
        assert tol > 0
        assert np.max(np.abs(rv.values - s.v.values)) <= 5 * tol, kind


# 10 ------------------------------------------------------------------------
@pytest.mark.slow
def test_10_nonlinear_bound_certificates(preset_solutions, bump_solutions):
    checked = 0
    for cfg, sol in preset_solutions.values():
        for c in certify_nonlinear_bounds(cfg.params, sol, offgrid=100, seed=1):
            assert c.passed, (c.bound_id, c.margin, c.slack)
            checked += 1
    for s in bump_solutions.values():
        for c in certify_nonlinear_bounds(BUMP_PARAMS, s, offgrid=100, seed=2):
            assert c.passed, (c.bound_id, c.margin, c.slack)
            checked += 1
    assert checked == 8


# 11 ------------------------------------------------------------------------
def test_11_long_horizon_decay():
    p = FhnParams(eps=0.1, a=1.0, b=1.0, beta=1.0, L=1.0, T=20.0)
    bump = build_config({}).scenario.u0
    rep = asymptotic_decay(p, InitialData(bump, 0.05), Grid(32, 200))
    assert rep.decay_factor >= 1e6
    assert rep.sup_u_final <= rep.source_bound + 1e-6


# 12 ------------------------------------------------------------------------
def test_12_fd_oracle_convergence_order():
    p0 = FhnParams(eps=0.1, a=1.0, b=0.0, beta=1.0, T=0.5)

    def exact(x, t):
        return np.cos(np.pi * x) * np.exp(-(p0.eps * np.pi ** 2 + p0.a) * t)

    heat = FdScenario(p0, InitialData(lambda x: np.cos(np.pi * x)), BoundaryData(),
                      lambda x, t: 0.0 * x, exact=exact)
    p = FhnParams(eps=0.1, a=1.0, b=1.0, beta=1.0, T=0.5)
    bump = InitialData(lambda x: 0.3 * np.exp(-40 * (x - 0.35) ** 2), 0.05)
    fhn = FdScenario(p, bump, BoundaryData(), cubic_kinetics(1.0))
    for sc, nxs in ((heat, [16, 32, 64]), (fhn, [16, 32, 64, 128])):
        table = fd_convergence_study(sc, nxs)
        assert 1.7 <= table.observed_order <= 2.3, table


# 13 ------------------------------------------------------------------------
def test_13_josephson_mapping_and_memory_source():
    rng = np.random.default_rng(1313)
    for _ in range(10):
        alpha, eps = rng.uniform(-2.0, 5.0), rng.uniform(0.1, 5.0)
        jp = josephson_params(alpha, eps)
        a = alpha - 1.0 / eps
        assert (jp.a, jp.b, jp.beta) == (a, -a / eps, 1.0 / eps)
        assert jp.estimates_valid == (a > 0 and -a / eps >= 0)

    def u(t):
        return 1.5 * np.sin(3.0 * t) + 0.2 * t

    times = np.linspace(0.0, 2.0, 20001)
    for gamma, eps, t in ((0.3, 0.5, 2.0), (-0.1, 2.0, 1.3), (1.0, 0.1, 0.77)):
        got = josephson_source(gamma, eps, (times, u(times)), t)
        ref = oracles.memory_integral(gamma, eps, lambda s: float(u(s)), t)
        assert abs(got - ref) <= 1e-8
