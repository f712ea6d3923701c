import numpy as np
import pytest
from scipy.linalg import expm

from fhngreen import (BoundaryData, DomainError, Field, FhnParams, Grid, InitialData,
                      Propagator, RegimeError, mckean_linear_scenario, solve_linear_dirichlet,
                      solve_linear_neumann)
from fhngreen.linear import sample_profile, sample_source

P = FhnParams(eps=1.0, a=1.0, b=1.0, beta=1.0, L=1.0, T=1.0)
G = Grid(32, 40)


# ------------------------------------------------------------------ Field

def test_field_validation():
    x, t = np.linspace(0, 1, 3), np.linspace(0, 1, 2)
    Field(x, t, np.zeros((2, 3)))
    with pytest.raises(DomainError):
        Field(x, t, np.zeros((3, 2)))
    with pytest.raises(DomainError):
        Field(x[::-1], t, np.zeros((2, 3)))
    with pytest.raises(DomainError):
        Field(x, t - 1.0, np.zeros((2, 3)))
    bad = np.zeros((2, 3))
    bad[1, 2] = np.nan
    with pytest.raises(DomainError, match="x=1.0, t=1.0"):
        Field(x, t, bad)


def test_field_restrict_and_at_time():
    x, t = np.linspace(0, 1, 5), np.linspace(0, 2, 3)
    f = Field(x, t, np.arange(15.0).reshape(3, 5))
    sub = f.restrict(xs=[0.25, 1.0], ts=[1.0])
    assert sub.values.tolist() == [[6.0, 9.0]]
    assert f.at_time(2.0).tolist() == [10.0, 11.0, 12.0, 13.0, 14.0]
    assert f.sup() == 14.0
    with pytest.raises(DomainError):
        f.restrict(xs=[0.3])


def test_sampling_helpers():
    x = np.linspace(0, 1, 9)
    assert np.all(sample_profile(2.5, x, 1.0) == 2.5)
    samples = np.sin(np.linspace(0, 1, 41))
    assert np.max(np.abs(sample_profile(samples, x, 1.0) - np.sin(x))) <= 1e-7
    assert sample_profile(np.sin(x), x, 1.0) is not None
    t = np.linspace(0, 1, 4)
    assert sample_source(None, x, t).shape == (4, 9)
    assert sample_source(lambda xx, tt: xx * tt, x, t)[2, 8] == pytest.approx(2 / 3)
    with pytest.raises(DomainError):
        sample_source(np.zeros((3, 9)), x, t)
    with pytest.raises(DomainError), np.errstate(invalid="ignore"):
        sample_profile(lambda xx: np.log(xx - 2.0), x, 1.0)


# ------------------------------------------------------------------ solvers

@pytest.mark.parametrize("kind", ["Neumann", "Dirichlet"])
def test_zero_data_gives_zero(kind):
    solve = solve_linear_neumann if kind == "Neumann" else solve_linear_dirichlet
    u = solve(P, InitialData(), BoundaryData(kind), None, G)
    assert u.sup() == 0.0
    assert u.meta["boundary_zero"] and u.meta["bc"] == kind


def test_uniform_data_decays_exponentially():
    p = P.replace(b=0.0, a=0.7)
    u = solve_linear_neumann(p, InitialData(0.4), BoundaryData(), None, G)
    exact = 0.4 * np.exp(-0.7 * u.grid_t)[:, None]
    assert np.max(np.abs(u.values - exact)) <= 1e-5


def test_superposition():
    bd1 = BoundaryData("Neumann", lambda t: np.sin(t), 0.3)
    bd2 = BoundaryData("Neumann", 0.1, lambda t: t * t)
    bd12 = BoundaryData("Neumann", lambda t: 2 * np.sin(t) + 0.1, lambda t: 0.6 + t * t)

    def u01(x):
        return np.cos(2 * x)

    def u02(x):
        return x ** 3

    def f1(x, t):
        return np.exp(-t) * x

    def f2(x, t):
        return 1.0 + 0 * x * t

    Pr = Propagator(P, G, "Neumann")
    a = solve_linear_neumann(P, InitialData(u01), bd1, f1, G, propagator=Pr)
    b = solve_linear_neumann(P, InitialData(u02), bd2, f2, G, propagator=Pr)
    ab = solve_linear_neumann(P, InitialData(lambda x: 2 * u01(x) + u02(x)), bd12,
                              lambda x, t: 2 * f1(x, t) + f2(x, t), G, propagator=Pr)
    tol = 2 * max(a.meta["quad_error_est"], b.meta["quad_error_est"], 1e-12)
    assert np.max(np.abs(ab.values - (2 * a.values + b.values))) <= tol


def test_neumann_flux_is_reproduced():
    g = Grid(128, 100)
    u = solve_linear_neumann(P, InitialData(), BoundaryData("Neumann", lambda t: 0.5 * np.sin(2 * t),
                                                           lambda t: 0.3 * t), None, g)
    h = u.grid_x[1]
    k = u.grid_t >= 0.2
    left = (-3 * u.values[k, 0] + 4 * u.values[k, 1] - u.values[k, 2]) / (2 * h)
    right = (3 * u.values[k, -1] - 4 * u.values[k, -2] + u.values[k, -3]) / (2 * h)
    assert np.max(np.abs(left - 0.5 * np.sin(2 * u.grid_t[k]))) <= 1e-3 + h
    assert np.max(np.abs(right - 0.3 * u.grid_t[k])) <= 1e-3 + h


def test_dirichlet_values_extrapolate_to_boundary_data():
    g = Grid(128, 100)
    u = solve_linear_dirichlet(P, InitialData(lambda x: 1 - 0.7 * x),
                               BoundaryData("Dirichlet", lambda t: 1 + 0 * t, 0.3), None, g)
    assert np.all(u.values[:, 0] == 1.0) and np.all(u.values[:, -1] == 0.3)
    k = u.grid_t >= 0.05
    assert np.max(np.abs(2 * u.values[k, 1] - u.values[k, 2] - 1.0)) <= 1e-3
    assert np.max(np.abs(2 * u.values[k, -2] - u.values[k, -3] - 0.3)) <= 1e-3


def test_solver_rejects_mismatched_inputs():
    with pytest.raises(DomainError):
        solve_linear_neumann(P, InitialData(), BoundaryData("Dirichlet"), None, G)
    with pytest.raises(DomainError):
        BoundaryData("Robin")
    Pr = Propagator(P, G, "Dirichlet")
    with pytest.raises(DomainError):
        solve_linear_neumann(P, InitialData(), BoundaryData(), None, G, propagator=Pr)
    with pytest.raises(DomainError):
        solve_linear_dirichlet(P.replace(a=2.0), InitialData(), BoundaryData("Dirichlet"), None,
                               G, propagator=Pr)


def test_off_grid_evaluation_reproduces_grid_values():
    Pr = Propagator(P, G, "Dirichlet")
    u0 = np.sin(np.pi * Pr.x) * 0.5
    f = sample_source(lambda x, t: x * (1 - x) * np.cos(t), Pr.x, Pr.t)
    u = solve_linear_dirichlet(P, InitialData(u0), BoundaryData("Dirichlet"), f, G, propagator=Pr)
    k = 17
    xs = Pr.x[3:-3:4]
    at = Pr.at(0, xs, k, data=u0, source=f)
    assert np.max(np.abs(at - u.values[k, 3:-3:4])) <= 1e-9
    with pytest.raises(DomainError):
        Pr.at(0, np.array([0.0]), k, data=u0)
    with pytest.raises(DomainError):
        Pr.at(0, xs, 0, data=u0)
    with pytest.raises(DomainError):
        Pr.at(0, xs, 3, data=u0, heat=Pr.heat_at(xs, 4))


# ------------------------------------------------------------- frozen step

def test_frozen_step_examples():
    p = FhnParams(eps=0.5, a=0.25, b=0.0, beta=1.0)
    zero = mckean_linear_scenario(p, InitialData(), BoundaryData(), 0, G)
    assert zero.sup() == 0.0 and zero.meta["eta_bar"] == 0
    one = mckean_linear_scenario(p, InitialData(), BoundaryData(), 1, G)
    exact = (1 - np.exp(-one.grid_t))[:, None]   # shifted coefficient a' = 1
    assert np.max(np.abs(one.values - exact)) <= 1e-10


def test_frozen_step_with_memory_matches_matrix_exponential():
    p = FhnParams(eps=0.5, a=0.25, b=0.8, beta=1.3)
    u = mckean_linear_scenario(p, InitialData(0.2, 0.1), BoundaryData(), 1, Grid(16, 80))
    # y = (u, v): y' = A y + (1, 0), A = [[-1, -1], [b, -beta]]
    A = np.array([[-1.0, -1.0], [p.b, -p.beta]])
    M = np.zeros((3, 3))
    M[:2, :2], M[0, 2] = A, 1.0
    ref = np.array([(expm(M * t) @ np.array([0.2, 0.1, 1.0]))[0] for t in u.grid_t])
    assert np.max(np.abs(u.values - ref[:, None])) <= 1e-6


def test_frozen_step_preconditions():
    with pytest.raises(RegimeError):
        mckean_linear_scenario(FhnParams(a=-0.5), InitialData(), BoundaryData(), 1, G)
    with pytest.raises(DomainError):
        mckean_linear_scenario(P, InitialData(), BoundaryData(), 2, G)
