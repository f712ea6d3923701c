import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fhngreen import DomainError, FhnParams, green, k0, theta
from fhngreen.theta import DIRICHLET, NEUMANN, image_count, theta_values

P = FhnParams(eps=1.0, a=1.0, b=1.0, beta=1.0, L=1.0)


def test_long_strip_reduces_to_single_kernel():
    p = FhnParams(L=20.0)
    assert abs(theta(p, 0, 1.0, 0.5).value - k0(p, 1.0, 0.5).value) <= 1e-12


def test_matches_brute_force_image_sum():
    from fhngreen.kernels import kernel_values

    pts = 0.3 + 2.0 * np.arange(-50, 51)
    brute = kernel_values(P, 0, pts, 0.5, panels=16).sum()
    assert abs(theta(P, 0, 0.3, 0.5).value - brute) <= 1e-12


@given(st.floats(-3.0, 3.0), st.sampled_from([0, 1, 2]), st.floats(0.05, 3.0))
@settings(max_examples=60, deadline=None)
def test_periodic_and_even(x, i, t):
    base = theta(P, i, x, t).value
    assert abs(theta(P, i, x + 2.0, t).value - base) <= 1e-12
    assert abs(theta(P, i, -x, t).value - base) <= 1e-12


def test_truncation_reported():
    ev = theta(P, 1, 0.4, 2.0, tol=1e-12)
    assert ev.terms_used >= 1 and ev.tail_bound <= 1e-12
    n_small, _ = image_count(P, 0, 0.01, 1e-12)
    n_big, _ = image_count(P, 0, 5.0, 1e-12)
    assert n_small <= n_big


def test_neumann_green_conserves_damped_mass():
    # b = 0: int_0^L G0 dxi = exp(-a t) for every x
    p = FhnParams(eps=0.5, a=0.7, b=0.0, beta=1.0, L=1.0)
    xi, w = np.polynomial.legendre.leggauss(80)
    xi, w = 0.5 * (xi + 1), 0.5 * w
    for x in (0.0, 0.3, 1.0):
        s = theta_values(p, 0, np.abs(x - xi), 0.7)[0] + theta_values(p, 0, x + xi, 0.7)[0]
        assert abs(s @ w - math.exp(-0.7 * 0.7)) <= 1e-12


def test_green_kernels_symmetry_and_boundary_values():
    for x, xi in ((0.2, 0.7), (0.5, 0.5)):
        for kind in (NEUMANN, DIRICHLET):
            assert abs(green(P, 0, kind, x, xi, 0.3).value
                       - green(P, 0, kind, xi, x, 0.3).value) <= 1e-14
    assert green(P, 0, DIRICHLET, 0.0, 0.4, 0.5).value == 0.0
    assert abs(green(P, 1, DIRICHLET, 1.0, 0.4, 0.5).value) <= 1e-14
    assert green(P, 0, NEUMANN, 0.4, 0.4, 0.5).value > 0


def test_theta_derivative_matches_difference():
    x, t = 0.3, 0.5
    d = theta(P, 0, x, t, derivative=True).value
    fd = (theta(P, 0, x + 1e-5, t).value - theta(P, 0, x - 1e-5, t).value) / 2e-5
    assert abs(d - fd) <= 1e-6


def test_theta_errors():
    with pytest.raises(DomainError):
        theta(P, 0, 0.1, 1e-9)
    with pytest.raises(DomainError):
        theta(P, 1, 0.1, 1.0, derivative=True)
    with pytest.raises(DomainError):
        theta(P, 0, 2.0, 1.0, derivative=True)
    with pytest.raises(DomainError):
        green(P, 0, NEUMANN, 1.5, 0.2, 1.0)
    with pytest.raises(DomainError):
        green(P, 0, "Robin", 0.5, 0.2, 1.0)
