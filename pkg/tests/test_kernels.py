import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fhngreen import (DomainError, FhnParams, RegimeError, aux_quantities, certify_kernel_bounds,
                      decay_e, k0, k0_x, k_i, l1_norm_x, laplace_check_k0)

import oracles

UNIT = FhnParams(eps=1.0, a=1.0, b=1.0, beta=1.0)
HEAT = FhnParams(eps=1.0, a=1.0, b=0.0, beta=1.0)


def test_k0_without_coupling_is_damped_heat_kernel():
    assert abs(k0(HEAT, 0.0, 1.0).value - math.exp(-1) / (2 * math.sqrt(math.pi))) <= 1e-14
    for x, t in ((0.3, 0.2), (2.0, 3.0)):
        ref = oracles.heat_kernel(x, t, 1.0) * math.exp(-t)
        assert abs(k0(HEAT, x, t).value - ref) <= 1e-14


def test_k0_matches_simpson_oracle():
    assert abs(k0(UNIT, 1.0, 1.0).value - oracles.simpson_k0(UNIT, 1.0, 1.0)) <= 1e-8
    p = FhnParams(eps=0.4, a=0.3, b=1.7, beta=0.6)
    for x, t in ((0.0, 0.7), (0.5, 2.0), (-1.2, 4.0)):
        assert abs(k0(p, x, t).value - oracles.simpson_k0(p, x, t)) <= 1e-8


@given(st.floats(0.1, 3.0), st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(0.1, 3.0),
       st.floats(0.0, 4.0), st.floats(0.05, 5.0))
@settings(max_examples=100, deadline=None)
def test_k0_even_in_x(eps, a, b, beta, x, t):
    p = FhnParams(eps=eps, a=a, b=b, beta=beta)
    assert k0(p, x, t).value == k0(p, -x, t).value


def test_k0_x_odd_and_closed_form():
    for x in (0.2, 1.0, 2.5):
        assert k0_x(UNIT, x, 1.0).value + k0_x(UNIT, -x, 1.0).value == 0.0
    # b = 0: dK0/dx = -x / (2 eps t) K0
    assert abs(k0_x(HEAT, 1.0, 1.0).value + 0.5 * k0(HEAT, 1.0, 1.0).value) <= 1e-14
    assert abs(k0_x(HEAT, 1.0, 1.0).value + 0.0404) <= 1e-4


def test_k0_x_matches_finite_difference():
    p = FhnParams(eps=0.6, a=0.4, b=1.3, beta=0.8)
    for x, t in ((0.3, 0.5), (1.0, 1.0), (-0.8, 2.5)):
        fd = (k0(p, x + 1e-5, t).value - k0(p, x - 1e-5, t).value) / 2e-5
        assert abs(k0_x(p, x, t).value - fd) <= 1e-6


def test_k1_without_coupling_is_time_integral_of_heat():
    p = FhnParams(eps=0.7, a=0.5, b=0.0, beta=1.3)
    x, t = 0.4, 1.2
    ref, _ = integrate.quad(lambda y: math.exp(-p.beta * (t - y) - p.a * y)
                            * oracles.heat_kernel(x, y, p.eps), 0.0, t, epsabs=1e-14)
    assert abs(k_i(p, 1, x, t).value - ref) <= 1e-10


@pytest.mark.parametrize("i", [1, 2])
def test_iterated_kernels_are_convolutions_at_unit_params(i):
    ref = oracles.convolve_previous(
        UNIT, i, 0.5, 1.0,
        lambda p, j, x, t: k0(p, x, t).value if j == 0 else k_i(p, j, x, t).value, nodes=96)
    assert abs(k_i(UNIT, i, 0.5, 1.0).value - ref) <= 1e-6


def test_kernel_errors():
    with pytest.raises(DomainError):
        k0(UNIT, 0.1, 0.0)
    with pytest.raises(DomainError):
        k0(UNIT, 0.1, -1.0)
    with pytest.raises(DomainError):
        k0_x(UNIT, 0.0, 1.0)
    with pytest.raises(DomainError):
        k_i(HEAT, 2, 0.1, 1.0)
    with pytest.raises(DomainError):
        k_i(UNIT, 3, 0.1, 1.0)
    with pytest.raises(DomainError):
        k0(UNIT, 0.1, 1.0, tol=1e-14)
    with pytest.raises(DomainError):
        k0(FhnParams(b=-0.5), 0.1, 1.0)


def test_quadrature_error_reported_below_tol():
    ev = k0(UNIT, 0.3, 0.8, tol=1e-10)
    assert ev.which == "K0" and 0.0 <= ev.quad_abs_error <= 1e-10


def test_params_validation():
    for bad in ({"eps": 0.0}, {"L": -1.0}, {"T": 0.0}, {"a": math.nan}):
        with pytest.raises(DomainError):
            FhnParams(**bad)
    assert FhnParams(a=0.5, b=0.0, beta=0.1).estimates_valid
    assert not FhnParams(a=-0.5).estimates_valid
    assert not FhnParams(beta=0.0).estimates_valid


def test_aux_quantities_examples():
    aux = aux_quantities(FhnParams(a=2.0, b=1.0, beta=1.0), 1.0)
    assert abs(aux.E_t - (math.exp(-1) - math.exp(-2))) <= 1e-15
    assert abs(aux_quantities(UNIT, 2.0).E_t - 2 * math.exp(-2)) <= 1e-15
    aux = aux_quantities(UNIT, 1.0)
    assert abs(aux.beta0 - (1 + math.pi)) <= 1e-14 and aux.beta1 == 1.0 and aux.omega == 1.0
    with pytest.raises(RegimeError):
        aux_quantities(FhnParams(a=-1.0), 1.0)


@given(st.floats(0.01, 5.0), st.floats(0.01, 5.0), st.floats(1e-3, 20.0))
@settings(max_examples=200, deadline=None)
def test_decay_e_positive_and_continuous(a, beta, t):
    e = decay_e(a, beta, t)
    assert e > 0
    assert abs(decay_e(a, a + 1e-11, t) - decay_e(a, a, t)) <= 1e-9 * max(1.0, t)


def test_laplace_identity_examples():
    assert laplace_check_k0(HEAT, 1.3, 0.7, tol=1e-8) <= 1e-8
    assert laplace_check_k0(UNIT, 1.0, 1.0) <= 1e-6
    assert laplace_check_k0(UNIT, 30.0, 1.0, tol=1e-12) <= 1e-12
    with pytest.raises(DomainError):
        laplace_check_k0(UNIT, 1.0, -1.5)


def test_l1_norm_without_coupling_is_exp_decay():
    for t in (0.1, 1.0, 3.0):
        v, err = l1_norm_x(HEAT, 0, t)
        assert abs(v - math.exp(-t)) <= max(err, 1e-9)


@pytest.mark.slow
def test_kernel_certificates_at_unit_params():
    certs = certify_kernel_bounds(UNIT)
    ids = [c.bound_id for c in certs]
    assert ids == ["K0_pointwise", "K0_L1x", "K1_L1x", "K2_L1x", "K0_L1xt", "K1_L1xt"]
    assert all(c.passed for c in certs)
    assert certs[3].notes["rhs_le_tE"]


def test_kernel_certificates_without_coupling_are_tight():
    certs = {c.bound_id: c for c in certify_kernel_bounds(HEAT, ts=(0.5, 1.0))}
    assert certs["K0_L1x"].passed
    assert abs(certs["K0_L1x"].margin) <= 1e-8


def test_kernel_certificates_need_valid_regime():
    with pytest.raises(RegimeError):
        certify_kernel_bounds(FhnParams(a=-1.0))
