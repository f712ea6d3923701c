"""Image sums theta_i of the kernels and the Green kernels built from them.

``theta_i(x, t) = sum_n K_i(x + 2 n L, t)`` is 2L-periodic and even in x.
The sum is truncated symmetrically at |n| <= N with N picked from the
Gaussian envelope |K_i(z, t)| <= C exp(-z^2 / 4 eps t), so the discarded
terms are bounded without being evaluated.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import quadrature as quad
from .errors import DomainError, TruncationError
from .kernels import KernelRule, _envelope_coeff, _require_real_kernel

MIN_T = 1e-8
MAX_IMAGES = 10_000
NEUMANN = "Neumann_sum"
DIRICHLET = "Dirichlet_difference"


@dataclass(frozen=True)
class ThetaEval:
    x: float
    t: float
    i: int
    derivative: bool
    value: float
    terms_used: int
    tail_bound: float
    quad_abs_error: float = 0.0


@dataclass(frozen=True)
class GreenEval:
    x: float
    xi: float
    t: float
    i: int
    kind: str
    value: float


def _reduce(x, L):
    """Representative of x modulo 2L in [-L, L)."""
    return np.mod(np.asarray(x, dtype=float) + L, 2.0 * L) - L


def image_count(p, i, t, tol, derivative=False):
    """Smallest N whose envelope tail bound is <= tol, and that bound."""
    c = _envelope_coeff(p, i, t)
    four_et = 4.0 * p.eps * t
    for n in range(0, MAX_IMAGES + 1):
        # first discarded images sit at distance >= (2n + 1) L from the origin
        d = (2 * n + 1) * p.L
        lead = math.exp(-d * d / four_et)
        if derivative:
            if d * d < 6.0 * p.eps * t:
                continue
            lead *= d / (2.0 * p.eps * t)
        ratio = math.exp(-8.0 * (n + 1) * p.L * p.L / four_et)
        if ratio < 1.0:
            tail = 2.0 * c * lead / (1.0 - ratio)
            if tail <= tol:
                return n, tail
    raise TruncationError(f"theta series needs more than {MAX_IMAGES} images at t={t}")


def theta_values(p, i, x, t, tol=1e-10, derivative=False):
    """Vectorised theta_i(x, t); returns (values, quad_error, N, tail)."""
    _require_real_kernel(p)
    if not t >= MIN_T:
        raise DomainError(f"theta is evaluated for t >= {MIN_T} only, got {t}")
    if derivative and i != 0:
        raise DomainError("only the x-derivative of theta_0 is provided")
    xr = _reduce(x, p.L)
    if derivative and np.any(xr == 0):
        raise DomainError("d theta_0/dx is discontinuous at multiples of 2L")
    n_img, tail = image_count(p, i, t, 0.5 * tol, derivative)
    shifts = 2.0 * p.L * np.arange(-n_img, n_img + 1)
    pts = xr[..., None] + shifts

    def estimate(level):
        rule = KernelRule(p, i, t, panels=2 ** level)
        return rule(pts, derivative=derivative).sum(axis=-1)

    value, err = quad.adaptive(estimate, 0.5 * tol, start=0, max_level=8)
    return value, err, n_img, tail


def theta(params, i, x, t, derivative=False, tol=1e-10):
    """Truncated image sum of K_i (or of dK_0/dx) at one point."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    v, err, n, tail = theta_values(params, i, np.array([x]), t, tol, derivative)
    return ThetaEval(float(x), float(t), int(i), bool(derivative), float(v[0]),
                     2 * n + 1, float(tail), float(err))


def green(params, i, kind, x, xi, t, tol=1e-10):
    """Neumann (sum) or Dirichlet (difference) combination of theta_i."""
    L = params.L
    for name, v in (("x", x), ("xi", xi)):
        if not 0.0 <= v <= L:
            raise DomainError(f"{name}={v} outside [0, L]")
    if kind not in (NEUMANN, DIRICHLET):
        raise DomainError(f"unknown Green kernel kind {kind!r}")
    vals, _, _, _ = theta_values(params, i, np.array([abs(x - xi), x + xi]), t, tol)
    near, far = float(vals[0]), float(vals[1])
    value = near + far if kind == NEUMANN else far - near
    return GreenEval(float(x), float(xi), float(t), int(i), kind, value)
