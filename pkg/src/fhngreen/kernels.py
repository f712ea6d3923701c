"""Fundamental solution K0, iterated kernels K1, K2 and their bounds.

All three kernels share one structure: a time superposition of the heat
kernel ``Gamma(x, y) = exp(-x^2 / 4 eps y) / (2 sqrt(pi eps y))``

    K_i(x, t) = delta_i(t) Gamma(x, t) + int_0^t m_i(y, t - y) Gamma(x, y) dy,

with ``delta_0 = exp(-a t)``, ``delta_1 = delta_2 = 0`` and, writing
``z = 2 sqrt(b y s)`` and ``j1c(z) = 2 J1(z) / z``,

    m_0 = -b y exp(-a y - beta s) j1c(z)
    m_1 =      exp(-a y - beta s) J0(z)
    m_2 =  s   exp(-a y - beta s) j1c(z).

For i = 0 this is the closed form of the fundamental solution of
``u_t - eps u_xx + a u + b int_0^t exp(-beta (t - tau)) u dtau``; for i = 1, 2
it is the same kernel convolved once or twice with ``exp(-beta t)``. The
weights ``m_i`` are regular at both ends of [0, t], so the only endpoint
singularity left is the ``1/sqrt(y)`` of Gamma, removed by y = t sin^2(theta).
"""

from dataclasses import dataclass, replace
import math

import numpy as np
from scipy.special import erfc

from . import quadrature as quad
from .certificate import BoundCertificate, digest
from .errors import DomainError, RegimeError
from .special import j0, j1_over_z

_WHICH = ("K0", "K0_x", "K1", "K2")


@dataclass(frozen=True)
class FhnParams:
    """Constants of the operator and of the strip [0, L] x (0, T]."""

    eps: float = 1.0
    a: float = 1.0
    b: float = 1.0
    beta: float = 1.0
    L: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        for name in ("eps", "a", "b", "beta", "L", "T"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        for name in ("eps", "L", "T"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def estimates_valid(self):
        """True in the regime a > 0, b >= 0, beta > 0 where the bounds are proved."""
        return self.a > 0 and self.b >= 0 and self.beta > 0

    def replace(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {k: getattr(self, k) for k in ("eps", "a", "b", "beta", "L", "T")}


@dataclass(frozen=True)
class KernelEval:
    x: float
    t: float
    which: str
    value: float
    quad_abs_error: float


@dataclass(frozen=True)
class AuxQuantities:
    E_t: float
    omega: float
    beta0: float
    beta1: float


# ---------------------------------------------------------------- internals

def heat(x, y, eps):
    """Heat kernel with diffusivity eps; y > 0."""
    return np.exp(-x * x / (4.0 * eps * y)) / (2.0 * np.sqrt(math.pi * eps * y))


def heat_x(x, y, eps):
    return -x / (2.0 * eps * y) * heat(x, y, eps)


def density(p, i, y, s):
    """Superposition weight m_i(y, s) with s = t - y (arrays broadcast)."""
    y = np.asarray(y, dtype=float)
    s = np.asarray(s, dtype=float)
    z = 2.0 * np.sqrt(p.b * y * s)
    base = np.exp(-p.a * y - p.beta * s)
    if i == 0:
        return -p.b * y * base * j1_over_z(z)
    if i == 1:
        return base * j0(z)
    if i == 2:
        return s * base * j1_over_z(z)
    raise DomainError(f"kernel index must be 0, 1 or 2, got {i}")


def _require_real_kernel(p):
    if p.b < 0:
        raise DomainError(
            "kernels are not evaluated for b < 0; use the finite-difference oracle")


class KernelRule:
    """Quadrature rule for K_i at one time t, reusable across many x.

    Building the rule evaluates the Bessel-dependent weights once; each call
    then costs one matrix-vector product.
    """

    def __init__(self, p, i, t, panels=4, n=12):
        self.p, self.i, self.t = p, i, t
        y, w, _, sc = quad.sin2_rule(t, panels, n)
        self.y = y
        self.wd = density(p, i, y, sc * sc) * w
        self.direct = math.exp(-p.a * t) if i == 0 else 0.0

    def __call__(self, x, derivative=False):
        x = np.asarray(x, dtype=float)
        eps, y = self.p.eps, self.y
        g = heat(x[..., None], y, eps)
        if derivative:
            g = g * (-x[..., None] / (2.0 * eps * y))
        val = g @ self.wd
        if self.direct:
            d = heat(x, self.t, eps) * self.direct
            if derivative:
                d = d * (-x / (2.0 * eps * self.t))
            val = val + d
        return val


def kernel_values(p, i, x, t, panels=4, n=12, derivative=False):
    """K_i (or dK_0/dx) at an array of x for one time t > 0."""
    return KernelRule(p, i, t, panels, n)(x, derivative=derivative)


def _adaptive_kernel(p, i, x, t, tol, derivative=False):
    value, err = quad.adaptive(
        lambda lev: kernel_values(p, i, np.array([x]), t, panels=2 ** lev,
                                  derivative=derivative),
        tol, start=0, max_level=10)
    return float(value[0]), err


def _check_common(p, t, tol):
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if not tol >= 1e-12:
        raise DomainError(f"tol must be at least 1e-12, got {tol}")
    _require_real_kernel(p)


# ---------------------------------------------------------------- operations

def k0(params, x, t, tol=1e-10):
    """Fundamental solution K0(x, t)."""
    _check_common(params, t, tol)
    value, err = _adaptive_kernel(params, 0, x, t, tol)
    return KernelEval(float(x), float(t), "K0", value, err)


def k0_x(params, x, t, tol=1e-10):
    """dK0/dx, differentiated under the integral sign. Undefined at x = 0."""
    _check_common(params, t, tol)
    if x == 0:
        raise DomainError("K0_x has a jump at x = 0; evaluate at x != 0")
    value, err = _adaptive_kernel(params, 0, x, t, tol, derivative=True)
    return KernelEval(float(x), float(t), "K0_x", value, err)


def k_i(params, i, x, t, tol=1e-10):
    """Iterated kernel K1 or K2."""
    _check_common(params, t, tol)
    if i not in (1, 2):
        raise DomainError(f"i must be 1 or 2, got {i}")
    if i == 2 and params.b <= 0:
        raise DomainError("K2 requires b > 0")
    value, err = _adaptive_kernel(params, i, x, t, tol)
    return KernelEval(float(x), float(t), f"K{i}", value, err)


def decay_e(a, beta, t):
    """(exp(-beta t) - exp(-a t)) / (a - beta), with the a = beta limit."""
    if abs(a - beta) < 1e-10:
        return t * math.exp(-a * t)
    return math.exp(-a * t) * math.expm1((a - beta) * t) / (a - beta)


def aux_quantities(params, t):
    """E(t), omega = min(a, beta), beta0 and beta1."""
    if not params.estimates_valid:
        raise RegimeError(
            f"bounds need a > 0, b >= 0, beta > 0 (got a={params.a}, "
            f"b={params.b}, beta={params.beta})")
    a, b, be = params.a, params.b, params.beta
    beta0 = 1.0 / a + math.pi * math.sqrt(b) * (a + be) / (2.0 * (a * be) ** 1.5)
    return AuxQuantities(decay_e(a, be, t), min(a, be), beta0, 1.0 / (a * be))


def laplace_check_k0(params, r, s, tol=1e-6):
    """|numerical Laplace transform of K0 at r minus exp(-r sigma)/(2 sqrt(eps) sigma)|.

    ``r`` is the scaled distance |x| / sqrt(eps). The transform is computed
    by brute-force quadrature in t up to a horizon where an envelope bound
    on the tail falls below tol / 100; that bound is added to the result.
    """
    _require_real_kernel(params)
    if not r > 0:
        raise DomainError("r must be positive")
    if not s > max(-params.a, -params.beta):
        raise DomainError(
            f"s={s} outside the convergence region s > max(-a, -beta)")
    p = params
    x = r * math.sqrt(p.eps)
    sig = math.sqrt(s + p.a + p.b / (s + p.beta))
    target = math.exp(-r * sig) / (2.0 * math.sqrt(p.eps) * sig)

    rate = s + min(p.a, p.beta)
    # exp(-r^2/4t - rate t) <= exp(-r sqrt(rate/2)) exp(-rate t / 2)
    gauss = math.exp(-r * math.sqrt(rate / 2.0))
    half = rate / 2.0

    def tail(T):
        # envelope |K0| <= (exp(-a t) + b t E(t)) / (2 sqrt(pi eps t)), E(t) <= t exp(-omega t)
        c = (1.0 + p.b * T * T + 2 * p.b * T / half + 2 * p.b / half ** 2)
        return gauss * c * math.exp(-half * T) / (half * 2.0 * math.sqrt(math.pi * p.eps * T))

    horizon = 1.0
    while tail(horizon) > tol * 1e-2:
        horizon *= 1.5

    def estimate(level):
        u, wu = quad.graded(24, 6 + 2 * level)
        ts = horizon * u
        vals = np.array([kernel_values(p, 0, np.array([x]), t, panels=2 ** level)[0]
                         for t in ts])
        return horizon * np.sum(wu * np.exp(-s * ts) * vals)

    value, err = quad.adaptive(estimate, tol * 1e-1, start=1, max_level=7)
    return abs(float(value) - target) + tail(horizon)


# ------------------------------------------------------------ L1 norms

def _envelope_coeff(p, i, t):
    """C with |K_i(x, t)| <= C exp(-x^2 / 4 eps t) for all x."""
    y, w, _, sc = quad.sin2_rule(t, 8, 12)
    c = np.sum(w * np.abs(density(p, i, y, sc * sc)) / (2 * np.sqrt(math.pi * p.eps * y)))
    if i == 0:
        c += math.exp(-p.a * t) / (2 * math.sqrt(math.pi * p.eps * t))
    return float(c)


def _inner_panels(p, i, t, tol):
    """Smallest y-panel count giving stable K_i values across the x-range."""
    probe = math.sqrt(4.0 * p.eps * t) * np.array([0.0, 0.5, 1.0, 2.0, 4.0])
    panels = 1
    prev = kernel_values(p, i, probe, t, panels=panels)
    while panels < 64:
        cur = kernel_values(p, i, probe, t, panels=2 * panels)
        if np.max(np.abs(cur - prev)) <= tol:
            return 2 * panels
        panels *= 2
        prev = cur
    return panels


def _sign_breaks(f, xmax, samples=400):
    """Roots of f on (0, xmax), located by sign changes and Brent refinement."""
    from scipy.optimize import brentq

    xs = np.linspace(0.0, xmax, samples + 1)
    fx = f(xs)
    roots = []
    for k in np.nonzero(np.sign(fx[:-1]) * np.sign(fx[1:]) < 0)[0]:
        roots.append(brentq(lambda z: float(f(np.array([z]))[0]), xs[k], xs[k + 1],
                            xtol=1e-14 * max(1.0, xmax)))
    return roots


def l1_norm_x(p, i, t, tol=1e-9, level=None):
    """int_R |K_i(x, t)| dx and its error estimate.

    By evenness this is twice the half-line integral, truncated where the
    Gaussian envelope drops below exp(-42); the analytic tail bound is added
    to the returned error. Panels are split at the sign changes of K_i so
    the integrand is smooth on each.
    """
    xmax = math.sqrt(4.0 * p.eps * t * 42.0)
    f = KernelRule(p, i, t, panels=_inner_panels(p, i, t, tol * 1e-2))

    edges = np.array([0.0] + _sign_breaks(f, xmax) + [xmax])

    def estimate(lev):
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            xs, wx = quad.composite(lo, hi, 2 ** lev, 10)
            total += np.sum(wx * np.abs(f(xs)))
        return 2.0 * total

    tail = 2.0 * _envelope_coeff(p, i, t) * math.sqrt(math.pi * p.eps * t) * erfc(math.sqrt(42.0))
    if level is not None:
        lo, hi = estimate(level), estimate(level + 1)
        return float(hi), abs(hi - lo) + tail
    value, err = quad.adaptive(estimate, tol, start=1, max_level=9)
    return float(value), err + tail


def l1_norm_xt(p, i, t, tol=1e-8):
    """int_0^t int_R |K_i(x, tau)| dx dtau and its error estimate."""
    cache = {}

    def inner(tau):
        if tau not in cache:
            cache[tau] = l1_norm_x(p, i, tau, tol=tol * 1e-2, level=2)
        return cache[tau]

    def estimate(lev):
        # sqrt grading at tau = 0 where the x-support collapses
        u, wu = quad.composite(0.0, 1.0, 2 ** lev, 8)
        vals = np.array([inner(t * uu * uu)[0] for uu in u])
        return np.sum(wu * 2.0 * t * u * vals)

    value, err = quad.adaptive(estimate, tol, start=0, max_level=6)
    return float(value), err + t * max(e for _, e in cache.values())


def _k2_rhs(p, t):
    """int_0^t exp(-a y - beta (t - y)) (t - y) dy by Gauss-Legendre (polynomial x exp)."""
    y, w = quad.composite(0.0, t, 4, 20)
    return float(np.sum(w * np.exp(-p.a * y - p.beta * (t - y)) * (t - y)))


def certify_kernel_bounds(params, ts=(0.1, 0.5, 1.0, 2.0, 5.0), xs=None, tol=1e-9):
    """Check the pointwise and L1 kernel bounds on a grid of times.

    Returns one BoundCertificate per bound id. ``xs`` are the positions used
    for the pointwise bound (default: 41 points on [-3 sqrt(eps T), ...]).
    """
    p = params
    _require_real_kernel(p)
    aux = {t: aux_quantities(p, t) for t in ts}
    if xs is None:
        span = 3.0 * math.sqrt(p.eps * max(ts))
        xs = np.linspace(-span, span, 41)
    xs = np.asarray(xs, dtype=float)
    dig = digest("kernel_bounds", p.as_dict(), list(ts), xs.tolist())
    certs = []

    lhs, rhs, slack = [], [], 0.0
    for t in ts:
        vals, err = quad.adaptive(
            lambda lev: kernel_values(p, 0, xs, t, panels=2 ** lev), tol, start=0)
        lhs.append(np.abs(vals))
        rhs.append(np.exp(-xs ** 2 / (4 * p.eps * t)) / (2 * math.sqrt(math.pi * p.eps * t))
                   * (math.exp(-p.a * t) + p.b * t * aux[t].E_t))
        slack = max(slack, err)
    certs.append(BoundCertificate.from_arrays(
        "K0_pointwise", np.concatenate(lhs), np.concatenate(rhs), slack, dig))

    sb = math.sqrt(p.b)
    specs = [
        ("K0_L1x", 0, lambda t: math.exp(-p.a * t) + sb * math.pi * t * math.exp(-aux[t].omega * t)),
        ("K1_L1x", 1, lambda t: aux[t].E_t),
        ("K2_L1x", 2, lambda t: _k2_rhs(p, t)),
    ]
    for bound_id, i, bound in specs:
        lhs, rhs, slack = [], [], 0.0
        for t in ts:
            v, e = l1_norm_x(p, i, t, tol=tol)
            lhs.append(v)
            rhs.append(bound(t))
            slack = max(slack, e)
        notes = {}
        if bound_id == "K2_L1x":
            notes["rhs_le_tE"] = all(r <= t * aux[t].E_t * (1 + 1e-12) + 1e-300
                                     for r, t in zip(rhs, ts))
        certs.append(BoundCertificate.from_arrays(bound_id, lhs, rhs, slack, dig, **notes))

    for bound_id, i, bound in (("K0_L1xt", 0, lambda t: aux[t].beta0),
                               ("K1_L1xt", 1, lambda t: aux[t].beta1)):
        lhs, rhs, slack = [], [], 0.0
        for t in ts:
            v, e = l1_norm_xt(p, i, t, tol=max(tol * 1e4, 1e-6))
            lhs.append(v)
            rhs.append(bound(t))
            slack = max(slack, e)
        certs.append(BoundCertificate.from_arrays(bound_id, lhs, rhs, slack, dig))
    return certs
