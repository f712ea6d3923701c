"""Bessel functions of the first kind, orders 0 and 1, for real arguments.

Two branches:

* ``|z| <= SEAM``: the power series, summed in extended precision
  (``numpy.longdouble``) so that cancellation between the alternating
  terms stays far below double rounding on the working range.
* ``|z| > SEAM``: the Hankel large-argument expansion, truncated before
  its smallest term.

The vectorised helpers (``j0``, ``j1``, ``j1_over_z``) are what the kernel
code calls in its inner loops; ``bessel_j0`` / ``bessel_j1`` are the scalar
entry points that also report an error estimate.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError

SEAM = 13.0
_SERIES_TERMS = 48
_ASYMPTOTIC_TERMS = 24
_LD_EPS = float(np.finfo(np.longdouble).eps)
_D_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class BesselResult:
    value: float
    est_abs_error: float


def _series(order, z):
    """Return (value, sum of |terms|) of the order-0/1 power series."""
    h = np.asarray(z, dtype=np.longdouble) / 2
    hh = h * h
    term = np.ones_like(h) if order == 0 else h.copy()
    total = term.copy()
    absum = np.abs(term)
    # stop once the largest remaining term is below 1e-24
    hmax2 = float(np.max(hh)) if h.size else 0.0
    bound, nterms = 1.0, _SERIES_TERMS
    for k in range(1, _SERIES_TERMS):
        bound *= hmax2 / (k * (k + order))
        if bound < 1e-24 and k > 2:
            nterms = k + 1
            break
    for k in range(1, nterms):
        term = -term * hh / (k * (k + order))
        total += term
        absum += np.abs(term)
    return total.astype(float), absum.astype(float), np.abs(term).astype(float)


def _hankel(order, z):
    """Large-argument expansion for z > 0; returns (value, tail estimate)."""
    z = np.asarray(z, dtype=float)
    mu = 4.0 * order * order
    p = np.zeros_like(z)
    q = np.zeros_like(z)
    term = np.ones_like(z)
    for k in range(_ASYMPTOTIC_TERMS):
        if k > 0:
            term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * term
        else:
            q += sign * term
    nxt = np.abs(term * (mu - (2 * _ASYMPTOTIC_TERMS - 1) ** 2)
                 / (_ASYMPTOTIC_TERMS * 8.0 * z))
    chi = z - (0.5 * order + 0.25) * math.pi
    amp = np.sqrt(2.0 / (math.pi * z))
    return amp * (p * np.cos(chi) - q * np.sin(chi)), amp * nxt


def _evaluate(order, z):
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError("Bessel argument must be finite")
    az = np.abs(z)
    value = np.empty_like(az)
    err = np.empty_like(az)
    small = az <= SEAM
    if np.any(small):
        v, absum, last = _series(order, az[small])
        value[small] = v
        err[small] = 8 * _LD_EPS * absum + last + _D_EPS * np.abs(v)
    big = ~small
    if np.any(big):
        v, tail = _hankel(order, az[big])
        value[big] = v
        err[big] = tail + 4 * _D_EPS
    if order == 1:
        value = np.where(z < 0, -value, value)
    return value, err


def j0(z):
    """Vectorised J0."""
    return _evaluate(0, z)[0]


def j1(z):
    """Vectorised J1 (odd in z)."""
    return _evaluate(1, z)[0]


def j1_over_z(z):
    """Vectorised ``2 J1(z) / z``, equal to 1 at z = 0.

    This is the combination that keeps the kernel weights regular when the
    Bessel argument vanishes.
    """
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    nz = z != 0
    out[nz] = 2.0 * j1(z[nz]) / z[nz]
    return out


def bessel_j0(z):
    """J0 at a single real point, with an estimate of the absolute error."""
    v, e = _evaluate(0, np.array([z], dtype=float))
    return BesselResult(float(v[0]), float(e[0]))


def bessel_j1(z):
    """J1 at a single real point, with an estimate of the absolute error."""
    v, e = _evaluate(1, np.array([z], dtype=float))
    return BesselResult(float(v[0]), float(e[0]))
