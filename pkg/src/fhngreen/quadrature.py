"""Gauss-Legendre rules, graded panels and an adaptive doubling driver."""

from functools import lru_cache
import math

import numpy as np

from .errors import ToleranceError


@lru_cache(maxsize=64)
def gauss_legendre(n):
    """Nodes and weights of the n-point rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def composite(a, b, panels, n):
    """Composite n-point Gauss-Legendre rule on [a, b] with equal panels."""
    x, w = gauss_legendre(n)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    return nodes, weights


def graded(levels, n):
    """Rule on [0, 1] with panels [0, 2^-levels], ..., [1/4, 1/2], [1/2, 1].

    Resolves features of any size near the origin (Gaussian onsets of width
    down to about 2^-levels) at a cost linear in ``levels``.
    """
    x, w = gauss_legendre(n)
    edges = np.concatenate(([0.0], 2.0 ** -np.arange(levels, -1, -1)))
    h = np.diff(edges)
    nodes = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    return nodes, weights


def sin2_rule(t, panels, n, levels=24):
    """Nodes/weights for integrals over [0, t] after y = t sin^2(theta).

    The substitution turns the endpoint factors 1/sqrt(y) and 1/sqrt(t - y)
    into smooth functions of theta, so the returned weights already contain
    the Jacobian ``t sin(2 theta)``. Panels in theta are graded geometrically
    toward 0 (so Gaussian onsets exp(-x^2 / 4 eps y) with tiny x are
    resolved) and each graded panel is split into ``panels`` pieces. Also
    returned: sqrt(y) and sqrt(t - y) computed without cancellation.
    """
    x, w = gauss_legendre(n)
    edges = 0.5 * math.pi * np.concatenate(([0.0], 2.0 ** -np.arange(levels, -1, -1)))
    edges = np.concatenate([np.linspace(lo, hi, panels + 1)[:-1]
                            for lo, hi in zip(edges[:-1], edges[1:])] + [edges[-1:]])
    h = np.diff(edges)
    th = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    wt = (h[:, None] * w[None, :]).ravel()
    s, c = np.sin(th), np.cos(th)
    y = t * s * s
    wy = wt * t * 2.0 * s * c
    return y, wy, math.sqrt(t) * s, math.sqrt(t) * c


def adaptive(estimate, tol, start=1, max_level=12):
    """Double a resolution parameter until successive estimates agree.

    ``estimate(level)`` returns a float or array; the driver compares level
    k with level k+1 in the max norm. Returns ``(value, error)``; raises
    ToleranceError carrying the best value if ``max_level`` is reached.
    """
    prev = np.asarray(estimate(start), dtype=float)
    err = math.inf
    for level in range(start + 1, max_level + 1):
        cur = np.asarray(estimate(level), dtype=float)
        err = float(np.max(np.abs(cur - prev))) if cur.size else 0.0
        if err <= tol:
            return cur, err
        prev = cur
    raise ToleranceError(
        f"quadrature did not reach tol={tol:.1e} (last change {err:.2e})",
        best=prev, error=err)
