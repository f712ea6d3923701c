"""Discrete solution operators built from the Green kernels on a uniform grid.

Every solution formula of the package is a sum of three kinds of term,

    data      int_0^L G_i(x, xi, t) w(xi) dxi
    source    int_0^t int_0^L G_i(x, xi, t - tau) f(xi, tau) dxi dtau
    boundary  int_0^t theta_i(x, t - tau) psi(tau) dtau   (or d theta_i / dx),

and this module evaluates all of them at the nodes of a uniform grid
x_j = j h, t_k = k dt.

Discretisation
--------------
Data, sources and boundary signals are replaced by their piecewise-linear
interpolants (hats in x and in t). Each remaining integral of a kernel
against a hat is done accurately, so the only approximation is that
interpolation.

The kernels are expanded as superpositions of heat kernels (see kernels.py):

    G_i(t) = delta_i(t) H(t) + int_0^t m_i(y, t - y) H(y) dy,

where H(y) is the heat Green kernel of the strip, i.e. the image sum of
Gaussians of variance 2 eps y. Two steps then follow.

1. Heat level. Image-summed Gaussians are integrated exactly against
   spatial hats using error functions. The even (Neumann) or odd
   (Dirichlet) 2L-periodic extension of a hat interpolant is again a
   periodic hat interpolant, so H(y) acts on nodal values as a circulant
   matrix. A DCT-I (even case) or DST-I (odd case) diagonalises it exactly.
   In the odd case, the two boundary half-hats are handled as explicit
   columns.

2. Time level. The y-integral and the time hats are combined into weights
   ``alpha(y)`` on a fixed set of y-nodes. Cell 0 is integrated in
   u = sqrt(y / dt) on geometrically graded panels, to absorb the
   1/sqrt(y) onset; every later cell uses Gauss-Legendre. Each operator is
   then a small matrix product of these weights with the heat-level
   quantities, followed by a causal convolution in time.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import fft as sfft
from scipy.signal import fftconvolve
from scipy.special import erf, erfc

from . import quadrature as quad
from .errors import DomainError
from .kernels import density

_SQRT2 = math.sqrt(2.0)
_GAUSS_REACH = 12.0   # Gaussians are dropped beyond 12 standard deviations


@dataclass(frozen=True)
class Grid:
    """Uniform space-time grid: nx intervals on [0, L], nt steps on [0, T]."""

    nx: int = 64
    nt: int = 100

    def __post_init__(self):
        if int(self.nx) != self.nx or self.nx < 4:
            raise DomainError(f"nx must be an integer >= 4, got {self.nx}")
        if int(self.nt) != self.nt or self.nt < 1:
            raise DomainError(f"nt must be a positive integer, got {self.nt}")

    def x(self, L):
        return np.linspace(0.0, L, self.nx + 1)

    def t(self, T):
        return np.linspace(0.0, T, self.nt + 1)


# ------------------------------------------------------------ heat level

def _gauss(z, sig):
    return np.exp(-0.5 * (z / sig) ** 2) / (math.sqrt(2.0 * math.pi) * sig)


def _rs(w, sig):
    """Second antiderivative of the Gaussian minus its ramp, at w <= 0."""
    return w * 0.5 * erfc(-w / (sig * _SQRT2)) + sig * sig * _gauss(w, sig)


def _hat_conv(z, sig, h):
    """int Gaussian(z - xi) hat(xi / h) dxi for a unit hat on [-h, h]."""
    az = np.abs(z)
    ramp2 = np.maximum(0.0, 1.0 - az / h)
    return ramp2 + (_rs(-np.abs(z + h), sig) - 2.0 * _rs(-az, sig)
                    + _rs(-np.abs(z - h), sig)) / h


def _cdf_diff(hi, lo, sig):
    """Phi(hi) - Phi(lo) for hi >= lo without cancellation in the tails."""
    s = sig * _SQRT2
    out = 0.5 * (erf(hi / s) - erf(lo / s))
    pos = lo >= 0
    out = np.where(pos, 0.5 * (erfc(lo / s) - erfc(hi / s)), out)
    neg = hi <= 0
    return np.where(neg, 0.5 * (erfc(-hi / s) - erfc(-lo / s)), out)


def _half_hat_conv(z, sig, h):
    """int_0^h Gaussian(z - xi) (1 - xi / h) dxi."""
    return ((1.0 - z / h) * _cdf_diff(z, z - h, sig)
            - sig * sig / h * (_gauss(z, sig) - _gauss(z - h, sig)))


def _point(z, sig):
    return _gauss(z, sig)


def _point_x(z, sig):
    return -z / (sig * sig) * _gauss(z, sig)


def periodic(fun, z, y, p, *args, width=None):
    """sum_n fun(z + 2 n L, sigma(y)) as a (len(y), len(z)) array.

    ``width`` is the half-width of the un-smoothed profile (h for hats, 0
    for point evaluations); shifted arguments further than
    ``width + 12 sigma`` from the origin are skipped. Rows are grouped by
    the octave of sigma so the cut stays tight for small y.
    """
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    sig = np.sqrt(2.0 * p.eps * y)
    out = np.zeros((y.size, z.size))
    if z.size == 0 or y.size == 0:
        return out
    reach = float(np.max(np.abs(z)))
    span = 0.0 if width is None else float(width)
    octave = np.floor(np.log2(np.maximum(sig, 1e-300))).astype(int)
    for o in np.unique(octave):
        rows = np.nonzero(octave == o)[0]
        s = sig[rows, None]
        cut = _GAUSS_REACH * float(s.max()) + span
        n_max = int(math.ceil((cut + reach) / (2.0 * p.L)))
        for n in range(-n_max, n_max + 1):
            shifted = z + 2.0 * n * p.L
            cols = np.nonzero(np.abs(shifted) <= cut)[0] if width is not None else None
            if cols is None:
                out[rows] += fun(shifted[None, :], s, *args)
            elif cols.size:
                out[np.ix_(rows, cols)] += fun(shifted[None, cols], s, *args)
    return out


def hat_symbol(p, nx, y):
    """Eigenvalues of the heat circulant on the 2 nx periodic hat grid.

    Column k (0..nx) multiplies cos(k pi x / L) (even case) or
    sin(k pi x / L) (odd case).
    """
    h = p.L / nx
    d = np.arange(2 * nx)
    d = np.minimum(d, 2 * nx - d) * h           # symmetric offsets
    c = periodic(_hat_conv, d, y, p, h, width=h)
    return sfft.rfft(c, axis=1).real[:, : nx + 1]


def odd_half_column(p, x, y, h):
    """Odd-extended half-hat at node 0 seen from targets x (Dirichlet)."""
    return (periodic(_half_hat_conv, x, y, p, h, width=h)
            - periodic(_half_hat_conv, -x, y, p, h, width=h))


def gauss_points(p, x, y, derivative=False):
    """Periodised Gaussian (or its x-derivative) at targets x."""
    return periodic(_point_x if derivative else _point, x, y, p, width=0.0)


# ------------------------------------------------------------- time level

class YNodes:
    """Quadrature nodes in y covering [0, T], organised by time cell.

    ``cell[q]`` is the cell of node q, or -1 for the auxiliary nodes placed
    at y = t_k (k >= 1), which carry the delta_i(t) H(t) data terms and have
    no quadrature weight.
    """

    def __init__(self, dt, nt, ng=8, levels=16):
        self.dt, self.nt = dt, nt
        u, wu = quad.graded(levels, ng)
        y0, w0 = dt * u * u, dt * 2.0 * u * wu
        g, wg = quad.gauss_legendre(ng)
        ys = [y0] + [dt * (c + g) for c in range(1, nt)]
        ws = [w0] + [dt * wg for _ in range(1, nt)]
        cells = [np.zeros(y0.size, int)] + [np.full(ng, c) for c in range(1, nt)]
        ys.append(dt * np.arange(1, nt + 1))
        ws.append(np.zeros(nt))
        cells.append(np.full(nt, -1))
        self.y = np.concatenate(ys)
        self.w = np.concatenate(ws)
        self.cell = np.concatenate(cells)
        self.edge = np.nonzero(self.cell == -1)[0]   # node of y = t_k is edge[k-1]


class TimeWeights:
    """y-weights of the cell (convolution) and data operators for one kernel.

    ``left[c]`` / ``right[c]`` integrate over the time cell
    s in [c dt, (c + 1) dt] against the hat that is 1 at the older / newer
    end of the cell. ``data[k]`` evaluates the kernel at t_k (k >= 1).
    """

    def __init__(self, p, i, nodes, ns=8):
        dt, nt = nodes.dt, nodes.nt
        y, w, cell = nodes.y, nodes.w, nodes.cell
        ny = y.size
        self.left = np.zeros((nt, ny))
        self.right = np.zeros((nt, ny))
        self.data = np.zeros((nt + 1, ny))
        g, wg = quad.gauss_legendre(ns)
        direct = (lambda s: np.exp(-p.a * s)) if i == 0 else None
        quadn = cell >= 0
        for c in range(nt):
            sel = np.nonzero(quadn & (cell <= c))[0]
            yy = y[sel]
            lo = np.maximum(yy, c * dt)
            hi = (c + 1) * dt
            s = lo[:, None] + (hi - lo)[:, None] * g[None, :]
            ws = (hi - lo)[:, None] * wg[None, :]
            m = density(p, i, yy[:, None], s - yy[:, None]) * ws
            lam = (s - c * dt) / dt
            self.left[c, sel] = w[sel] * np.sum(m * lam, axis=1)
            self.right[c, sel] = w[sel] * np.sum(m * (1.0 - lam), axis=1)
            if direct is not None:
                own = sel[cell[sel] == c]
                lam_y = (y[own] - c * dt) / dt
                self.left[c, own] += w[own] * direct(y[own]) * lam_y
                self.right[c, own] += w[own] * direct(y[own]) * (1.0 - lam_y)
        for k in range(1, nt + 1):
            tk = k * dt
            sel = np.nonzero(quadn & (cell < k))[0]
            self.data[k, sel] = w[sel] * density(p, i, y[sel], tk - y[sel])
            if direct is not None:
                self.data[k, nodes.edge[k - 1]] = direct(tk)


def causal_conv(left, right, f):
    """out[k] = sum_{d=1..k} left[d-1] f[k-d] + sum_{n=1..k} right[k-n] f[n].

    ``left``/``right`` have shape (nt, q); ``f`` has shape (nt + 1, q) or
    (nt + 1,) (broadcast against q). Row 0 of the result is zero.
    """
    f = np.asarray(f, dtype=float)
    nt = left.shape[0]
    if f.ndim == 1:
        f = np.broadcast_to(f[:, None], (nt + 1, left.shape[1]))
    out = np.zeros((nt + 1, left.shape[1]))
    out[1:] += fftconvolve(left, f[:-1], axes=0)[:nt]
    out[1:] += fftconvolve(right, f[1:], axes=0)[:nt]
    return out


# ---------------------------------------------------------------- operator

class Propagator:
    """All Green-kernel operators for one parameter set, grid and boundary type.

    ``bc`` is ``"Neumann"`` (even images, kernel theta(|x - xi|) + theta(x + xi))
    or ``"Dirichlet"`` (odd images, theta(|x - xi|) - theta(x + xi)).
    """

    def __init__(self, p, grid, bc, ng=8, ns=8, levels=16):
        if bc not in ("Neumann", "Dirichlet"):
            raise DomainError(f"unknown boundary type {bc!r}")
        self.p, self.grid, self.bc = p, grid, bc
        self.x = grid.x(p.L)
        self.t = grid.t(p.T)
        self.h = p.L / grid.nx
        self.dt = p.T / grid.nt
        self.nodes = YNodes(self.dt, grid.nt, ng, levels)
        self._ns = ns
        self._weights = {}
        self._cache = {}

    # -- building blocks -------------------------------------------------
    def weights(self, i):
        if i not in self._weights:
            self._weights[i] = TimeWeights(self.p, i, self.nodes, self._ns)
        return self._weights[i]

    def _heat(self, name):
        if name not in self._cache:
            p, y, nx = self.p, self.nodes.y, self.grid.nx
            if name == "symbol":
                val = hat_symbol(p, nx, y)
            elif name == "half":
                val = odd_half_column(p, self.x, y, self.h)
            elif name == "gauss":
                val = gauss_points(p, self.x, y)
            elif name == "gauss_x":
                val = gauss_points(p, self.x, y, derivative=True)
            else:  # pragma: no cover - internal misuse
                raise KeyError(name)
            self._cache[name] = val
        return self._cache[name]

    def _timed(self, i, name):
        key = (i, name)
        if key not in self._cache:
            w, q = self.weights(i), self._heat(name)
            self._cache[key] = (w.left @ q, w.right @ q, w.data @ q)
        return self._cache[key]

    # -- spatial transforms ------------------------------------------------
    def _to_modes(self, v):
        if self.bc == "Neumann":
            return sfft.dct(v, type=1, axis=-1)
        return sfft.dst(v[..., 1:-1], type=1, axis=-1)

    def _from_modes(self, m):
        if self.bc == "Neumann":
            return sfft.idct(m, type=1, axis=-1)
        inner = sfft.idst(m, type=1, axis=-1)
        out = np.zeros(inner.shape[:-1] + (self.grid.nx + 1,))
        out[..., 1:-1] = inner
        return out

    def _modes_symbol(self, sym):
        return sym if self.bc == "Neumann" else sym[..., 1:-1]

    def _edge_columns(self, col, v0, vn):
        """Contribution of odd half-hats with nodal values v0 (x=0), vn (x=L)."""
        return v0[..., None] * col + vn[..., None] * col[..., ::-1]

    # -- operators ---------------------------------------------------------
    def data(self, i, w):
        """int_0^L G_i(x, xi, t_k) w(xi) dxi for all k; row 0 is the t -> 0 limit."""
        w = np.asarray(w, dtype=float)
        _, _, sym = self._timed(i, "symbol")
        out = self._from_modes(self._modes_symbol(sym) * self._to_modes(w)[None, :])
        if self.bc == "Dirichlet":
            _, _, half = self._timed(i, "half")
            out += self._edge_columns(half, np.array(w[0]), np.array(w[-1]))
        if self.bc == "Dirichlet":
            out[:, 0] = out[:, -1] = 0.0
        out[0] = w if i == 0 else 0.0
        return out

    def source(self, i, f):
        """int_0^t int_0^L G_i(x, xi, t - tau) f(xi, tau) dxi dtau on the grid."""
        f = np.asarray(f, dtype=float)
        left, right, _ = self._timed(i, "symbol")
        modes = self._to_modes(f)
        lm, rm = self._modes_symbol(left), self._modes_symbol(right)
        out = self._from_modes(causal_conv(lm, rm, modes))
        if self.bc == "Dirichlet":
            hl, hr, _ = self._timed(i, "half")
            out += (causal_conv(hl, hr, f[:, 0]) +
                    causal_conv(hl[:, ::-1], hr[:, ::-1], f[:, -1]))
            out[:, 0] = out[:, -1] = 0.0
        return out

    def boundary(self, i, left_signal, right_signal):
        """Boundary-data terms of the solution formula (coefficient 2 eps included).

        Neumann:   -2 eps int theta_i(x, t - tau) psi1 + 2 eps int theta_i(L - x, t - tau) psi2
        Dirichlet: -2 eps int theta_i'(x, t - tau) g1  - 2 eps int theta_i'(L - x, t - tau) g2
        """
        eps = self.p.eps
        g1 = np.asarray(left_signal, dtype=float)
        g2 = np.asarray(right_signal, dtype=float)
        if self.bc == "Neumann":
            cl, cr, _ = self._timed(i, "gauss")
            return -2.0 * eps * (causal_conv(cl, cr, g1)
                                 - causal_conv(cl[:, ::-1], cr[:, ::-1], g2))
        cl, cr, _ = self._timed(i, "gauss_x")
        out = -2.0 * eps * (causal_conv(cl, cr, g1)
                            + causal_conv(cl[:, ::-1], cr[:, ::-1], g2))
        out[:, 0] = out[:, -1] = 0.0
        return out

    # -- evaluation away from the grid nodes -------------------------------
    def _point_heat(self, xs, k):
        """Heat-level quantities seen from targets xs in [0, L] at time t_k.

        Only the y nodes with y <= t_k are kept: every time weight at t_k
        vanishes beyond them.
        """
        p, x, h, L = self.p, self.x, self.h, self.p.L
        nx = self.grid.nx
        rows = np.nonzero(self.nodes.y <= self.t[k] * (1.0 + 1e-12))[0]
        y = self.nodes.y[rows]
        xs = np.asarray(xs, dtype=float)
        # hat matrix: (Ny, len(xs), nx + 1), images folded by the extension
        z_minus = (xs[:, None] - x[None, :]).ravel()
        z_plus = (xs[:, None] + x[None, :]).ravel()
        shape = (y.size, xs.size, nx + 1)
        cm = periodic(_hat_conv, z_minus, y, p, h, width=h).reshape(shape)
        cp = periodic(_hat_conv, z_plus, y, p, h, width=h).reshape(shape)
        if self.bc == "Neumann":
            hat = cm + cp
            hat[:, :, 0] = cm[:, :, 0]
            hat[:, :, -1] = cm[:, :, -1]
            edge = None
            gauss = (gauss_points(p, xs, y), gauss_points(p, L - xs, y))
        else:
            hat = cm - cp
            hat[:, :, 0] = 0.0
            hat[:, :, -1] = 0.0
            edge = (odd_half_column(p, xs, y, h), odd_half_column(p, L - xs, y, h))
            gauss = (gauss_points(p, xs, y, True), gauss_points(p, L - xs, y, True))
        return k, rows, hat, edge, gauss

    def heat_at(self, xs, k):
        """Precompute the target-dependent part of :meth:`at` for reuse across calls."""
        return self._point_heat(xs, k)

    def at(self, i, xs, k, data=None, source=None, left=None, right=None, heat=None):
        """The same sum of terms as data/source/boundary, at targets xs and time t_k.

        ``heat`` may carry the result of ``heat_at(xs, k)`` for reuse.
        Targets must lie strictly inside (0, L) in the Dirichlet case.
        """
        xs = np.asarray(xs, dtype=float)
        if k < 1:
            raise DomainError("off-grid evaluation needs t_k > 0")
        if self.bc == "Dirichlet" and np.any((xs <= 0) | (xs >= self.p.L)):
            raise DomainError("Dirichlet targets must be interior")
        if heat is None:
            heat = self._point_heat(xs, k)
        hk, rows, hat, edge, gauss = heat
        if hk != k:
            raise DomainError(f"heat data were prepared for t_{hk}, not t_{k}")
        w = self.weights(i)
        left_w, right_w = w.left[:k][:, rows], w.right[:k][:, rows]
        out = np.zeros(xs.size)
        if data is not None:
            d = np.asarray(data, dtype=float)
            dk = w.data[k][rows]
            out += np.einsum("y,ypm,m->p", dk, hat, d)
            if edge is not None:
                out += dk @ (edge[0] * d[0] + edge[1] * d[-1])
        if source is not None:
            f = np.asarray(source, dtype=float)
            z = left_w.T @ f[k - 1::-1] + right_w[::-1].T @ f[1:k + 1]
            out += np.einsum("ypm,ym->p", hat, z)
            if edge is not None:
                out += np.einsum("yp,y->p", edge[0], z[:, 0]) + np.einsum("yp,y->p", edge[1], z[:, -1])
        if left is not None or right is not None:
            eps = self.p.eps
            g1 = np.zeros(self.grid.nt + 1) if left is None else np.asarray(left, float)
            g2 = np.zeros(self.grid.nt + 1) if right is None else np.asarray(right, float)
            a1 = left_w.T @ g1[k - 1::-1] + right_w[::-1].T @ g1[1:k + 1]
            a2 = left_w.T @ g2[k - 1::-1] + right_w[::-1].T @ g2[1:k + 1]
            sign = -1.0 if self.bc == "Neumann" else 1.0
            out += -2.0 * eps * (a1 @ gauss[0] + sign * (a2 @ gauss[1]))
        return out
