"""Independent reference computations used by the tests.

Nothing here calls the package's quadrature or Bessel code: the kernels
are re-derived by brute force (Simpson on the classical formula with
scipy's Bessel functions, or the convolution definition), the ODE and
modal solutions are closed-form or RK4.
"""

import math

import numpy as np
from scipy import integrate
from scipy.special import j1 as scipy_j1


def random_params(rng, eps=(0.2, 2.0), a=(0.2, 2.0), b=(0.0, 2.0), beta=(0.2, 2.0)):
    from fhngreen import FhnParams

    return FhnParams(eps=rng.uniform(*eps), a=rng.uniform(*a), b=rng.uniform(*b),
                     beta=rng.uniform(*beta))


def heat_kernel(x, t, eps):
    return np.exp(-x * x / (4 * eps * t)) / (2 * np.sqrt(math.pi * eps * t))


def simpson_k0(p, x, t, n=20000):
    """K0 from the classical one-integral formula with a scipy J1, composite Simpson."""
    r2 = x * x / p.eps
    y = np.linspace(0.0, t, n + 1)
    s = t - y
    f = np.zeros_like(y)
    inner = (y > 0) & (s > 0)
    z = 2 * np.sqrt(p.b * y[inner] * s[inner])
    f[inner] = (np.exp(-r2 / (4 * y[inner]) - p.a * y[inner] - p.beta * s[inner])
                * scipy_j1(z) / np.sqrt(s[inner]))
    # s -> 0 limit of J1(2 sqrt(b y s)) / sqrt(s)
    f[-1] = math.sqrt(p.b * t) * math.exp(-r2 / (4 * t) - p.a * t)
    h = t / n
    integral = h / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum())
    head = math.exp(-r2 / (4 * t) - p.a * t) / math.sqrt(t)
    return (head - math.sqrt(p.b) * integral) / (2 * math.sqrt(math.pi * p.eps))


def convolve_previous(p, i, x, t, kernel, nodes=256):
    """int_0^t exp(-beta (t - tau)) K_{i-1}(x, tau) dtau with tau = t u^2 (kills the 1/sqrt(tau))."""
    u, w = np.polynomial.legendre.leggauss(nodes)
    u, w = 0.5 * (u + 1), 0.5 * w
    taus = t * u * u
    vals = np.array([kernel(p, i - 1, x, tau) for tau in taus])
    return float(np.sum(w * 2 * t * u * np.exp(-p.beta * (t - taus)) * vals))


def rk4(f, y0, t_end, steps):
    y = np.array(y0, dtype=float)
    h = t_end / steps
    out = [y.copy()]
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + h / 2 * k1)
        k3 = f(y + h / 2 * k2)
        k4 = f(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(y.copy())
    return np.array(out)


def fhn_ode(a, b, beta, u0, v0, t_end, steps):
    """Spatially uniform FHN: u' = -a u - v + u^2 (a + 1 - u), v' = b u - beta v."""
    def f(y):
        u, v = y
        return np.array([-a * u - v + u * u * (a + 1 - u), b * u - beta * v])
    return rk4(f, [u0, v0], t_end, steps)


def modal_solution(p, mode, kind, x, t):
    """b = 0 separated solution for u0 = cos(k pi x / L) (Neumann) or sin (Dirichlet)."""
    k = mode * math.pi / p.L
    decay = np.exp(-(p.eps * k * k + p.a) * t)
    shape = np.cos(k * x) if kind == "Neumann" else np.sin(k * x)
    return decay[:, None] * shape[None, :]


def memory_integral(gamma, eps, u, t):
    """-int_0^t exp(-(t - tau)/eps) (gamma + sin u(tau)) dtau by adaptive quadrature."""
    val, _ = integrate.quad(lambda tau: math.exp(-(t - tau) / eps) * (gamma + math.sin(u(tau))),
                            0.0, t, epsabs=1e-14, epsrel=1e-13, limit=400)
    return -val
