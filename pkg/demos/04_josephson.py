"""
A Josephson transmission line as a system with memory
=====================================================

A damped sine-Gordon line maps onto the same linear operator, with
coefficients (a, b, beta) = (alpha - 1/eps, -a/eps, 1/eps) and a
memory source -int_0^t exp(-(t - tau)/eps) (gamma + sin u) dtau. The
coupling b is usually negative, so the bounds do not apply. The problem
is then solved with the finite-difference oracle, which carries the
memory integral as an extra ODE.

Run with ``python demos/04_josephson.py`` from the repository root.
"""

import numpy as np

from fhngreen import (BoundaryData, FdConfig, FhnParams, InitialData, JosephsonSource,
                      fd_solve, josephson_params, josephson_source)

# %% Parameter mapping.
for alpha, eps in ((1.0, 0.1), (2.0, 1.0), (0.5, 4.0)):
    jp = josephson_params(alpha, eps)
    print(f"alpha={alpha}, eps={eps}:  a={jp.a:+.3f}  b={jp.b:+.3f}  beta={jp.beta:.3f}"
          f"  bounds apply: {jp.estimates_valid}")

# %% The memory source at one point, from a sampled history of u.
t = np.linspace(0.0, 2.0, 2001)
hist = (t, 1.5 * np.sin(3.0 * t))
print("\nmemory source at t = 0.5, 1, 2:",
      [round(josephson_source(0.1, 2.0, hist, s), 6) for s in (0.5, 1.0, 2.0)])

# %% Full line with a bias current gamma = 0.1.
jp = josephson_params(0.7 + 1 / 2.0, 2.0)
p = FhnParams(eps=0.5, a=jp.a, b=jp.b, beta=jp.beta, L=1.0, T=4.0)
sol = fd_solve(p, InitialData(lambda x: 0.2 * np.cos(np.pi * x)), BoundaryData(),
               JosephsonSource(0.1, 2.0), FdConfig(nx=64), times=np.linspace(0, 4, 9))
print("\n  t     mean u     spread of u")
for k, tk in enumerate(sol.u.grid_t):
    row = sol.u.values[k]
    print(f"{tk:4.1f}  {row.mean():+.5f}  {row.max() - row.min():.5f}")
