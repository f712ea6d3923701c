"""
Kernels of the damped heat operator with memory
===============================================

The fundamental solution K0 mixes a heat kernel with the relaxation of
the recovery variable. This script evaluates it, checks it against its
Laplace transform and shows how the periodic sums build Green functions
on the strip [0, L].

Run with ``python demos/01_kernels.py`` from the repository root.
"""

import numpy as np

from fhngreen import FhnParams, certify_kernel_bounds, green, k0, k_i, laplace_check_k0, theta

# %% Parameters: eps is the diffusivity, (a, b, beta) the linear kinetics.
p = FhnParams(eps=1.0, a=1.0, b=1.0, beta=1.0, L=1.0)
print("parameters:", p.as_dict())

# %% K0 along x at a fixed time. With b = 0 it would be the damped Gaussian
# exp(-a t) exp(-x^2 / 4 eps t) / sqrt(4 pi eps t); the coupling lowers it.
heat = FhnParams(eps=1.0, a=1.0, b=0.0, beta=1.0)
print("\n   x      K0(x,1)      K0 with b=0   quad err")
for x in (0.0, 0.5, 1.0, 2.0, 4.0):
    ev = k0(p, x, 1.0)
    print(f"{x:5.1f}  {ev.value:.6e}  {k0(heat, x, 1.0).value:.6e}  {ev.quad_abs_error:.1e}")

# %% The Laplace transform in t is known in closed form; the mismatch is a
# direct check of the quadrature.
for r, s in ((0.5, 1.0), (1.0, 2.0), (2.0, 0.3)):
    print(f"Laplace residual at x={r}, s={s}: {laplace_check_k0(p, r, s):.2e}")

# %% K1 and K2 are successive time convolutions with an exponential.
print("\nK1(0.5, 1) =", k_i(p, 1, 0.5, 1.0).value)
print("K2(0.5, 1) =", k_i(p, 2, 0.5, 1.0).value)

# %% Periodic image sums: theta_i is 2L-periodic and even in x.
for x in (0.3, 2.3, -0.3):
    ev = theta(p, 0, x, 0.2)
    print(f"theta_0({x:+.1f}, 0.2) = {ev.value:.12f}  ({ev.terms_used} images)")

# %% Neumann and Dirichlet combinations of the same sums. The Dirichlet
# difference theta(x + xi) - theta(|x - xi|) vanishes on the walls; the
# solution operator uses it with the opposite sign, so that a positive
# initial bump stays positive.
xi = np.linspace(0.0, 1.0, 6)
print("\n xi    Neumann sum     Dirichlet difference   (x = 0.3)")
for s in xi:
    print(f"{s:4.1f}  {green(p, 0, 'Neumann_sum', 0.3, s, 0.1).value:12.6f}"
          f"  {green(p, 0, 'Dirichlet_difference', 0.3, s, 0.1).value:12.6f}")

# %% The a priori kernel bounds, checked on a grid of times.
print("\nbound           max lhs      min rhs      passed")
for c in certify_kernel_bounds(p, ts=(0.1, 1.0, 5.0)):
    print(f"{c.bound_id:14s} {c.observed_max_lhs:.4e}  {c.rhs_min_over_check_set:.4e}  {c.passed}")
