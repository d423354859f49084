"""
Finite-difference derivatives and their cost
============================================

When gradients or Jacobians are not supplied, the solver estimates them
with first-order forward differences.  Each estimate costs n extra
evaluation points, so supplying exact derivatives is worth it for
expensive functions.  Probe points are not clipped to the variable
bounds.
"""

import numpy as np

from sqpkit import FDOptions, ProblemSpec, SolverOptions, fd_gradient, optimize

# --- accuracy versus step size ------------------------------------------
# Forward differences have truncation error ~ M h / 2 (M bounds the second
# derivative) plus subtractive cancellation ~ eps / h: the total is
# U-shaped in h.

f = lambda x: np.sin(x[0]) + x[0] ** 3
x = np.array([0.9])
exact = np.cos(0.9) + 3 * 0.81

print("step h      |fd - exact|")
for h in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12):
    g = fd_gradient(f, x, FDOptions(h_abs=h))
    print(f"{h:8.0e}    {abs(g[0] - exact):.3e}")

# A relative step h_i = h_rel * max(1, |x_i|) adapts to the coordinate
# magnitudes and is the default when no step is given.

# --- evaluation cost ------------------------------------------------------
# Solve the same problem with and without an exact gradient and compare the
# evaluation counters.

def make_spec(with_grad):
    return ProblemSpec(
        x0=np.array([3.0, -4.0, 2.0]),
        obj=lambda v: float((v - np.array([1.0, 2.0, -1.0])) @ (v - np.array([1.0, 2.0, -1.0]))),
        grad=(lambda v: 2.0 * (v - np.array([1.0, 2.0, -1.0]))) if with_grad else None,
    )

for with_grad in (True, False):
    res = optimize(make_spec(with_grad), SolverOptions(summary_path=""))
    kind = "exact gradient " if with_grad else "finite-difference"
    print(f"{kind}: x*={np.round(res.x_star, 6)}, nfev={res.nfev}, ngev={res.ngev}")
