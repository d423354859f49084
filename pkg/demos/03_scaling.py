"""
Independent problem scaling
===========================

Variables, objective, and constraints can be scaled individually without
touching the user-defined functions, bounds, or initial guess: bounds and
derivatives are scaled automatically, the solver iterates in scaled space,
and everything reported back is unscaled.

Poor scaling is not cosmetic.  The first problem below has one variable of
order 1e4 and one of order 1e-2; in raw units the gradient components and
the convergence measures are so lopsided that the run stalls far from the
minimizer while claiming convergence.  Scaling both variables to order one
fixes it without changing a single user function.
"""

import numpy as np

from sqpkit import ProblemSpec, SolverOptions, get_problem, make_scaler, optimize

target = np.array([2.0e4, 3.0e-2])


def objective(x):
    return (x[0] / 1e4 - 2.0) ** 2 + (100.0 * x[1] - 3.0) ** 2


def make_spec():
    return ProblemSpec(x0=np.array([5.0e4, 9.0e-2]), obj=objective)


# x_scaler multiplies the variables into solver space: 1e-4 maps x1 ~ 1e4
# to ~1, 1e2 maps x2 ~ 1e-2 to ~1.
scaler = make_scaler([1e-4, 1e2], 1.0, 1.0, n=2, m=0)

plain = optimize(make_spec(), SolverOptions(summary_path=""))
scaled = optimize(make_spec(), SolverOptions(summary_path="", scaler=scaler))

rel_err = lambda res: np.abs((res.x_star - target) / target).max()
print("badly scaled problem, raw vs scaled run (default tolerances):")
print(f"  raw    : {plain.status.value:10s} iters={plain.num_majiter:3d} x*={plain.x_star}")
print(f"  scaled : {scaled.status.value:10s} iters={scaled.num_majiter:3d} x*={scaled.x_star}")
print(f"  target : {target}")
print(f"  raw-run relative error    : {rel_err(plain):.3e}   <- stalled at x0[0]!")
print(f"  scaled-run relative error : {rel_err(scaled):.3e}\n")

# On a well-scaled problem, scaling must not move the minimizer: the
# bundled example converges to the same unscaled point under any scalers.
spec = get_problem("example2d").spec_factory()
identity = optimize(spec, SolverOptions(summary_path=""))
rescaled = optimize(get_problem("example2d").spec_factory(),
                    SolverOptions(summary_path="",
                                  scaler=make_scaler(10.0, 2.0, [1.0, 0.5], n=2, m=2)))
print("argmin invariance on example2d:")
print(f"  identity scalers : x*={identity.x_star}")
print(f"  custom scalers   : x*={rescaled.x_star}")
print(f"  max difference   : {np.abs(identity.x_star - rescaled.x_star).max():.2e}")

# Optimality/feasibility are tracked in scaled space (where convergence is
# decided) and reported in both spaces:
print(f"  scaled vs unscaled optimality: {rescaled.optimality:.2e} / {rescaled.optimality_unscaled:.2e}")
