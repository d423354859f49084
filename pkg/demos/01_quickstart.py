"""
Quickstart: solve a small constrained problem
=============================================

Minimize x1^2 + x2^2 subject to one equality, one inequality, and bounds:

    x1 + x2 - 1  = 0
    3 x1 + 2 x2 - 1 >= 0
    x1 >= 0.4,  x2 <= 0.6

The constraint Jacobian is supplied analytically; the objective gradient is
left out, so the solver fills it in with forward differences.
"""

import numpy as np

from sqpkit import FDOptions, ProblemSpec, SolverOptions, optimize


def objective(x):
    return x[0] ** 2 + x[1] ** 2


def constraints(x):
    return np.array([x[0] + x[1] - 1.0, 3.0 * x[0] + 2.0 * x[1] - 1.0])


def jacobian(x):
    return np.array([[1.0, 1.0], [3.0, 2.0]])


spec = ProblemSpec(
    x0=np.array([2.0, 3.0]),
    obj=objective,
    con=constraints,
    jac=jacobian,
    m=2,
    meq=1,  # the first constraint is the equality
    xl=np.array([0.4, -np.inf]),
    xu=np.array([np.inf, 0.6]),
)

# acc is the convergence tolerance on both the optimality and feasibility
# measures; the live summary table goes to slsqp_summary.out by default.
results = optimize(spec, SolverOptions(acc=1e-6, fd=FDOptions(h_abs=1e-6)))

print(f"status      : {results.status.value} ({results.message})")
print(f"x*          : {results.x_star}")          # -> [0.5, 0.5]
print(f"f*          : {results.f_star:.8f}")       # -> 0.5
print(f"multipliers : {results.lambda_star}")
print(f"iterations  : {results.num_majiter}, nfev={results.nfev}, ngev={results.ngev}")

# The same problem is bundled as "example2d"; try it from the shell:
#   sqpkit solve --problem example2d
