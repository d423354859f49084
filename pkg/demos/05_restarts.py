"""
Warm and hot restarts from a save file
======================================

Warm start: replace the initial guess with the last iterate of a previous
run.  The quasi-Newton model restarts from the identity matrix, so the
solver may still need a few iterations.

Hot start: replay the recorded objective, constraint, and derivative
values in call order.  The run retraces the recorded trajectory exactly,
Hessian updates included, without calling the user functions at all until
the recording runs out; only then does it go live.  Ideal when a run hit
the iteration limit and the functions are expensive.
"""

from pathlib import Path

import numpy as np

from sqpkit import ProblemSpec, SaveConfig, SolverOptions, optimize

out = Path("demo_output")
out.mkdir(exist_ok=True)
record_path = out / "truncated.slsqp.jsonl"

calls = {"n": 0}


def expensive_objective(x):
    calls["n"] += 1
    return (1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2  # Rosenbrock


def make_spec():
    return ProblemSpec(x0=np.array([-1.2, 1.0]), obj=expensive_objective)


# --- 1. a run that stops too early -----------------------------------------
# Hot starting needs save_itr="all" (function values) with gradients and
# jacobians among the saved variables (derivative values).
save = SaveConfig(path=str(record_path), save_itr="all")
first = optimize(make_spec(), SolverOptions(summary_path="", save=save, maxiter=15))
print(f"first run : {first.status.value:15s} f={first.f_star:.6f} after {calls['n']} calls")

# --- 2. warm start: jump to the last iterate -------------------------------
calls["n"] = 0
warm = optimize(make_spec(), SolverOptions(summary_path="", warm_start=str(record_path)))
print(f"warm start: {warm.status.value:15s} f={warm.f_star:.6f} x*={np.round(warm.x_star, 6)}"
      f" (+{calls['n']} calls)")

# --- 3. hot start: replay, then continue live ------------------------------
calls["n"] = 0
hot = optimize(make_spec(),
               SolverOptions(summary_path="", hot_start=str(record_path), maxiter=200))
print(f"hot start : {hot.status.value:15s} f={hot.f_star:.6f} x*={np.round(hot.x_star, 6)}"
      f" (+{calls['n']} live calls; the 15 recorded iterations were free)")
