"""sqpeasy: one-call front end for the sqpkit solver.

Everything goes through :func:`optimize`, which takes the problem callables
and all tunables as keywords, runs the sqpkit core, prints the run summary
to the console, and returns a plain dictionary of results::

    from sqpeasy import optimize

    results = optimize(x0, obj=objective, con=constraints, jac=jacobian,
                       meq=1, xl=x_lower, xu=x_upper,
                       finite_diff_abs_step=1e-6,
                       x_scaler=10.0, obj_scaler=2.0, con_scaler=c_s,
                       save_itr='major', save_vars=['majiter', 'x', 'objective'],
                       save_filename='run.slsqp.jsonl',
                       visualize=True, visualize_vars=['objective', 'x[0]'])
    print(results)

This layer only marshals arguments; validation, evaluation counting, and
all numerics happen in the core, so the returned ``nfev``/``ngev`` match
the end-to-end user-callable invocations exactly.
"""

import sys

import numpy as np

from sqpkit import (
    FDOptions,
    ProblemSpec,
    SaveConfig,
    SolverOptions,
    VizConfig,
    make_scaler,
    validate_problem,
)
from sqpkit import optimize as _core_optimize
from sqpkit.plotting import DEFAULT_VIZ_VARS

__all__ = ["optimize"]

__version__ = "0.1.0"

DEFAULT_SAVE_FILENAME = "slsqp_history.jsonl"

_RESULT_KEYS = ("x", "objective", "constraints", "multipliers", "optimality",
                "feasibility", "num_majiter", "nfev", "ngev", "status", "message")


def optimize(x0, obj, con=None, jac=None, grad=None, meq=0, xl=None, xu=None,
             finite_diff_abs_step=None, finite_diff_rel_step=None,
             x_scaler=1.0, obj_scaler=1.0, con_scaler=1.0,
             acc=1e-6, maxiter=100,
             save_itr=None, save_vars=None, save_filename=None,
             summary_filename=None,
             visualize=False, visualize_vars=None,
             stream=None):
    """Solve a nonlinear program and return a results dictionary.

    Parameters
    ----------
    x0 : array_like, shape (n,)
        Initial guess (clipped into the bounds).
    obj, con, grad, jac : callables
        Objective (scalar), constraints (length-m vector, equalities
        first), and their optional exact derivatives; missing derivative
        blocks are finite-differenced.
    meq : int
        Number of equality constraints.
    xl, xu : array_like, optional
        Variable bounds.
    finite_diff_abs_step, finite_diff_rel_step : float, optional
        Forward-difference step sizes (absolute wins when both are set).
    x_scaler, obj_scaler, con_scaler : scalar or array_like
        Multiplicative scale factors applied inside the solver; all inputs
        and outputs stay in user units.
    acc : float
        Convergence tolerance on the optimality and feasibility measures.
    maxiter : int
        Major-iteration limit.
    save_itr : {'major', 'all'}, optional
        Enables the save file: one record per major iteration, or
        additionally one per function evaluation.
    save_vars : sequence of str, optional
        Variables stored in major records (default: all available).
    save_filename : str, optional
        Save-file path; giving it implies ``save_itr='major'``.
    summary_filename : str, optional
        Summary-table path (default ``slsqp_summary.out``).
    visualize : bool
        Re-render a progress chart after every major iteration.
    visualize_vars : sequence of str, optional
        Chart series (default: objective, optimality, feasibility).
    stream : file-like, optional
        Where the console summary goes (default ``sys.stdout``).

    Returns
    -------
    dict
        Keys: x, objective, constraints, multipliers, optimality,
        feasibility, num_majiter, nfev, ngev, status, message.  ``status``
        is ``'Converged'`` on success.
    """
    spec = ProblemSpec(
        x0=np.atleast_1d(np.asarray(x0, dtype=float)),
        obj=obj, con=con, grad=grad, jac=jac,
        m=None, meq=int(meq), xl=xl, xu=xu,
    )
    problem = validate_problem(spec)

    save = None
    if save_itr is not None or save_filename is not None:
        save = SaveConfig(
            path=save_filename if save_filename is not None else DEFAULT_SAVE_FILENAME,
            save_itr=save_itr if save_itr is not None else "major",
            save_vars=tuple(save_vars) if save_vars is not None
            else SaveConfig.__dataclass_fields__["save_vars"].default,
        )
    viz = None
    if visualize:
        viz = VizConfig(vars=tuple(visualize_vars) if visualize_vars else DEFAULT_VIZ_VARS)

    options = SolverOptions(
        acc=acc,
        maxiter=maxiter,
        fd=FDOptions(h_abs=finite_diff_abs_step, h_rel=finite_diff_rel_step),
        scaler=make_scaler(x_scaler, obj_scaler, con_scaler, problem.n, problem.m),
        save=save,
        summary_path=summary_filename,
        visualize=viz,
    )
    results = _core_optimize(problem, options)

    _print_summary(options, results, stream if stream is not None else sys.stdout)
    return {
        "x": results.x_star,
        "objective": results.f_star,
        "constraints": results.c_star,
        "multipliers": results.lambda_star,
        "optimality": results.optimality,
        "feasibility": results.feasibility,
        "num_majiter": results.num_majiter,
        "nfev": results.nfev,
        "ngev": results.ngev,
        "status": results.status.value,
        "message": results.message,
    }


def _print_summary(options, results, stream):
    """Echo the core's summary rows, then a one-line verdict."""
    path = options.summary_path or "slsqp_summary.out"
    try:
        with open(path, "r", encoding="utf-8") as fh:
            stream.write(fh.read())
    except OSError:
        pass
    stream.write(f"{results.message} (status: {results.status.value}, "
                 f"major iterations: {results.num_majiter}, "
                 f"nfev: {results.nfev}, ngev: {results.ngev})\n")
