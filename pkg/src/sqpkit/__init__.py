"""sqpkit: a self-contained SLSQP solver with a usability layer.

The solver proper is a sequential quadratic programming loop whose QP
subproblems are solved through a dense constrained least-squares chain
(NNLS -> LDP -> LSI -> LSEI).  Around it sit finite-difference derivatives,
independent problem scaling, per-iteration history files with warm and hot
restarts, a live summary table, and plot emission.

Typical use::

    import numpy as np
    from sqpkit import ProblemSpec, SolverOptions, optimize

    spec = ProblemSpec(
        x0=np.array([2.0, 3.0]),
        obj=lambda x: x[0] ** 2 + x[1] ** 2,
        con=lambda x: np.array([x[0] + x[1] - 1.0]),
        m=1, meq=1,
    )
    results = optimize(spec, SolverOptions(summary_path=""))
    print(results.x_star, results.status)
"""

from .driver import (
    HessianApprox,
    IterateState,
    Replayer,
    Results,
    SolverOptions,
    Status,
    apply_warm_start,
    bfgs_update,
    build_hot_start_replayer,
    convergence_measures,
    line_search,
    merit_value,
    optimize,
    update_penalties,
)
from .exceptions import (
    DimensionMismatch,
    FormatError,
    HistoryMismatch,
    IndexOutOfRange,
    Infeasible,
    InvalidBounds,
    InvalidVarName,
    IterationLimit,
    LineSearchFailed,
    MissingHistory,
    NonFiniteFunctionValue,
    NonFiniteInitialGuess,
    NonPositiveScaler,
    RankDeficient,
    SqpError,
    UnknownSeries,
    Unsolvable,
)
from .finitediff import FDOptions, fd_gradient, fd_jacobian
from .history import (
    ALLOWED_SAVE_VARS,
    History,
    HistoryRecord,
    SaveConfig,
    SummaryWriter,
    Writer,
    append_record,
    load_history,
    open_writer,
    write_summary_row,
)
from .lsq import QpSolution, QpSubproblem, ldp, lsei, lsi, nnls, solve_qp
from .plotting import LiveRenderer, VizConfig, live_update, render_series
from .problem import (
    DerivativeEval,
    Evaluation,
    ProblemSpec,
    ValidatedProblem,
    evaluate,
    evaluate_derivatives,
    validate_problem,
)
from .problems import ProblemRegistryEntry, get_problem, list_problems
from .scaling import (
    Scaler,
    identity_scaler,
    make_scaler,
    scale_bounds,
    scale_derivs,
    scale_fc,
    scale_x,
    unscale_x,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # problem definition and evaluation
    "ProblemSpec", "Evaluation", "DerivativeEval", "ValidatedProblem",
    "validate_problem", "evaluate", "evaluate_derivatives",
    # finite differences
    "FDOptions", "fd_gradient", "fd_jacobian",
    # scaling
    "Scaler", "make_scaler", "identity_scaler", "scale_x", "unscale_x",
    "scale_bounds", "scale_fc", "scale_derivs",
    # least-squares chain
    "nnls", "ldp", "lsi", "lsei", "solve_qp", "QpSubproblem", "QpSolution",
    # driver
    "optimize", "SolverOptions", "Results", "Status", "IterateState",
    "HessianApprox", "convergence_measures", "merit_value",
    "update_penalties", "line_search", "bfgs_update",
    "Replayer", "build_hot_start_replayer", "apply_warm_start",
    # history and summary
    "SaveConfig", "HistoryRecord", "History", "Writer", "open_writer",
    "append_record", "load_history", "SummaryWriter", "write_summary_row",
    "ALLOWED_SAVE_VARS",
    # plotting
    "VizConfig", "render_series", "live_update", "LiveRenderer",
    # bundled problems
    "ProblemRegistryEntry", "get_problem", "list_problems",
    # errors
    "SqpError", "InvalidBounds", "DimensionMismatch", "NonFiniteInitialGuess",
    "NonFiniteFunctionValue", "NonPositiveScaler", "IterationLimit",
    "Infeasible", "RankDeficient", "Unsolvable", "LineSearchFailed",
    "MissingHistory", "HistoryMismatch", "FormatError", "InvalidVarName",
    "UnknownSeries", "IndexOutOfRange",
]
