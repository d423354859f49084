"""The SQP main loop.

Each major iteration linearizes the problem at the current (scaled) point,
solves one QP subproblem for a search direction and multiplier estimates,
tests convergence, globalizes the step with a backtracking line search on an
L1 exact-penalty merit function, and refreshes a Powell-damped BFGS model of
the Lagrangian Hessian.  The model starts from the identity matrix.

Convergence is declared when, in scaled space,

    optimality  = |g'd| + sum_i |lambda_i| * viol_i  <= acc
    feasibility = max violation                       <= acc

where ``viol_i`` is ``|c_i|`` for equalities and ``max(0, -c_i)`` for
inequalities.  Both measures are also reported in unscaled space.

Failures inside a run (line search, QP, user evaluation) never raise; they
are reported through ``Results.status``.  Bad arguments and unreadable
restart files raise before the run starts.
"""

import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .exceptions import (
    DimensionMismatch,
    HistoryMismatch,
    LineSearchFailed,
    MissingHistory,
    NonFiniteFunctionValue,
    Unsolvable,
)
from .finitediff import FDOptions
from .history import (
    DEFAULT_SUMMARY_PATH,
    HistoryRecord,
    SummaryWriter,
    Writer,
    open_writer,
)
from .lsq import QpSubproblem, solve_qp
from .problem import ProblemSpec, ValidatedProblem, validate_problem
from .scaling import (
    identity_scaler,
    scale_bounds,
    scale_derivs,
    scale_fc,
    scale_x,
    unscale_multipliers,
    unscale_x,
)

__all__ = [
    "Status",
    "SolverOptions",
    "IterateState",
    "Results",
    "HessianApprox",
    "convergence_measures",
    "merit_value",
    "update_penalties",
    "line_search",
    "bfgs_update",
    "Replayer",
    "build_hot_start_replayer",
    "apply_warm_start",
    "optimize",
]

_ARMIJO = 1e-4
_ALPHA_MIN = 1e-10
_DAMPING = 0.2


class Status(Enum):
    CONVERGED = "Converged"
    MAX_ITER_REACHED = "MaxIterReached"
    LINE_SEARCH_FAILED = "LineSearchFailed"
    QP_UNSOLVABLE = "QpUnsolvable"
    EVALUATION_ERROR = "EvaluationError"


@dataclass
class SolverOptions:
    """Solver tunables.

    ``summary_path=None`` writes the live summary to the default
    ``slsqp_summary.out``; pass an empty string to disable it.  ``scaler``
    defaults to the identity.  ``warm_start``/``hot_start`` name a save
    file from a previous run and are mutually exclusive.
    """

    acc: float = 1e-6
    maxiter: int = 100
    fd: FDOptions = field(default_factory=FDOptions)
    scaler: object = None
    save: object = None
    summary_path: str | None = None
    visualize: object = None
    warm_start: str | None = None
    hot_start: str | None = None

    def __post_init__(self):
        if not (self.acc > 0):
            raise ValueError(f"acc must be positive, got {self.acc}")
        if self.maxiter < 1:
            raise ValueError(f"maxiter must be at least 1, got {self.maxiter}")


@dataclass(frozen=True)
class IterateState:
    """Full state of one major iteration (unscaled user-space values;
    optimality/feasibility carried in both spaces)."""

    majiter: int
    x: np.ndarray
    f: float
    c: np.ndarray
    g: np.ndarray
    J: np.ndarray
    lam: np.ndarray
    optimality: float
    feasibility: float
    optimality_unscaled: float
    feasibility_unscaled: float
    alpha: float
    nfev: int
    ngev: int
    mode: int


@dataclass(frozen=True)
class Results:
    """Final report of one optimization run."""

    x_star: np.ndarray
    f_star: float
    c_star: np.ndarray
    lambda_star: np.ndarray
    optimality: float
    feasibility: float
    optimality_unscaled: float
    feasibility_unscaled: float
    num_majiter: int
    nfev: int
    ngev: int
    status: Status
    message: str


@dataclass(frozen=True)
class HessianApprox:
    """Lower-triangular Cholesky factor L of the model Hessian B = L L'."""

    L: np.ndarray

    @classmethod
    def identity(cls, n):
        return cls(L=np.eye(n))

    @property
    def B(self):
        return self.L @ self.L.T


def _violations(c, meq):
    c = np.asarray(c, dtype=float)
    return np.concatenate([np.abs(c[:meq]), np.maximum(0.0, -c[meq:])])


def convergence_measures(g, d, c, lam, meq):
    """Optimality and feasibility at one iterate.

    ``optimality = |g'd| + sum |lambda_i| viol_i`` (a Lagrangian
    stationarity proxy combined with complementarity);
    ``feasibility`` is the maximum constraint violation, 0 when m = 0.
    """
    viol = _violations(c, meq)
    feasibility = float(np.max(viol, initial=0.0))
    optimality = float(abs(np.dot(g, d)) + np.sum(np.abs(lam) * viol))
    return optimality, feasibility


def merit_value(f, c, rho, meq):
    """L1 exact-penalty merit: ``f + sum rho_i viol_i``."""
    return float(f + np.dot(rho, _violations(c, meq)))


def update_penalties(rho, lam):
    """Powell's rule: ``rho' = max(|lambda|, (rho + |lambda|) / 2)``."""
    lam = np.abs(np.asarray(lam, dtype=float))
    return np.maximum(lam, 0.5 * (np.asarray(rho, dtype=float) + lam))


def line_search(p, x, d, phi0, dphi0, rho, opts):
    """Backtracking Armijo search on the merit function.

    ``x`` and ``d`` live in scaled space.  Starts at alpha = 1 and shrinks
    by parabolic interpolation clamped to [0.1 alpha, 0.5 alpha] until

        phi(x + alpha d) <= phi0 + 1e-4 alpha dphi0.

    Returns the accepted alpha and the :class:`Evaluation` at the accepted
    point.  Raises :class:`LineSearchFailed` if ``dphi0 >= 0`` (not a
    descent direction) or alpha falls below 1e-10.
    """
    if not dphi0 < 0.0:
        raise LineSearchFailed(f"direction is not descent for the merit function (dphi0={dphi0})")
    scaler = opts.scaler if opts.scaler is not None else identity_scaler(p.n, p.m)
    alpha = 1.0
    while alpha >= _ALPHA_MIN:
        ev = p.evaluate(unscale_x(scaler, x + alpha * d))
        f_s, c_s = scale_fc(scaler, ev.f, ev.c)
        phi = merit_value(f_s, c_s, rho, p.meq)
        if phi <= phi0 + _ARMIJO * alpha * dphi0:
            return alpha, ev
        denom = 2.0 * (phi - phi0 - dphi0 * alpha)
        trial = -dphi0 * alpha * alpha / denom if denom > 0.0 else 0.5 * alpha
        alpha = min(max(trial, 0.1 * alpha), 0.5 * alpha)
    raise LineSearchFailed(f"no acceptable step above alpha={_ALPHA_MIN}")


def bfgs_update(H, s, y):
    """Powell-damped BFGS update of the Cholesky-factored model Hessian.

    With ``q = s'Bs``: when ``s'y < 0.2 q`` the secant vector is blended,
    ``ybar = theta y + (1 - theta) Bs`` with ``theta = 0.8 q / (q - s'y)``,
    which guarantees ``s'ybar = 0.2 q > 0`` and keeps B positive definite.
    A degenerate step (``q <= 1e-30``) skips the update and returns ``H``
    unchanged.
    """
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    B = H.B
    Bs = B @ s
    q = float(s @ Bs)
    if q <= 1e-30:
        return H
    sy = float(s @ y)
    if sy < _DAMPING * q:
        theta = 0.8 * q / (q - sy)
        ybar = theta * y + (1.0 - theta) * Bs
        sybar = float(s @ ybar)
    else:
        ybar = y
        sybar = sy
    if sybar <= 1e-30:
        return H
    Bp = B - np.outer(Bs, Bs) / q + np.outer(ybar, ybar) / sybar
    Bp = 0.5 * (Bp + Bp.T)
    try:
        Lp = np.linalg.cholesky(Bp)
    except np.linalg.LinAlgError:
        return H
    return HessianApprox(L=Lp)


class Replayer:
    """Serves recorded function and derivative values in call order.

    Function evaluations are replayed from ``eval`` records and derivative
    evaluations from major records carrying both ``gradient`` and
    ``jacobian``.  Once a stream is exhausted, calls fall through to the
    live user functions.  Replay matches by call order, not by the point
    ``x``; it never advances the user-call counters.
    """

    def __init__(self, history):
        header = history.header
        try:
            self.n = int(header["n"])
            self.m = int(header["m"])
        except (KeyError, TypeError, ValueError) as exc:
            raise HistoryMismatch(f"history header lacks usable n/m: {exc}") from exc
        self._evals = []
        self._derivs = []
        for rec in history.records:
            if rec.kind == "eval" and all(k in rec.payload for k in ("objective", "constraints")):
                self._evals.append((float(rec.payload["objective"]), np.asarray(rec.payload["constraints"], dtype=float)))
            elif rec.kind == "major" and "gradient" in rec.payload and "jacobian" in rec.payload:
                self._derivs.append((
                    np.asarray(rec.payload["gradient"], dtype=float),
                    np.asarray(rec.payload["jacobian"], dtype=float),
                ))
        self._ei = 0
        self._di = 0

    def check(self, n, m=None):
        if n != self.n or (m is not None and m != self.m):
            raise HistoryMismatch(f"history was recorded for n={self.n}, m={self.m}; problem has n={n}, m={m}")

    def next_eval(self):
        if self._ei < len(self._evals):
            item = self._evals[self._ei]
            self._ei += 1
            return item
        return None

    def next_derivs(self):
        if self._di < len(self._derivs):
            item = self._derivs[self._di]
            self._di += 1
            return item
        return None


def build_hot_start_replayer(history):
    """Wrap a loaded :class:`History` for hot-start replay."""
    return Replayer(history)


def apply_warm_start(opts, history):
    """Initial guess for a warm start: the last recorded iterate ``x``."""
    for rec in reversed(history.records):
        if "x" in rec.payload:
            return np.asarray(rec.payload["x"], dtype=float)
    raise MissingHistory("history contains no record with optimization variables")


class _Sinks:
    """Ordered hand-off of telemetry to file, summary, and renderer."""

    def __init__(self, writer, summary, renderer, on_iterate):
        self.writer = writer
        self.summary = summary
        self.renderer = renderer
        self.on_iterate = on_iterate

    def emit_eval(self, x, ev):
        if self.writer is not None:
            self.writer.append(HistoryRecord(kind="eval", payload={
                "x": np.asarray(x, dtype=float),
                "objective": ev.f,
                "constraints": np.asarray(ev.c, dtype=float),
            }))

    def emit_major(self, state, hessian):
        payload = {
            "majiter": state.majiter,
            "x": state.x,
            "objective": state.f,
            "constraints": state.c,
            "gradient": state.g,
            "jacobian": state.J,
            "optimality": state.optimality,
            "optimality_unscaled": state.optimality_unscaled,
            "feasibility": state.feasibility,
            "feasibility_unscaled": state.feasibility_unscaled,
            "multipliers": state.lam,
            "step": state.alpha,
            "nfev": state.nfev,
            "ngev": state.ngev,
        }
        if self.writer is not None:
            self.writer.append(HistoryRecord(kind="major", payload=payload))
        if self.summary is not None:
            self.summary.write_row(state)
        if self.renderer is not None:
            self.renderer.update(payload)
        if self.on_iterate is not None:
            self.on_iterate(state, hessian)

    def close(self):
        for item in (self.renderer, self.summary, self.writer):
            if item is not None:
                item.close()


def _build_qp(H, g_s, J_s, c_s, meq, dl, du):
    return QpSubproblem(
        L=H.L,
        g=g_s,
        Ceq=J_s[:meq],
        deq=c_s[:meq],
        Cin=J_s[meq:],
        din=c_s[meq:],
        dl=dl,
        du=du,
    )


def optimize(problem, options=None, on_iterate=None):
    """Run the SQP loop on a problem.

    Parameters
    ----------
    problem : ProblemSpec or ValidatedProblem
        The problem to solve.  A raw spec is validated internally (its
        initial point is clipped into the bounds and evaluated once).
    options : SolverOptions, optional
    on_iterate : callable, optional
        ``on_iterate(state, hessian)`` invoked after every major iteration
        with the :class:`IterateState` and current :class:`HessianApprox`.

    Returns
    -------
    Results
        Run failures (line search, QP, user evaluation) are reported in
        ``Results.status``; argument and restart-file errors raise.
    """
    opts = options if options is not None else SolverOptions()
    if opts.warm_start and opts.hot_start:
        raise ValueError("warm_start and hot_start are mutually exclusive")

    if isinstance(problem, ValidatedProblem) and not (opts.warm_start or opts.hot_start):
        # Reuse the caller's handle (and its counters) directly.
        p = problem
        spec = problem.spec
    else:
        # Restarts rebuild the evaluation layer, so start from the raw spec:
        # hot starts must route the very first evaluation through the
        # replayer, warm starts replace x0 before validation.
        spec = problem.spec if isinstance(problem, ValidatedProblem) else problem
        replayer = None
        if opts.hot_start:
            from .history import load_history

            replayer = build_hot_start_replayer(load_history(opts.hot_start))
            replayer.check(np.asarray(spec.x0).shape[0], spec.m)
        if opts.warm_start:
            from .history import load_history

            x0 = apply_warm_start(opts, load_history(opts.warm_start))
            if x0.shape[0] != np.asarray(spec.x0).shape[0]:
                raise HistoryMismatch(f"warm-start x has length {x0.shape[0]}, problem has n={np.asarray(spec.x0).shape[0]}")
            spec = replace(spec, x0=x0)

        try:
            p = validate_problem(spec, replayer=replayer)
        except NonFiniteFunctionValue as exc:
            return _error_results(spec, str(exc))
        if replayer is not None:
            replayer.check(p.n, p.m)

    scaler = opts.scaler if opts.scaler is not None else identity_scaler(p.n, p.m)
    if scaler.n != p.n or scaler.m != p.m:
        raise DimensionMismatch(f"scaler sized for (n={scaler.n}, m={scaler.m}), problem has (n={p.n}, m={p.m})")

    writer = None
    if opts.save is not None:
        writer = open_writer(opts.save, _header(p, opts, scaler))
    summary = None
    if opts.summary_path != "":
        summary = SummaryWriter(opts.summary_path or DEFAULT_SUMMARY_PATH)
    renderer = None
    if opts.visualize is not None:
        from .plotting import LiveRenderer

        renderer = LiveRenderer(opts.visualize, n=p.n, m=p.m)
    sinks = _Sinks(writer, summary, renderer, on_iterate)
    try:
        return _run_loop(p, opts, scaler, sinks)
    finally:
        p.set_eval_observer(None)
        sinks.close()


def _header(p, opts, scaler):
    return {
        "n": p.n,
        "m": p.m,
        "meq": p.meq,
        "options": {
            "acc": opts.acc,
            "maxiter": opts.maxiter,
            "fd_abs": opts.fd.h_abs,
            "fd_rel": opts.fd.h_rel,
            "x_scaler": scaler.xs.tolist(),
            "obj_scaler": scaler.os,
            "con_scaler": scaler.cs.tolist(),
            "save_itr": opts.save.save_itr if opts.save is not None else None,
        },
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }


def _error_results(spec, message, p=None):
    n = np.asarray(spec.x0).shape[0]
    m = p.m if p is not None else (spec.m or 0)
    return Results(
        x_star=np.asarray(spec.x0, dtype=float),
        f_star=float("nan"),
        c_star=np.full(m, np.nan),
        lambda_star=np.zeros(m),
        optimality=float("inf"),
        feasibility=float("inf"),
        optimality_unscaled=float("inf"),
        feasibility_unscaled=float("inf"),
        num_majiter=0,
        nfev=0,
        ngev=0,
        status=Status.EVALUATION_ERROR,
        message=message,
    )


def _run_loop(p, opts, scaler, sinks):
    meq = p.meq
    xl_s, xu_s = scale_bounds(scaler, p.xl, p.xu)

    ev = p.take_initial_evaluation()
    x_raw = p.x0.copy()
    p.set_eval_observer(sinks.emit_eval)
    if ev is None:  # reused handle whose cached evaluation is spent
        ev = p.evaluate(x_raw)  # observer records it
    else:
        sinks.emit_eval(x_raw, ev)

    x_s = scale_x(scaler, x_raw)
    H = HessianApprox.identity(p.n)
    rho = np.zeros(p.m)
    lam_s = np.zeros(p.m)
    alpha = 1.0
    majiter = 0
    emitted = 0
    status = None
    message = ""
    measures = None
    ls_opts = opts if opts.scaler is not None else replace(opts, scaler=scaler)

    try:
        de = p.evaluate_derivatives(x_raw, opts.fd, base=ev)
    except NonFiniteFunctionValue as exc:
        return _finish(p, scaler, x_raw, ev, lam_s, None, 0,
                       Status.EVALUATION_ERROR, str(exc))

    while True:
        f_s, c_s = scale_fc(scaler, ev.f, ev.c)
        g_s, J_s = scale_derivs(scaler, de.g, de.J)
        try:
            qp = solve_qp(_build_qp(H, g_s, J_s, c_s, meq, xl_s - x_s, xu_s - x_s))
        except Unsolvable as exc:
            status, message = Status.QP_UNSOLVABLE, str(exc)
            measures = None  # no direction at the current point
            break
        lam_s = qp.lam
        lam_raw = unscale_multipliers(scaler, lam_s)
        opt_s, feas_s = convergence_measures(g_s, qp.d, c_s, lam_s, meq)
        opt_u, feas_u = convergence_measures(de.g, qp.d / scaler.xs, ev.c, lam_raw, meq)
        measures = (opt_s, feas_s, opt_u, feas_u)
        state = IterateState(
            majiter=majiter, x=x_raw.copy(), f=ev.f, c=ev.c.copy(), g=de.g.copy(),
            J=de.J.copy(), lam=lam_raw, optimality=opt_s, feasibility=feas_s,
            optimality_unscaled=opt_u, feasibility_unscaled=feas_u, alpha=alpha,
            nfev=p.nfev, ngev=p.ngev, mode=0,
        )
        sinks.emit_major(state, H)
        emitted += 1

        if opt_s <= opts.acc and feas_s <= opts.acc:
            status, message = Status.CONVERGED, "Optimization terminated successfully"
            break
        if majiter + 1 >= opts.maxiter:
            status, message = Status.MAX_ITER_REACHED, f"Major iteration limit ({opts.maxiter}) reached"
            break

        rho = update_penalties(rho, lam_s)
        phi0 = merit_value(f_s, c_s, rho, meq)
        dphi0 = float(g_s @ qp.d - rho @ _violations(c_s, meq))
        try:
            alpha, ev_new = line_search(p, x_s, qp.d, phi0, dphi0, rho, ls_opts)
        except LineSearchFailed as exc:
            status, message = Status.LINE_SEARCH_FAILED, str(exc)
            break
        except NonFiniteFunctionValue as exc:
            status, message = Status.EVALUATION_ERROR, str(exc)
            break

        x_s_new = x_s + alpha * qp.d
        x_raw_new = unscale_x(scaler, x_s_new)
        try:
            de_new = p.evaluate_derivatives(x_raw_new, opts.fd, base=ev_new)
        except NonFiniteFunctionValue as exc:
            status, message = Status.EVALUATION_ERROR, str(exc)
            break

        g_s_new, J_s_new = scale_derivs(scaler, de_new.g, de_new.J)
        grad_lag_old = g_s - (J_s.T @ lam_s if p.m else 0.0)
        grad_lag_new = g_s_new - (J_s_new.T @ lam_s if p.m else 0.0)
        H = bfgs_update(H, x_s_new - x_s, grad_lag_new - grad_lag_old)

        x_s, x_raw, ev, de = x_s_new, x_raw_new, ev_new, de_new
        majiter += 1

    # One major iteration per emitted record: every QP solve produced one.
    return _finish(p, scaler, x_raw, ev, lam_s, measures, emitted, status, message)


def _finish(p, scaler, x_raw, ev, lam_s, measures, num_majiter, status, message):
    lam_raw = unscale_multipliers(scaler, lam_s)
    if measures is None:
        _, c_s = scale_fc(scaler, ev.f, ev.c)
        feas_s = float(np.max(_violations(c_s, p.meq), initial=0.0))
        feas_u = float(np.max(_violations(ev.c, p.meq), initial=0.0))
        measures = (float("inf"), feas_s, float("inf"), feas_u)
    opt_s, feas_s, opt_u, feas_u = measures
    return Results(
        x_star=x_raw.copy(),
        f_star=ev.f,
        c_star=ev.c.copy(),
        lambda_star=lam_raw,
        optimality=opt_s,
        feasibility=feas_s,
        optimality_unscaled=opt_u,
        feasibility_unscaled=feas_u,
        num_majiter=num_majiter,
        nfev=p.nfev,
        ngev=p.ngev,
        status=status,
        message=message,
    )
