"""Problem definition, validation, and counted user-callable evaluation.

Call counting convention
------------------------
``nfev`` counts the number of *points* at which the user's functions were
invoked: one ``evaluate`` call is one point (objective and constraints are
both evaluated there), and each finite-difference probe point counts one,
whether it probed the objective, the constraints, or both.  ``ngev`` counts
the points at which a user-supplied derivative callable (``grad`` and/or
``jac``) was invoked.  Replayed (hot-start) evaluations advance neither
counter.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import (
    DimensionMismatch,
    InvalidBounds,
    NonFiniteFunctionValue,
    NonFiniteInitialGuess,
)
from .finitediff import FDOptions, fd_gradient, fd_jacobian

__all__ = [
    "ProblemSpec",
    "Evaluation",
    "DerivativeEval",
    "ValidatedProblem",
    "validate_problem",
    "evaluate",
    "evaluate_derivatives",
]


@dataclass
class ProblemSpec:
    """A nonlinear program: objective, constraints, bounds, initial guess.

    The first ``meq`` constraint components are equalities ``c_i(x) = 0``;
    the rest are inequalities ``c_i(x) >= 0``.  ``m`` may be left ``None``
    when ``con`` is given; it is then inferred from ``con(x0)`` during
    validation.

    Attributes
    ----------
    x0 : array_like, shape (n,)
        Initial guess.  Components outside ``[xl, xu]`` are clipped to the
        bounds during validation rather than rejected.
    obj : callable
        ``obj(x) -> float``.
    con : callable, optional
        ``con(x) -> array of shape (m,)``; may be omitted when ``m == 0``.
    grad : callable, optional
        ``grad(x) -> array of shape (n,)``; finite-differenced when absent.
    jac : callable, optional
        ``jac(x) -> array of shape (m, n)``; finite-differenced when absent.
    m : int, optional
        Total number of constraints.
    meq : int
        Number of equality constraints (leading block of ``con``).
    xl, xu : array_like, optional
        Bounds; ``None`` entries default to -inf / +inf.
    """

    x0: np.ndarray
    obj: Callable
    con: Callable | None = None
    grad: Callable | None = None
    jac: Callable | None = None
    m: int | None = None
    meq: int = 0
    xl: np.ndarray | None = None
    xu: np.ndarray | None = None

    @property
    def n(self):
        return np.asarray(self.x0).shape[0]


@dataclass(frozen=True)
class Evaluation:
    """Objective and constraint values at one point."""

    f: float
    c: np.ndarray
    nfev_delta: int


@dataclass(frozen=True)
class DerivativeEval:
    """Objective gradient and constraint Jacobian at one point.

    ``exact`` flags (gradient, jacobian) record whether each block came from
    a user callable (True) or finite differencing (False).
    """

    g: np.ndarray
    J: np.ndarray
    ngev_delta: int
    exact: tuple[bool, bool]


def _as_vector(value, n, what):
    arr = np.atleast_1d(np.asarray(value, dtype=float)).reshape(-1)
    if arr.shape != (n,):
        raise DimensionMismatch(f"{what} must have length {n}, got shape {arr.shape}")
    return arr


class ValidatedProblem:
    """A validated problem handle owning the user-call counters.

    Use :func:`validate_problem` to construct one.  A handle is used by one
    optimization run at a time; counters are single-writer.
    """

    def __init__(self, spec, x0, m, replayer=None):
        self.spec = spec
        self.x0 = x0
        self.n = x0.shape[0]
        self.m = m
        self.meq = spec.meq
        self.xl = np.full(self.n, -np.inf) if spec.xl is None else np.asarray(spec.xl, dtype=float)
        self.xu = np.full(self.n, np.inf) if spec.xu is None else np.asarray(spec.xu, dtype=float)
        self.nfev = 0
        self.ngev = 0
        self._replayer = replayer
        self._initial_eval = None
        self._eval_observer = None

    def set_eval_observer(self, fn):
        """Install a callback ``fn(x, Evaluation)`` run after every evaluate."""
        self._eval_observer = fn

    def take_initial_evaluation(self):
        """Return the evaluation cached by validation, at most once."""
        ev, self._initial_eval = self._initial_eval, None
        return ev

    def _call_user(self, x):
        # One evaluation point; counted even when the value turns out
        # non-finite (the user callables did run).
        f = float(self.spec.obj(x))
        if self.m > 0:
            c = _as_vector(self.spec.con(x), self.m, "con(x)")
        else:
            c = np.zeros(0)
        self.nfev += 1
        if not np.isfinite(f) or not np.all(np.isfinite(c)):
            raise NonFiniteFunctionValue(f"objective/constraints non-finite at x={x}")
        return f, c

    def evaluate(self, x):
        x = _as_vector(x, self.n, "x")
        if self._replayer is not None:
            rec = self._replayer.next_eval()
            if rec is not None:
                f, c = rec
                ev = Evaluation(f=f, c=_as_vector(c, self.m, "replayed constraints"), nfev_delta=0)
                if self._eval_observer is not None:
                    self._eval_observer(x, ev)
                return ev
        f, c = self._call_user(x)
        ev = Evaluation(f=f, c=c, nfev_delta=1)
        if self._eval_observer is not None:
            self._eval_observer(x, ev)
        return ev

    def evaluate_derivatives(self, x, fd_opts=None, base=None):
        x = _as_vector(x, self.n, "x")
        fd_opts = fd_opts if fd_opts is not None else FDOptions()
        if self._replayer is not None:
            rec = self._replayer.next_derivs()
            if rec is not None:
                g, J = rec
                return DerivativeEval(
                    g=_as_vector(g, self.n, "replayed gradient"),
                    J=np.asarray(J, dtype=float).reshape(self.m, self.n),
                    ngev_delta=0,
                    exact=(self.spec.grad is not None, self.spec.jac is not None),
                )
        grad_fn, jac_fn = self.spec.grad, self.spec.jac
        have_grad = grad_fn is not None
        have_jac = jac_fn is not None or self.m == 0

        g = J = None
        ngev_delta = 0
        if have_grad:
            g = _as_vector(grad_fn(x), self.n, "grad(x)")
        if jac_fn is not None and self.m > 0:
            J = np.asarray(jac_fn(x), dtype=float)
            if J.shape != (self.m, self.n):
                raise DimensionMismatch(f"jac(x) must have shape ({self.m}, {self.n}), got {J.shape}")
        elif self.m == 0:
            J = np.zeros((0, self.n))
        if have_grad or (jac_fn is not None and self.m > 0):
            ngev_delta = 1
            self.ngev += 1

        if g is None or J is None:
            f0, c0 = (base.f, base.c) if base is not None else (None, None)
            if f0 is None:
                f0, c0 = self._call_user(x)
            if g is None and J is None:
                # Both blocks missing: probe objective and constraints at the
                # same n points so the cost stays n evaluation points.
                g, J = self._fd_both(x, f0, c0, fd_opts)
            elif g is None:
                g = fd_gradient(self._counted(self.spec.obj), x, fd_opts, f0=f0)
            else:
                J = fd_jacobian(self._counted(self.spec.con), x, self.m, fd_opts, c0=c0)

        result = DerivativeEval(g=g, J=J, ngev_delta=ngev_delta, exact=(have_grad, have_jac))
        if not np.all(np.isfinite(result.g)) or not np.all(np.isfinite(result.J)):
            raise NonFiniteFunctionValue(f"derivatives non-finite at x={x}")
        return result

    def _counted(self, fn):
        def wrapped(z):
            self.nfev += 1
            return fn(z)

        return wrapped

    def _fd_both(self, x, f0, c0, fd_opts):
        h = fd_opts.steps(x)
        g = np.empty(self.n)
        J = np.empty((self.m, self.n))
        for i in range(self.n):
            xp = x.copy()
            xp[i] += h[i]
            fp, cp = self._call_user(xp)
            g[i] = (fp - f0) / h[i]
            if self.m > 0:
                J[:, i] = (cp - c0) / h[i]
        return g, J


def validate_problem(spec, replayer=None):
    """Validate a :class:`ProblemSpec` and return a counted handle.

    Checks bounds ordering and the finiteness of ``x0``, clips ``x0`` into
    ``[xl, xu]`` componentwise, and evaluates the objective and constraints
    once at the (clipped) initial point to verify shapes.  That evaluation
    is cached on the handle and reused by the solver, so it is not wasted.

    Idempotent: passing an already-validated handle returns it unchanged.
    """
    if isinstance(spec, ValidatedProblem):
        return spec
    x0 = np.atleast_1d(np.asarray(spec.x0, dtype=float)).reshape(-1)
    n = x0.shape[0]
    if n < 1:
        raise DimensionMismatch("problem must have at least one variable")
    if not np.all(np.isfinite(x0)):
        raise NonFiniteInitialGuess(f"x0 must be finite, got {x0}")
    xl = np.full(n, -np.inf) if spec.xl is None else _as_vector(spec.xl, n, "xl")
    xu = np.full(n, np.inf) if spec.xu is None else _as_vector(spec.xu, n, "xu")
    if np.any(np.isnan(xl)) or np.any(np.isnan(xu)):
        raise InvalidBounds("bounds must not contain NaN")
    if np.any(xl > xu):
        bad = int(np.argmax(xl > xu))
        raise InvalidBounds(f"xl[{bad}]={xl[bad]} exceeds xu[{bad}]={xu[bad]}")
    x0 = np.clip(x0, xl, xu)

    m = spec.m
    if spec.con is None:
        if m not in (None, 0):
            raise DimensionMismatch(f"m={m} but no constraint function given")
        m = 0
    if m is None and replayer is not None:
        m = replayer.m  # recorded constraint count; checked below like a given m
    if not (0 <= spec.meq <= (m if m is not None else np.inf)):
        raise DimensionMismatch(f"need 0 <= meq <= m, got meq={spec.meq}, m={m}")

    probe = ValidatedProblem(spec, x0, m if m is not None else -1, replayer=replayer)
    if m is None:
        # Infer m from one constraint call, then re-check against meq.
        c_probe = np.atleast_1d(np.asarray(spec.con(x0), dtype=float)).reshape(-1)
        probe.m = c_probe.shape[0]
        probe.nfev += 1
        f0 = float(spec.obj(x0))
        if not np.isfinite(f0) or not np.all(np.isfinite(c_probe)):
            raise NonFiniteFunctionValue(f"objective/constraints non-finite at x={x0}")
        if spec.meq > probe.m:
            raise DimensionMismatch(f"need 0 <= meq <= m, got meq={spec.meq}, m={probe.m}")
        probe._initial_eval = Evaluation(f=f0, c=c_probe, nfev_delta=1)
    else:
        probe._initial_eval = probe.evaluate(x0)
    return probe


def evaluate(p, x):
    """Evaluate objective and constraints at ``x``, advancing ``p.nfev``."""
    return p.evaluate(x)


def evaluate_derivatives(p, x, fd_opts=None, base=None):
    """Gradient and Jacobian at ``x``: user callables where supplied,
    forward differences otherwise.

    ``base`` may carry a known :class:`Evaluation` at ``x`` so the
    finite-difference path spends exactly n extra evaluation points.
    """
    return p.evaluate_derivatives(x, fd_opts=fd_opts, base=base)
