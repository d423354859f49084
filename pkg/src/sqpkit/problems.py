"""Built-in demonstration problems.

Three families are bundled:

``example2d``
    minimize x1^2 + x2^2 subject to x1 + x2 - 1 = 0, 3 x1 + 2 x2 - 1 >= 0,
    x1 >= 0.4, x2 <= 0.6, from x0 = (2, 3).  The optimum (0.5, 0.5) is
    forced by symmetry: the projection of the origin onto x1 + x2 = 1, with
    every other constraint inactive there.

``rosenbrock2d-con``
    The 2-D Rosenbrock function restricted to the unit disk
    (c(x) = 1 - x1^2 - x2^2 >= 0).  The unconstrained minimum (1, 1) is
    infeasible, so the solution sits on the circle; the recorded value was
    derived numerically (dense grid plus boundary Newton refinement).

``dblint-N``
    Minimum-effort double-integrator transfer: N piecewise-constant
    accelerations u_k on [0, 1] driving position 0 -> 1 and velocity
    0 -> 0 (two equality constraints), minimizing h * sum(u_k^2).  A
    desk-scale optimal-control problem; only feasibility is asserted for
    it, no closed-form optimum.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .problem import ProblemSpec

__all__ = ["ProblemRegistryEntry", "get_problem", "list_problems", "REGISTRY"]


@dataclass(frozen=True)
class ProblemRegistryEntry:
    name: str
    description: str
    spec_factory: Callable[[], ProblemSpec]
    known_solution: tuple | None
    note: str


def _example2d():
    def objective(x):
        return x[0] ** 2 + x[1] ** 2

    def constraints(x):
        return np.array([x[0] + x[1] - 1.0, 3.0 * x[0] + 2.0 * x[1] - 1.0])

    def jacobian(x):
        return np.array([[1.0, 1.0], [3.0, 2.0]])

    return ProblemSpec(
        x0=np.array([2.0, 3.0]),
        obj=objective,
        con=constraints,
        jac=jacobian,
        m=2,
        meq=1,
        xl=np.array([0.4, -np.inf]),
        xu=np.array([np.inf, 0.6]),
    )


def _rosenbrock2d_con():
    def objective(x):
        return (1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2

    def gradient(x):
        return np.array([
            -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] ** 2),
            200.0 * (x[1] - x[0] ** 2),
        ])

    def constraints(x):
        return np.array([1.0 - x[0] ** 2 - x[1] ** 2])

    def jacobian(x):
        return np.array([[-2.0 * x[0], -2.0 * x[1]]])

    return ProblemSpec(
        x0=np.array([0.0, 0.0]),
        obj=objective,
        grad=gradient,
        con=constraints,
        jac=jacobian,
        m=1,
        meq=0,
    )


def _dblint(segments):
    n = segments
    h = 1.0 / n
    # Exact per-segment integration of pdot = v, vdot = u_k gives
    # v(1) = h * sum(u_k) and p(1) = h^2 * sum((n - k - 1/2) u_k).
    weights_p = h * h * (n - np.arange(n) - 0.5)
    weights_v = np.full(n, h)

    def objective(u):
        return h * float(np.dot(u, u))

    def gradient(u):
        return 2.0 * h * np.asarray(u, dtype=float)

    def constraints(u):
        return np.array([np.dot(weights_p, u) - 1.0, np.dot(weights_v, u)])

    def jacobian(u):
        return np.vstack([weights_p, weights_v])

    return ProblemSpec(
        x0=np.zeros(n),
        obj=objective,
        grad=gradient,
        con=constraints,
        jac=jacobian,
        m=2,
        meq=2,
    )


REGISTRY = {
    "example2d": ProblemRegistryEntry(
        name="example2d",
        description="2-variable quadratic with one equality, one inequality, and bounds",
        spec_factory=_example2d,
        known_solution=(np.array([0.5, 0.5]), 0.5),
        note="optimum forced by symmetry; only the equality is active",
    ),
    "rosenbrock2d-con": ProblemRegistryEntry(
        name="rosenbrock2d-con",
        description="2-D Rosenbrock restricted to the unit disk",
        spec_factory=_rosenbrock2d_con,
        known_solution=(np.array([0.7864151541684278, 0.6176983125233936]), 0.04567480871950022),
        note="solution derived numerically (grid search + boundary Newton refinement)",
    ),
    "dblint-20": ProblemRegistryEntry(
        name="dblint-20",
        description="minimum-effort double-integrator transfer, 20 control segments",
        spec_factory=lambda: _dblint(20),
        known_solution=None,
        note="feasibility-checked only; no closed-form optimum asserted",
    ),
}


def get_problem(name):
    """Look up a bundled problem; ``dblint-<N>`` accepts any N >= 2."""
    if name in REGISTRY:
        return REGISTRY[name]
    if name.startswith("dblint-"):
        try:
            segments = int(name.split("-", 1)[1])
        except ValueError:
            segments = 0
        if segments >= 2:
            return ProblemRegistryEntry(
                name=name,
                description=f"minimum-effort double-integrator transfer, {segments} control segments",
                spec_factory=lambda: _dblint(segments),
                known_solution=None,
                note="feasibility-checked only; no closed-form optimum asserted",
            )
    raise KeyError(f"unknown problem {name!r}; available: {', '.join(sorted(REGISTRY))} (and dblint-<N>)")


def list_problems():
    """Registry entries in a stable order."""
    return [REGISTRY[k] for k in sorted(REGISTRY)]
