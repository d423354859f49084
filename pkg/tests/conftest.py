import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sqpkit import ProblemSpec


class CountingCallables:
    """Instrumented problem callables with per-callable invocation counters."""

    def __init__(self, obj, con=None, grad=None, jac=None):
        self.obj_calls = 0
        self.con_calls = 0
        self.grad_calls = 0
        self.jac_calls = 0
        self._obj, self._con, self._grad, self._jac = obj, con, grad, jac

    def obj(self, x):
        self.obj_calls += 1
        return self._obj(x)

    def con(self, x):
        self.con_calls += 1
        return self._con(x)

    def grad(self, x):
        self.grad_calls += 1
        return self._grad(x)

    def jac(self, x):
        self.jac_calls += 1
        return self._jac(x)


def example2d_spec(counting=False, with_jac=True, with_grad=False):
    """The bundled 2-variable example problem, optionally instrumented."""
    obj = lambda x: x[0] ** 2 + x[1] ** 2
    con = lambda x: np.array([x[0] + x[1] - 1.0, 3.0 * x[0] + 2.0 * x[1] - 1.0])
    grad = lambda x: np.array([2.0 * x[0], 2.0 * x[1]])
    jac = lambda x: np.array([[1.0, 1.0], [3.0, 2.0]])
    counters = CountingCallables(obj, con, grad, jac)
    spec = ProblemSpec(
        x0=np.array([2.0, 3.0]),
        obj=counters.obj if counting else obj,
        con=counters.con if counting else con,
        grad=(counters.grad if counting else grad) if with_grad else None,
        jac=(counters.jac if counting else jac) if with_jac else None,
        m=2,
        meq=1,
        xl=np.array([0.4, -np.inf]),
        xu=np.array([np.inf, 0.6]),
    )
    return (spec, counters) if counting else spec


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)
