"""First-order forward-difference derivative approximations.

The step for coordinate ``i`` is ``h_abs`` when an absolute step is set,
otherwise ``h_rel * max(1, |x_i|)``.  When both are set the absolute step
wins.  When neither is set a relative step of ``sqrt(machine eps)`` is used.
Probe points are *not* clipped to variable bounds; callables must tolerate
evaluation slightly outside them.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import NonFiniteFunctionValue

__all__ = ["FDOptions", "DEFAULT_REL_STEP", "fd_gradient", "fd_jacobian"]

DEFAULT_REL_STEP = float(np.sqrt(np.finfo(float).eps))


@dataclass(frozen=True)
class FDOptions:
    """Forward-difference step configuration.

    Attributes
    ----------
    h_abs : float, optional
        Absolute step size, used for every coordinate.
    h_rel : float, optional
        Relative step size; the coordinate step is ``h_rel * max(1, |x_i|)``.
    """

    h_abs: float | None = None
    h_rel: float | None = None

    def __post_init__(self):
        for name, value in (("h_abs", self.h_abs), ("h_rel", self.h_rel)):
            if value is not None and not (np.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")

    def steps(self, x):
        """Per-coordinate steps at the probe base point ``x``."""
        x = np.asarray(x, dtype=float)
        if self.h_abs is not None:
            return np.full(x.shape, float(self.h_abs))
        rel = self.h_rel if self.h_rel is not None else DEFAULT_REL_STEP
        return rel * np.maximum(1.0, np.abs(x))


def _check_finite(value, where):
    if not np.all(np.isfinite(value)):
        raise NonFiniteFunctionValue(f"non-finite value returned at {where}")


def fd_gradient(fun, x, opts=None, f0=None):
    """Forward-difference gradient of a scalar function.

    Parameters
    ----------
    fun : callable
        Maps a length-n vector to a finite scalar.
    x : array_like, shape (n,)
        Base point.
    opts : FDOptions, optional
        Step configuration; defaults to the relative-step default.
    f0 : float, optional
        Known value of ``fun(x)``.  Passing it saves the base evaluation,
        so exactly n probe calls are made instead of n + 1.

    Returns
    -------
    g : numpy.ndarray, shape (n,)
    """
    opts = opts if opts is not None else FDOptions()
    x = np.asarray(x, dtype=float)
    if f0 is None:
        f0 = float(fun(x))
        _check_finite(f0, f"x={x}")
    h = opts.steps(x)
    g = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        xp = x.copy()
        xp[i] += h[i]
        fp = float(fun(xp))
        _check_finite(fp, f"probe x={xp}")
        g[i] = (fp - f0) / h[i]
    return g


def fd_jacobian(con, x, m, opts=None, c0=None):
    """Forward-difference Jacobian of a vector function.

    Column ``i`` is ``(con(x + h_i e_i) - con(x)) / h_i``.  With ``c0``
    supplied, exactly n probe calls are made.

    Returns
    -------
    J : numpy.ndarray, shape (m, n)
    """
    opts = opts if opts is not None else FDOptions()
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if m == 0:
        return np.zeros((0, n))
    if c0 is None:
        c0 = np.asarray(con(x), dtype=float).reshape(-1)
        _check_finite(c0, f"x={x}")
    J = np.empty((m, n))
    h = opts.steps(x)
    for i in range(n):
        xp = x.copy()
        xp[i] += h[i]
        cp = np.asarray(con(xp), dtype=float).reshape(-1)
        _check_finite(cp, f"probe x={xp}")
        J[:, i] = (cp - c0) / h[i]
    return J
