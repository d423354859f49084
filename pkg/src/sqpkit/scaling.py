"""Multiplicative scaling of variables, objective, and constraints.

Convention: a scaled quantity is ``raw * scaler``.  With variable scalers
``xs``, objective scaler ``os`` and constraint scalers ``cs``::

    x~ = xs * x          f~ = os * f          c~ = cs * c
    l~ = xs * l          u~ = xs * u
    g~_j    = (os / xs_j) * g_j
    J~_ij   = (cs_i / xs_j) * J_ij

The solver iterates entirely in scaled space; user callables always receive
unscaled ``x`` and telemetry stores unscaled values.  Scalers must be finite
and strictly positive: a negative scaler would flip bound ordering and
inequality senses.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, NonPositiveScaler

__all__ = [
    "Scaler",
    "make_scaler",
    "identity_scaler",
    "scale_x",
    "unscale_x",
    "scale_bounds",
    "scale_fc",
    "scale_derivs",
    "unscale_multipliers",
]


@dataclass(frozen=True)
class Scaler:
    """Elementwise scale factors for variables, objective, and constraints."""

    xs: np.ndarray
    os: float
    cs: np.ndarray

    @property
    def n(self):
        return self.xs.shape[0]

    @property
    def m(self):
        return self.cs.shape[0]

    def is_identity(self):
        return self.os == 1.0 and np.all(self.xs == 1.0) and np.all(self.cs == 1.0)


def _broadcast(value, length, what):
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        arr = np.full(length, arr.item())
    if arr.shape != (length,):
        raise DimensionMismatch(f"{what} must be a scalar or a length-{length} vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise NonPositiveScaler(f"{what} entries must be finite and strictly positive")
    return arr


def make_scaler(x_s, o_s, c_s, n, m):
    """Build a :class:`Scaler`, broadcasting scalar factors to vectors."""
    xs = _broadcast(x_s, n, "x scaler")
    cs = _broadcast(c_s, m, "constraint scaler") if m > 0 else np.zeros(0)
    os = float(o_s)
    if not np.isfinite(os) or os <= 0.0:
        raise NonPositiveScaler("objective scaler must be finite and strictly positive")
    return Scaler(xs=xs, os=os, cs=cs)


def identity_scaler(n, m):
    return Scaler(xs=np.ones(n), os=1.0, cs=np.ones(m))


def scale_x(s, x):
    return s.xs * np.asarray(x, dtype=float)


def unscale_x(s, x_scaled):
    return np.asarray(x_scaled, dtype=float) / s.xs


def scale_bounds(s, xl, xu):
    """Scale bound vectors; infinities keep their sign (scalers are > 0)."""
    return s.xs * np.asarray(xl, dtype=float), s.xs * np.asarray(xu, dtype=float)


def scale_fc(s, f, c):
    return s.os * float(f), s.cs * np.asarray(c, dtype=float)


def scale_derivs(s, g, J):
    """Chain-rule scaling of the gradient and Jacobian."""
    g_scaled = (s.os / s.xs) * np.asarray(g, dtype=float)
    J = np.asarray(J, dtype=float)
    J_scaled = (s.cs[:, None] / s.xs[None, :]) * J if J.size else J.reshape(s.m, s.n)
    return g_scaled, J_scaled


def unscale_multipliers(s, lam_scaled):
    """Map scaled-space multipliers to raw space.

    Stationarity in scaled space, ``(os/xs) g = sum_i lam~_i (cs_i/xs) J_i``,
    divides through to ``g = sum_i (lam~_i cs_i / os) J_i``.
    """
    return np.asarray(lam_scaled, dtype=float) * s.cs / s.os
