"""Constrained linear least-squares chain: NNLS -> LDP -> LSI -> LSEI -> QP.

Each stage reduces to the previous one:

* ``nnls``: min ||Ax - b||  s.t. x >= 0, by an active-set method.
* ``ldp``:  min ||x||       s.t. Gx >= h, via the NNLS dual.
* ``lsi``:  min ||Ax - b||  s.t. Gx >= h, via QR of A and LDP.
* ``lsei``: min ||Ax - b||  s.t. Ex = f, Gx >= h, eliminating the
  equalities through an orthogonal basis of null(E), then LSI.
* ``solve_qp``: min 1/2 d'Bd + g'd subject to linearized constraints and
  step bounds, posed as LSEI with A = L', b = -inv(L) g where B = L L'.

Multiplier sign convention: at a KKT point ``grad f = sum_i lambda_i grad
c_i`` with ``lambda_i >= 0`` for active inequalities.

Rank tolerance: a pivot is treated as dependent when its magnitude falls
below ``1e-12`` times the largest pivot.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import Infeasible, IterationLimit, RankDeficient, Unsolvable

__all__ = ["QpSubproblem", "QpSolution", "nnls", "ldp", "lsi", "lsei", "solve_qp"]

_RANK_TOL = 1e-12
_FEAS_TOL = 1e-10


@dataclass(frozen=True)
class QpSubproblem:
    """Data of one quadratic subproblem in scaled space.

    ``L`` is the lower-triangular Cholesky factor of the positive-definite
    model Hessian ``B = L L'``.  The linearized constraints are
    ``Ceq d + deq = 0`` and ``Cin d + din >= 0``; ``dl <= d <= du`` are the
    step bounds (entries may be infinite; infinite ones are dropped).
    """

    L: np.ndarray
    g: np.ndarray
    Ceq: np.ndarray
    deq: np.ndarray
    Cin: np.ndarray
    din: np.ndarray
    dl: np.ndarray
    du: np.ndarray


@dataclass(frozen=True)
class QpSolution:
    """Search direction, multipliers (equalities first), relaxation state."""

    d: np.ndarray
    lam: np.ndarray
    relaxed: bool
    relax_value: float


def nnls(A, b, maxiter=None):
    """Nonnegative least squares by the Lawson-Hanson active-set method.

    Minimizes ``||A x - b||_2`` subject to ``x >= 0``.

    Parameters
    ----------
    A : array_like, shape (p, q)
    b : array_like, shape (p,)
    maxiter : int, optional
        Inner-iteration guard against active-set cycling; default ``3 q``.

    Returns
    -------
    x : numpy.ndarray, shape (q,)
    rnorm : float
        ``||A x - b||_2`` at the solution.

    Raises
    ------
    IterationLimit
        If the iteration guard trips.

    Notes
    -----
    At the solution the dual vector ``w = A'(b - A x)`` satisfies
    ``w_i <= tol`` for all i and ``|w_i| <= tol`` wherever ``x_i > 0``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    p, q = A.shape
    if b.shape[0] != p:
        raise ValueError(f"b must have length {p}, got {b.shape[0]}")
    if maxiter is None:
        maxiter = 3 * q

    eps = np.finfo(float).eps
    tol = 10.0 * eps * max(p, q) * max(np.linalg.norm(A), 1.0) * max(np.linalg.norm(b), 1.0)

    x = np.zeros(q)
    passive = np.zeros(q, dtype=bool)
    iters = 0
    while True:
        w = A.T @ (b - A @ x)
        w_candidates = np.where(passive, -np.inf, w)
        if passive.all() or np.max(w_candidates) <= tol:
            break
        passive[int(np.argmax(w_candidates))] = True
        while passive.any():
            iters += 1
            if iters > maxiter:
                raise IterationLimit(f"nnls exceeded {maxiter} active-set iterations")
            z = np.zeros(q)
            z[passive] = np.linalg.lstsq(A[:, passive], b, rcond=None)[0]
            if np.min(z[passive]) > 0.0:
                x = z
                break
            # Step toward z until the first passive component hits zero.
            blocking = passive & (z <= 0.0)
            denom = x[blocking] - z[blocking]
            ratios = np.divide(x[blocking], denom, out=np.zeros_like(denom), where=denom > 0.0)
            alpha = np.min(ratios)
            x = x + alpha * (z - x)
            passive &= x > tol
            x[~passive] = 0.0
    return x, float(np.linalg.norm(A @ x - b))


def _ldp(G, h):
    """LDP core returning the solution and its inequality multipliers."""
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float).reshape(-1)
    r, q = G.shape
    if r == 0:
        return np.zeros(q), np.zeros(0)
    # Dual NNLS system (Lawson-Hanson): E = [G'; h'], f = e_{q+1}.
    E = np.vstack([G.T, h[None, :]])
    f = np.zeros(q + 1)
    f[-1] = 1.0
    w, rnorm = nnls(E, f)
    # ||r||^2 = -r_last; the constraints are compatible iff rnorm > 0.
    if rnorm <= np.sqrt(np.finfo(float).eps):
        raise Infeasible("incompatible inequality constraints in LDP")
    resid = E @ w - f
    x = -resid[:q] / resid[-1]
    lam = w / (rnorm * rnorm)
    return x, lam


def ldp(G, h):
    """Least distance programming: min ``||x||_2`` s.t. ``G x >= h``.

    Solved through its NNLS dual.  Raises :class:`Infeasible` when the
    constraints are incompatible.
    """
    x, _ = _ldp(G, h)
    return x


def _check_full_column_rank(R, what):
    diag = np.abs(np.diag(R))
    if diag.size == 0:
        return
    if np.min(diag) < _RANK_TOL * np.max(diag) or np.max(diag) == 0.0:
        raise RankDeficient(f"{what} is rank deficient at tolerance {_RANK_TOL}")


def _lsi(A, b, G, h):
    """LSI core returning the solution and inequality multipliers."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    G = np.atleast_2d(np.asarray(G, dtype=float)) if np.size(G) else np.zeros((0, A.shape[1]))
    h = np.asarray(h, dtype=float).reshape(-1)
    p, q = A.shape
    if p < q:
        raise RankDeficient(f"A has shape {A.shape}; full column rank needs p >= q")
    Q, R = np.linalg.qr(A)
    _check_full_column_rank(R, "A")
    Qtb = Q.T @ b
    if G.shape[0] == 0:
        return np.linalg.solve(R, Qtb), np.zeros(0)
    # Substitute u = R x - Q'b: objective becomes min ||u||.
    GRinv = np.linalg.solve(R.T, G.T).T
    u, lam = _ldp(GRinv, h - GRinv @ Qtb)
    x = np.linalg.solve(R, u + Qtb)
    return x, lam


def lsi(A, b, G, h):
    """Least squares with inequalities: min ``||Ax - b||`` s.t. ``Gx >= h``.

    ``A`` must have full column rank (checked at tolerance).  The problem
    is mapped to LDP by a QR factorization of ``A``.
    """
    x, _ = _lsi(A, b, G, h)
    return x


def lsei(A, b, E, f, G, h):
    """Least squares with equalities and inequalities.

    Minimizes ``||A x - b||_2`` subject to ``E x = f`` and ``G x >= h``.
    The equalities are eliminated through a complete QR factorization of
    ``E'``: with ``x = x_p + Z z`` (``Z`` an orthonormal basis of null(E),
    ``x_p`` the minimum-norm particular solution) the problem reduces to an
    LSI in ``z``.

    Returns
    -------
    x : numpy.ndarray, shape (q,)
    lam : numpy.ndarray, shape (k + r,)
        Multipliers for the rows of ``E`` followed by the rows of ``G``,
        in the convention ``A'(Ax - b) = E' lam_eq + G' lam_in``.

    Raises
    ------
    RankDeficient
        If ``E`` lacks full row rank (or ``A`` full column rank on the
        reduced problem).
    Infeasible
        If the constraints are incompatible.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    E = np.atleast_2d(np.asarray(E, dtype=float)) if np.size(E) else np.zeros((0, A.shape[1]))
    f = np.asarray(f, dtype=float).reshape(-1)
    G = np.atleast_2d(np.asarray(G, dtype=float)) if np.size(G) else np.zeros((0, A.shape[1]))
    h = np.asarray(h, dtype=float).reshape(-1)
    q = A.shape[1]
    k, r = E.shape[0], G.shape[0]

    if k == 0:
        x, mu = _lsi(A, b, G, h)
        return x, mu

    if k > q:
        raise RankDeficient(f"E has {k} rows but only {q} columns; cannot have full row rank")
    Qe, Re = np.linalg.qr(E.T, mode="complete")
    R1 = Re[:k, :k]
    _check_full_column_rank(R1, "E")
    # E = R1' Q1', so E x = f gives Q1' x = inv(R1') f.
    y1 = np.linalg.solve(R1.T, f)
    xp = Qe[:, :k] @ y1
    Z = Qe[:, k:]

    if Z.shape[1] == 0:
        x = xp
        if r and np.any(G @ x < h - _FEAS_TOL * max(1.0, float(np.max(np.abs(h), initial=0.0)))):
            raise Infeasible("equalities fully determine x but violate an inequality")
        mu = np.zeros(r)
    else:
        z, mu = _lsi(A @ Z, b - A @ xp, G @ Z if r else np.zeros((0, Z.shape[1])), h - (G @ xp if r else np.zeros(0)))
        x = xp + Z @ z

    # Equality multipliers from stationarity: E' nu = A'(Ax - b) - G' mu.
    rhs = A.T @ (A @ x - b)
    if r:
        rhs = rhs - G.T @ mu
    nu = np.linalg.solve(R1, Qe[:, :k].T @ rhs)
    return x, np.concatenate([nu, mu])


def _bound_rows(n, dl, du, extra_cols=0):
    """Inequality rows for finite step bounds, optionally zero-padded."""
    rows, rhs = [], []
    for j in range(n):
        if np.isfinite(dl[j]):
            e = np.zeros(n + extra_cols)
            e[j] = 1.0
            rows.append(e)
            rhs.append(dl[j])
        if np.isfinite(du[j]):
            e = np.zeros(n + extra_cols)
            e[j] = -1.0
            rows.append(e)
            rhs.append(-du[j])
    if rows:
        return np.vstack(rows), np.asarray(rhs)
    return np.zeros((0, n + extra_cols)), np.zeros(0)


def solve_qp(qp):
    """Solve one QP subproblem through the LSEI chain.

    Minimizes ``1/2 d'Bd + g'd`` subject to ``Ceq d + deq = 0``,
    ``Cin d + din >= 0`` and ``dl <= d <= du``.  With ``B = L L'`` this is
    the least-squares problem ``min ||L'd + inv(L) g||``.

    When the linearized constraints are incompatible, the subproblem is
    re-solved with the constraint right-hand sides scaled by a relaxation
    variable ``xi`` in [0, 1] appended to the unknowns and pushed toward 1
    with weight ``100 ||g|| + 1``; the returned solution then has
    ``relaxed=True``.

    Returns
    -------
    QpSolution
        ``lam`` holds multipliers for the original constraints in problem
        order (equalities first); bound multipliers are not reported.

    Raises
    ------
    Unsolvable
        If the relaxed subproblem fails as well.
    """
    L = np.asarray(qp.L, dtype=float)
    g = np.asarray(qp.g, dtype=float).reshape(-1)
    n = g.shape[0]
    meq = qp.Ceq.shape[0] if np.size(qp.Ceq) else 0
    min_ = qp.Cin.shape[0] if np.size(qp.Cin) else 0

    A = L.T
    b = -np.linalg.solve(L, g)
    Cin = np.atleast_2d(np.asarray(qp.Cin, dtype=float)) if min_ else np.zeros((0, n))
    din = np.asarray(qp.din, dtype=float).reshape(-1)
    Ceq = np.atleast_2d(np.asarray(qp.Ceq, dtype=float)) if meq else np.zeros((0, n))
    deq = np.asarray(qp.deq, dtype=float).reshape(-1)

    Gb, hb = _bound_rows(n, qp.dl, qp.du)
    G = np.vstack([Cin, Gb])
    h = np.concatenate([-din, hb])

    try:
        x, lam_all = lsei(A, b, Ceq, -deq, G, h)
        lam = np.concatenate([lam_all[:meq], lam_all[meq:meq + min_]])
        return QpSolution(d=x, lam=lam, relaxed=False, relax_value=1.0)
    except (Infeasible, RankDeficient, IterationLimit):
        pass

    # Relaxed subproblem in the unknowns (d, xi).
    weight = 100.0 * float(np.linalg.norm(g)) + 1.0
    A2 = np.zeros((n + 1, n + 1))
    A2[:n, :n] = L.T
    A2[n, n] = weight
    b2 = np.concatenate([b, [weight]])
    E2 = np.hstack([Ceq, deq[:, None]]) if meq else np.zeros((0, n + 1))
    f2 = np.zeros(meq)
    Gin2 = np.hstack([Cin, din[:, None]]) if min_ else np.zeros((0, n + 1))
    Gb2, hb2 = _bound_rows(n, qp.dl, qp.du, extra_cols=1)
    xi_lo = np.zeros(n + 1)
    xi_lo[n] = 1.0
    xi_hi = np.zeros(n + 1)
    xi_hi[n] = -1.0
    G2 = np.vstack([Gin2, Gb2, xi_lo[None, :], xi_hi[None, :]])
    h2 = np.concatenate([np.zeros(min_), hb2, [0.0, -1.0]])
    try:
        x2, lam_all = lsei(A2, b2, E2, f2, G2, h2)
    except (Infeasible, RankDeficient, IterationLimit) as exc:
        raise Unsolvable(f"QP subproblem infeasible even after relaxation: {exc}") from exc
    d = x2[:n]
    xi = float(np.clip(x2[n], 0.0, 1.0))
    lam = np.concatenate([lam_all[:meq], lam_all[meq:meq + min_]])
    return QpSolution(d=d, lam=lam, relaxed=True, relax_value=xi)
