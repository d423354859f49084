"""Unit tests for the constrained least-squares chain."""

import numpy as np
import pytest

from sqpkit import (
    Infeasible,
    IterationLimit,
    QpSubproblem,
    RankDeficient,
    ldp,
    lsei,
    lsi,
    nnls,
    solve_qp,
)
from _oracles import enum_constrained_lstsq, enum_ldp, enum_nnls


class TestNnls:
    def test_projection_onto_orthant(self):
        x, rnorm = nnls(np.eye(2), np.array([1.0, -1.0]))
        np.testing.assert_allclose(x, [1.0, 0.0], atol=1e-14)
        assert rnorm == pytest.approx(1.0, abs=1e-14)

    def test_interior_solution(self):
        x, rnorm = nnls(np.eye(2), np.array([1.0, 2.0]))
        np.testing.assert_allclose(x, [1.0, 2.0], atol=1e-14)
        assert rnorm == pytest.approx(0.0, abs=1e-14)

    def test_random_instances_match_enumeration(self, rng):
        for _ in range(60):
            A = rng.normal(size=(4, 3))
            b = rng.normal(size=4)
            x, rnorm = nnls(A, b)
            expected = enum_nnls(A, b)
            np.testing.assert_allclose(x, expected, atol=1e-8)
            assert rnorm == pytest.approx(np.linalg.norm(A @ x - b), abs=1e-12)

    def test_kkt_residual_bounds(self, rng):
        for _ in range(40):
            p, q = int(rng.integers(1, 6)), int(rng.integers(1, 6))
            A = rng.normal(size=(p, q))
            b = rng.normal(size=p)
            x, _ = nnls(A, b)
            tol = 1e-10 * max(1.0, np.linalg.norm(A.T @ A))
            w = A.T @ (b - A @ x)
            assert np.all(x >= 0.0)
            assert np.all(w <= tol)
            assert np.all(np.abs(w[x > 0]) <= tol)

    def test_iteration_guard(self):
        A = np.array([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(IterationLimit):
            nnls(A, np.array([1.0, 1.0]), maxiter=0)


class TestLdp:
    def test_nearest_point_on_halfline(self):
        np.testing.assert_allclose(ldp(np.array([[1.0]]), np.array([2.0])), [2.0], atol=1e-12)

    def test_origin_feasible(self):
        np.testing.assert_allclose(ldp(np.array([[1.0]]), np.array([-1.0])), [0.0], atol=1e-12)

    def test_incompatible_constraints(self):
        with pytest.raises(Infeasible):
            ldp(np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]))

    def test_random_instances_match_enumeration(self, rng):
        solved = 0
        for _ in range(80):
            r, q = int(rng.integers(1, 6)), int(rng.integers(1, 6))
            G = rng.normal(size=(r, q))
            h = rng.normal(size=r)
            expected = enum_ldp(G, h)
            if expected is None:
                with pytest.raises(Infeasible):
                    ldp(G, h)
                continue
            x = ldp(G, h)
            np.testing.assert_allclose(x, expected, atol=1e-8)
            assert np.min(G @ x - h) >= -1e-8
            solved += 1
        assert solved > 10

    def test_feasibility_margin(self, rng):
        for _ in range(25):
            G = rng.normal(size=(4, 2))
            h = rng.normal(size=4) - 1.0
            try:
                x = ldp(G, h)
            except Infeasible:
                continue
            assert np.min(G @ x - h) >= -1e-8


class TestLsi:
    def test_projection_onto_halfspace(self):
        x = lsi(np.eye(2), np.zeros(2), np.array([[1.0, 0.0]]), np.array([1.0]))
        np.testing.assert_allclose(x, [1.0, 0.0], atol=1e-10)

    def test_vacuous_inequalities_reduce_to_lstsq(self, rng):
        A = rng.normal(size=(5, 3))
        b = rng.normal(size=5)
        x = lsi(A, b, np.zeros((0, 3)), np.zeros(0))
        expected = np.linalg.lstsq(A, b, rcond=None)[0]
        np.testing.assert_allclose(x, expected, atol=1e-10)

    def test_rank_deficient_raises(self):
        A = np.array([[1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(RankDeficient):
            lsi(A, np.array([1.0, 2.0]), np.zeros((0, 2)), np.zeros(0))

    def test_random_instances_match_enumeration(self, rng):
        for _ in range(60):
            q = int(rng.integers(1, 5))
            p = q + int(rng.integers(0, 3))
            r = int(rng.integers(1, 5))
            A = rng.normal(size=(p, q)) + np.eye(p, q)
            b = rng.normal(size=p)
            G = rng.normal(size=(r, q))
            h = rng.normal(size=r)
            expected = enum_constrained_lstsq(A, b, np.zeros((0, q)), np.zeros(0), G, h)
            if expected is None:
                with pytest.raises(Infeasible):
                    lsi(A, b, G, h)
                continue
            np.testing.assert_allclose(lsi(A, b, G, h), expected, atol=1e-8)


class TestLsei:
    def test_symmetric_equality(self):
        x, lam = lsei(np.eye(2), np.zeros(2), np.array([[1.0, 1.0]]), np.array([1.0]),
                      np.zeros((0, 2)), np.zeros(0))
        np.testing.assert_allclose(x, [0.5, 0.5], atol=1e-12)
        # Stationarity A'(Ax-b) = E'nu: x = [1,1]' nu gives nu = 0.5.
        assert lam[0] == pytest.approx(0.5, abs=1e-12)

    def test_vacuous_equalities_reduce_to_lsi(self, rng):
        A = rng.normal(size=(4, 3)) + np.eye(4, 3)
        b = rng.normal(size=4)
        G = rng.normal(size=(2, 3))
        h = G @ rng.normal(size=3) - 0.5
        x, _ = lsei(A, b, np.zeros((0, 3)), np.zeros(0), G, h)
        np.testing.assert_allclose(x, lsi(A, b, G, h), atol=1e-12)

    def test_rank_deficient_equalities(self):
        E = np.array([[1.0, 1.0], [2.0, 2.0]])
        with pytest.raises(RankDeficient):
            lsei(np.eye(2), np.zeros(2), E, np.array([1.0, 3.0]), np.zeros((0, 2)), np.zeros(0))

    def test_random_instances_match_enumeration(self, rng):
        for _ in range(60):
            q = int(rng.integers(2, 5))
            k = int(rng.integers(0, q))
            r = int(rng.integers(0, 5))
            p = q + int(rng.integers(0, 2))
            A = rng.normal(size=(p, q)) + np.eye(p, q)
            b = rng.normal(size=p)
            E = rng.normal(size=(k, q))
            f = rng.normal(size=k)
            G = rng.normal(size=(r, q))
            h = rng.normal(size=r)
            expected = enum_constrained_lstsq(A, b, E, f, G, h)
            if expected is None:
                with pytest.raises(Infeasible):
                    lsei(A, b, E, f, G, h)
                continue
            x, lam = lsei(A, b, E, f, G, h)
            np.testing.assert_allclose(x, expected, atol=1e-8)
            if k:
                assert np.linalg.norm(E @ x - f, ord=np.inf) <= 1e-10
            # Multiplier properties: mu >= 0 and stationarity residual small.
            mu = lam[k:]
            assert np.min(mu, initial=0.0) >= -1e-10
            resid = A.T @ (A @ x - b)
            if k:
                resid = resid - E.T @ lam[:k]
            if r:
                resid = resid - G.T @ mu
            assert np.linalg.norm(resid) <= 1e-7 * max(1.0, np.linalg.norm(A.T @ b))


class TestSolveQp:
    def _example_qp(self):
        # The bundled example problem's QP at its optimum (identity model
        # Hessian): g = (1,1), one tight equality row, one slack inequality,
        # bound gaps dl = (-0.1, -inf), du = (inf, 0.1).
        return QpSubproblem(
            L=np.eye(2),
            g=np.array([1.0, 1.0]),
            Ceq=np.array([[1.0, 1.0]]),
            deq=np.array([0.0]),
            Cin=np.array([[3.0, 2.0]]),
            din=np.array([1.5]),
            dl=np.array([-0.1, -np.inf]),
            du=np.array([np.inf, 0.1]),
        )

    def test_kkt_point_of_example_problem(self):
        sol = solve_qp(self._example_qp())
        np.testing.assert_allclose(sol.d, [0.0, 0.0], atol=1e-10)
        # Convention grad f = sum lam_i grad c_i: (1,1) = lam * (1,1).
        assert sol.lam[0] == pytest.approx(1.0, abs=1e-10)
        assert sol.lam[1] == pytest.approx(0.0, abs=1e-10)
        assert not sol.relaxed

    def test_newton_step_without_constraints(self):
        qp = QpSubproblem(
            L=np.eye(2), g=np.array([-1.0, 0.0]),
            Ceq=np.zeros((0, 2)), deq=np.zeros(0),
            Cin=np.zeros((0, 2)), din=np.zeros(0),
            dl=np.full(2, -np.inf), du=np.full(2, np.inf),
        )
        sol = solve_qp(qp)
        np.testing.assert_allclose(sol.d, [1.0, 0.0], atol=1e-12)

    def test_incompatible_linearization_relaxes(self):
        # Equality wants d = -5, step bounds allow |d| <= 1: with weight
        # w = 100 |g| + 1 = 1 the relaxed optimum solves
        # min 1/2 d^2 + 1/2 (xi-1)^2 s.t. d + 5 xi = 0, giving xi = 1/26.
        qp = QpSubproblem(
            L=np.eye(1), g=np.array([0.0]),
            Ceq=np.array([[1.0]]), deq=np.array([5.0]),
            Cin=np.zeros((0, 1)), din=np.zeros(0),
            dl=np.array([-1.0]), du=np.array([1.0]),
        )
        sol = solve_qp(qp)
        assert sol.relaxed
        assert np.isfinite(sol.d).all()
        assert sol.d[0] == pytest.approx(-5.0 / 26.0, abs=1e-10)
        assert sol.relax_value == pytest.approx(1.0 / 26.0, abs=1e-10)
        # Relaxed equality holds and the step bounds are respected.
        assert sol.d[0] + 5.0 * sol.relax_value == pytest.approx(0.0, abs=1e-10)
        assert -1.0 - 1e-10 <= sol.d[0] <= 1.0 + 1e-10

    def test_direction_respects_step_bounds(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 5))
            M = rng.normal(size=(n, n))
            L = np.linalg.cholesky(M @ M.T + 0.5 * np.eye(n))
            g = rng.normal(size=n)
            dl = -rng.uniform(0.1, 2.0, size=n)
            du = rng.uniform(0.1, 2.0, size=n)
            qp = QpSubproblem(L=L, g=g, Ceq=np.zeros((0, n)), deq=np.zeros(0),
                              Cin=np.zeros((0, n)), din=np.zeros(0), dl=dl, du=du)
            sol = solve_qp(qp)
            assert np.all(sol.d >= dl - 1e-10)
            assert np.all(sol.d <= du + 1e-10)

    def test_unrelaxed_equalities_hold(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 5))
            meq = int(rng.integers(1, n))
            M = rng.normal(size=(n, n))
            L = np.linalg.cholesky(M @ M.T + 0.5 * np.eye(n))
            Ceq = rng.normal(size=(meq, n))
            # Consistent linearization: the equality target is reachable
            # within generous step bounds.
            d_target = rng.uniform(-0.5, 0.5, size=n)
            deq = -(Ceq @ d_target)
            qp = QpSubproblem(L=L, g=rng.normal(size=n), Ceq=Ceq, deq=deq,
                              Cin=np.zeros((0, n)), din=np.zeros(0),
                              dl=np.full(n, -10.0), du=np.full(n, 10.0))
            sol = solve_qp(qp)
            assert not sol.relaxed
            assert np.linalg.norm(Ceq @ sol.d + deq, ord=np.inf) <= 1e-8
