"""Unit tests for forward-difference derivatives."""

import numpy as np
import pytest

from sqpkit import FDOptions, NonFiniteFunctionValue, fd_gradient, fd_jacobian


def test_quadratic_forward_difference_value():
    # (x+h)^2 - x^2 = 2xh + h^2, so the estimate is 2 + h up to rounding.
    g = fd_gradient(lambda x: x[0] ** 2, np.array([1.0]), FDOptions(h_abs=1e-6))
    assert g[0] == pytest.approx(2.0 + 1e-6, abs=1e-9)


def test_constant_function_gives_zero():
    g = fd_gradient(lambda x: 3.5, np.array([0.3, -2.0, 7.0]), FDOptions(h_abs=1e-6))
    np.testing.assert_array_equal(g, np.zeros(3))


def test_example_objective_gradient():
    g = fd_gradient(lambda x: x[0] ** 2 + x[1] ** 2, np.array([2.0, 3.0]), FDOptions(h_abs=1e-6))
    np.testing.assert_allclose(g, [4.0 + 1e-6, 6.0 + 1e-6], atol=1e-8)


def test_affine_jacobian_is_exact():
    con = lambda x: np.array([x[0] + x[1] - 1.0, 3.0 * x[0] + 2.0 * x[1] - 1.0])
    J = fd_jacobian(con, np.array([2.0, 3.0]), 2, FDOptions(h_abs=1e-6))
    np.testing.assert_allclose(J, [[1.0, 1.0], [3.0, 2.0]], atol=1e-9)


def test_empty_jacobian_consumes_no_probes():
    calls = []
    J = fd_jacobian(lambda x: calls.append(1) or np.zeros(0), np.array([1.0, 2.0]), 0)
    assert J.shape == (0, 2)
    assert calls == []


def test_product_jacobian_matches_analytic():
    J = fd_jacobian(lambda x: np.array([x[0] * x[1]]), np.array([2.0, 3.0]), 1, FDOptions(h_abs=1e-6))
    np.testing.assert_allclose(J, [[3.0, 2.0]], atol=1e-5)


def test_exactly_n_probes_beyond_base(rng):
    for n in (1, 3, 6):
        x = rng.normal(size=n)
        calls = {"count": 0}

        def fun(v):
            calls["count"] += 1
            return float(np.sum(v**2))

        fd_gradient(fun, x, FDOptions(h_abs=1e-7))
        assert calls["count"] == n + 1
        calls["count"] = 0
        fd_gradient(fun, x, FDOptions(h_abs=1e-7), f0=float(np.sum(x**2)))
        assert calls["count"] == n


def test_relative_step_formula():
    # h_i = h_rel * max(1, |x_i|): recover the probe offsets from an
    # identity-like function.
    seen = []

    def fun(v):
        seen.append(v.copy())
        return 0.0

    x = np.array([0.0, -3.0, 0.5])
    fd_gradient(fun, x, FDOptions(h_rel=1e-6))
    offsets = [probe - x for probe in seen[1:]]
    steps = np.array([np.abs(off).max() for off in offsets])
    np.testing.assert_allclose(steps, [1e-6, 3e-6, 1e-6], rtol=1e-9)


def test_absolute_step_wins_over_relative():
    seen = []

    def fun(v):
        seen.append(v.copy())
        return 0.0

    fd_gradient(fun, np.array([5.0]), FDOptions(h_abs=1e-4, h_rel=1e-2))
    assert seen[1][0] - 5.0 == pytest.approx(1e-4, rel=1e-12)


def test_error_bound_on_polynomials(rng):
    # |fd - analytic| <= M h / 2 + rounding, with M the second-derivative
    # bound on the probe interval.
    h = 1e-6
    for _ in range(20):
        a = rng.uniform(-2.0, 2.0, size=3)
        x = rng.uniform(-1.5, 1.5, size=3)

        def fun(v):
            return float(np.sum(a * v**3))

        g = fd_gradient(fun, x, FDOptions(h_abs=h))
        analytic = 3.0 * a * x**2
        M = np.abs(6.0 * a * (np.abs(x) + h))
        bound = M * h / 2.0 + 1e-8
        assert np.all(np.abs(g - analytic) <= bound)


def test_nonfinite_probe_raises():
    def fun(v):
        return np.inf if v[0] > 1.0 else float(v[0])

    with pytest.raises(NonFiniteFunctionValue):
        fd_gradient(fun, np.array([1.0]), FDOptions(h_abs=0.5))


def test_step_options_validated():
    with pytest.raises(ValueError):
        FDOptions(h_abs=0.0)
    with pytest.raises(ValueError):
        FDOptions(h_rel=-1e-6)
    with pytest.raises(ValueError):
        FDOptions(h_abs=np.nan)
