from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from einstein_obs.quadrature import (G_WEIGHTS, K_WEIGHTS, NODES, QuadratureError, geometric_breakpoints,
                                     gk_integrate, richardson)


def test_rule_exactness():
    # Kronrod-15 integrates degree 22 exactly, embedded Gauss-7 degree 13
    for deg in range(0, 23):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert K_WEIGHTS @ NODES ** deg == pytest.approx(exact, abs=1e-14)
        if deg <= 13:
            assert G_WEIGHTS @ NODES ** deg == pytest.approx(exact, abs=1e-14)


CASES = [
    (np.exp, 0.0, 1.0, np.e - 1),
    (lambda x: 1 / np.sqrt(x), 1e-12, 1.0, 2.0 - 2e-6),
    (lambda x: x ** -4.0, 1.0, 1e4, (1 - 1e-12) / 3),
    (lambda x: np.sin(x) ** 2, 0.0, 30.0, 15.0 - np.sin(60.0) / 4),
    (lambda x: np.log(x) * x, 1e-9, 2.0, 2 * np.log(2) - 1 - (1e-18 * np.log(1e-9) / 2 - 1e-18 / 4)),
]


@pytest.mark.parametrize("f, a, b, exact", CASES)
def test_against_closed_forms(f, a, b, exact):
    res = gk_integrate(f, a, b, abs_tol=1e-12, rel_tol=1e-12, breakpoints=geometric_breakpoints(a, b))
    assert res.converged
    assert res.value == pytest.approx(exact, rel=1e-11, abs=1e-12)
    assert abs(res.value - exact) <= 10 * max(res.error, 1e-13)


@pytest.mark.parametrize("f, a, b", [(np.exp, 0.0, 1.0), (lambda x: np.sin(x) ** 2, 0.0, 30.0),
                                     (lambda x: np.exp(-x) * np.cos(3 * x), 0.0, 20.0)])
def test_against_scipy(f, a, b):
    res = gk_integrate(f, a, b, abs_tol=1e-12, rel_tol=1e-12)
    ref, _ = quad(f, a, b, epsabs=1e-13, epsrel=1e-13, limit=500)
    assert res.value == pytest.approx(ref, rel=1e-11, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=8), st.floats(0.1, 5))
def test_polynomials_exact(coeffs, b):
    p = np.polynomial.Polynomial(coeffs)
    res = gk_integrate(p, 0.0, b)
    ref = p.integ()(b) - p.integ()(0.0)
    assert res.value == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_budget_and_nonfinite():
    res = gk_integrate(lambda x: np.sin(1 / x), 1e-6, 1.0, abs_tol=1e-15, rel_tol=0, max_intervals=20)
    assert not res.converged and res.notes
    with pytest.raises(QuadratureError):
        gk_integrate(lambda x: np.full_like(x, np.nan), 0.0, 1.0)
    with pytest.raises(ValueError):
        gk_integrate(np.exp, 0.0, np.inf)


def test_richardson_removes_first_order_tail():
    R = [1e2, 1e3, 1e4]
    vals = [2.0 - 3.0 / r for r in R]
    assert richardson(R, vals) == pytest.approx(2.0, abs=1e-14)
    assert richardson([10.0], [1.5]) == 1.5


def test_geometric_breakpoints_monotone():
    bp = geometric_breakpoints(0.5, 1e4)
    assert bp == sorted(bp) and all(0.5 < p < 1e4 for p in bp)
