import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from netpoa import lp
from netpoa.lp import LpError, LpProblem, Status, dual_problem, solve


def _highs(p: LpProblem):
    c = p.c if p.sense == "min" else -p.c
    ub_A, ub_b, eq_A, eq_b = [], [], [], []
    for row, rhs, s in zip(p.A, p.b, p.senses):
        if s == "<=":
            ub_A.append(row); ub_b.append(rhs)
        elif s == ">=":
            ub_A.append(-row); ub_b.append(-rhs)
        else:
            eq_A.append(row); eq_b.append(rhs)
    bounds = [(None if np.isinf(l) else l, None) for l in p.lower]
    res = linprog(
        c,
        A_ub=np.array(ub_A) if ub_A else None,
        b_ub=ub_b or None,
        A_eq=np.array(eq_A) if eq_A else None,
        b_eq=eq_b or None,
        bounds=bounds,
        method="highs",
    )
    return res


def _random_lp(rng, m, n, sense="min"):
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(0, 1, size=n)
    senses = tuple(rng.choice(["<=", ">=", "="], size=m, p=[0.5, 0.3, 0.2]))
    b = A @ x0 + np.where(np.array(senses) == "<=", 0.5, np.where(np.array(senses) == ">=", -0.5, 0.0))
    # a box row keeps the problem bounded
    A = np.vstack([A, np.ones(n)])
    b = np.r_[b, 10.0 * n]
    senses = senses + ("<=",)
    c = rng.normal(size=n)
    return LpProblem(c, A, b, senses, sense)


def test_textbook_max():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
    p = LpProblem([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18], ("<=",) * 3, "max")
    sol = solve(p)
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(36.0)
    assert np.allclose(sol.x, [2, 6])
    # shadow prices d obj / d b
    assert np.allclose(sol.duals, [0, 1.5, 1])


def test_infeasible_and_unbounded():
    p = LpProblem([1, 1], [[1, 1], [1, 1]], [1, 3], ("<=", ">="))
    assert solve(p).status is Status.INFEASIBLE
    q = LpProblem([-1, 0], [[1, -1]], [1], (">=",))
    assert solve(q).status is Status.UNBOUNDED


def test_free_variable():
    p = LpProblem([1.0], [[1.0]], [-3.0], (">=",), lower=[-np.inf])
    sol = solve(p)
    assert sol.objective == pytest.approx(-3.0)


def test_rejects_bad_shapes():
    with pytest.raises(LpError):
        LpProblem([1, 2], [[1, 2, 3]], [1], ("<=",))
    with pytest.raises(LpError):
        LpProblem([1], [[1]], [1], ("<",))


@pytest.mark.parametrize("pricing", ["dantzig", "bland"])
@pytest.mark.parametrize("dualize", [False, True])
def test_random_against_highs(pricing, dualize):
    rng = np.random.default_rng(7)
    for _ in range(40):
        m, n = rng.integers(1, 12, size=2)
        p = _random_lp(rng, int(m), int(n), rng.choice(["min", "max"]))
        ref = _highs(p)
        sol = solve(p, pricing=pricing, dualize=dualize)
        if ref.status == 2:
            assert sol.status is Status.INFEASIBLE
            continue
        assert ref.status == 0
        assert sol.status is Status.OPTIMAL
        ref_obj = ref.fun if p.sense == "min" else -ref.fun
        assert sol.objective == pytest.approx(ref_obj, rel=1e-7, abs=1e-7)
        lp.check_optimal(sol)


def test_dual_problem_resolve():
    rng = np.random.default_rng(3)
    solved = 0
    while solved < 20:
        m, n = rng.integers(2, 51, size=2)
        p = _random_lp(rng, int(m), int(n))
        sol = solve(p, dualize=False)
        if not sol.optimal:
            continue
        d, scale = dual_problem(p)
        dsol = solve(d, dualize=False)
        assert dsol.optimal
        assert dsol.objective == pytest.approx(sol.objective, rel=1e-7, abs=1e-7)
        assert np.allclose(scale * dsol.x, sol.duals, atol=1e-6) or lp.residuals(p, sol.x, scale * dsol.x)["gap"] < 1e-6
        solved += 1


def test_text_roundtrip():
    p = LpProblem([1, -2, 0.5], [[1, 1, 0], [0, 1, -1]], [3, -1], ("<=", "="), "max", [0, -np.inf, 0])
    q = lp.from_text(lp.to_text(p))
    assert q.sense == p.sense and q.senses == p.senses
    assert np.array_equal(q.A, p.A) and np.array_equal(q.b, p.b) and np.array_equal(q.c, p.c)
    assert np.array_equal(q.lower, p.lower)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_strong_duality_property(m, n, seed):
    p = _random_lp(np.random.default_rng(seed), m, n)
    sol = solve(p)
    if sol.optimal:
        r = lp.residuals(p, sol.x, sol.duals)
        assert r["gap"] <= 1e-7 * max(1.0, abs(sol.objective))


def test_redundant_equality_rows():
    # row 3 = row 1 + row 2; phase 1 must drop a dependent row, not a basic one
    A = [[1, 1, 0, 0], [0, 0, 1, 1], [1, 1, 1, 1], [1, 0, 1, 0]]
    p = LpProblem([1, 2, 3, 1], A, [1, 2, 3, 1.5], ("=",) * 4)
    sol = solve(p, dualize=False)
    ref = _highs(p)
    assert sol.objective == pytest.approx(ref.fun)
    lp.check_optimal(sol)


def test_text_keeps_empty_columns():
    p = LpProblem([0, 0, 1], [[1, 0, 0]], [1], ("<=",))
    assert lp.from_text(lp.to_text(p)).shape == (1, 3)
