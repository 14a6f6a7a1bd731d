"""Exact simplex checked against an independent vertex-enumeration oracle."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stackprice.errors import StructuralError
from stackprice.lp import EQ, GE, LE, Constraint, LinearProgram, dual_of, make_lp, solve_lp


def _solve_square(rows, rhs):
    """Gauss-Jordan over fractions; ``None`` when singular."""
    n = len(rows)
    a = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def vertex_oracle(obj, rows, rhs):
    """Max of ``obj . x`` over ``rows x <= rhs`` (a bounded polytope) by trying every vertex."""
    n = len(obj)
    best = None
    for subset in combinations(range(len(rows)), n):
        x = _solve_square([rows[i] for i in subset], [rhs[i] for i in subset])
        if x is None:
            continue
        if all(sum(a * b for a, b in zip(r, x)) <= b for r, b in zip(rows, rhs)):
            v = sum(c * xi for c, xi in zip(obj, x))
            best = v if best is None or v > best else best
    return best


def test_trivial_bound():
    out = solve_lp(make_lp({"p": 1}, [({"p": 1}, LE, 2)]))
    assert out.status == "optimal" and out.optimum == 2


def braess_lp(nonneg):
    cons = [
        ({"p1": 1, "p2": 1}, LE, 1),
        ({"p2": 1, "p3": 1}, LE, 1),
        ({"p1": 1, "p2": 1, "p3": 1}, LE, 3),
    ]
    lower = {v: 0 for v in ("p1", "p2", "p3")} if nonneg else None
    return make_lp({"p1": 1, "p2": 1, "p3": 1}, cons, lower=lower)


def test_braess_profile_lp():
    assert solve_lp(braess_lp(True)).optimum == 2
    free = solve_lp(braess_lp(False))
    assert free.optimum == 3
    lp = braess_lp(False)
    assert lp.constraints[2].lhs(free.solution) == 3


def test_dual_trivial():
    lp = make_lp({"x": 0}, [({"x": 1}, LE, 1)])
    assert solve_lp(dual_of(lp)).optimum == 0


def test_dual_matches_on_braess():
    for nonneg in (True, False):
        lp = braess_lp(nonneg)
        assert solve_lp(dual_of(lp)).optimum == solve_lp(lp).optimum


def test_infeasible_certificate():
    lp = make_lp({"x": 1}, [({"x": 1}, LE, 1), ({"x": 1}, GE, 2)])
    out = solve_lp(lp)
    assert out.status == "infeasible"
    y = out.certificate
    # Farkas: <= rows carry y >= 0, >= rows y <= 0, y^T A = 0 and y^T b < 0.
    for i, c in enumerate(lp.constraints):
        assert (y.get(i, 0) >= 0) if c.relation == LE else (y.get(i, 0) <= 0)
    combo = sum(y.get(i, 0) * c.coeffs.get("x", 0) for i, c in enumerate(lp.constraints))
    rhs = sum(y.get(i, 0) * c.rhs for i, c in enumerate(lp.constraints))
    assert combo == 0 and rhs < 0


def test_unbounded_ray():
    lp = make_lp({"x": 1, "y": 1}, [({"x": 1, "y": -1}, LE, 1)], lower={"x": 0, "y": 0})
    out = solve_lp(lp)
    assert out.status == "unbounded"
    point, ray = out.certificate["point"], out.certificate["ray"]
    assert lp.is_feasible(point)
    assert lp.is_feasible({k: point[k] + 10 * ray.get(k, 0) for k in lp.variables})
    assert lp.value(ray) - lp.constant > 0


def test_equality_and_min():
    lp = make_lp({"x": 1, "y": 2}, [({"x": 1, "y": 1}, EQ, 3)], lower={"x": 0, "y": 0}, sense="min")
    out = solve_lp(lp)
    assert out.optimum == 3 and out.solution == {"x": 3, "y": 0}


def test_malformed():
    with pytest.raises(StructuralError):
        LinearProgram(("x",), {"y": 1})
    with pytest.raises(StructuralError):
        Constraint({"x": 1}, "<", 0)


def test_deterministic():
    lp = braess_lp(False)
    a, b = solve_lp(lp), solve_lp(lp)
    assert a.solution == b.solution and a.pivots == b.pivots


coef = st.integers(-4, 4)


@st.composite
def bounded_lps(draw):
    n = draw(st.integers(1, 3))
    m = draw(st.integers(1, 4))
    obj = [draw(coef) for _ in range(n)]
    rows = [[draw(coef) for _ in range(n)] for _ in range(m)]
    rhs = [Fraction(draw(st.integers(-3, 6)), draw(st.integers(1, 3))) for _ in range(m)]
    # Box keeps every instance bounded so the vertex oracle applies.
    for i in range(n):
        e = [0] * n
        e[i] = 1
        rows.append(e)
        rhs.append(Fraction(5))
        rows.append([-x for x in e])
        rhs.append(Fraction(5))
    return obj, rows, rhs


def _as_lp(obj, rows, rhs):
    names = [f"x{i}" for i in range(len(obj))]
    cons = [({names[j]: r[j] for j in range(len(obj))}, LE, b) for r, b in zip(rows, rhs)]
    return make_lp({names[j]: obj[j] for j in range(len(obj))}, cons, variables=names)


@given(bounded_lps())
def test_matches_vertex_oracle(data):
    obj, rows, rhs = data
    expected = vertex_oracle(obj, rows, rhs)
    out = solve_lp(_as_lp(obj, rows, rhs))
    if expected is None:
        assert out.status == "infeasible"
    else:
        assert out.status == "optimal" and out.optimum == expected


@given(bounded_lps())
def test_strong_duality(data):
    lp = _as_lp(*data)
    primal, dual = solve_lp(lp), solve_lp(dual_of(lp))
    if primal.status == "optimal":
        assert dual.status == "optimal" and dual.optimum == primal.optimum
    else:
        assert dual.status in ("unbounded", "infeasible")


@given(bounded_lps())
def test_optimal_duals_certify(data):
    """Weak duality through the returned multipliers: b . y equals the optimum."""
    obj, rows, rhs = data
    out = solve_lp(_as_lp(obj, rows, rhs))
    if out.status != "optimal":
        return
    y = [out.certificate.get(i, 0) for i in range(len(rows))]
    assert all(v >= 0 for v in y)
    assert sum(a * b for a, b in zip(y, rhs)) == out.optimum
    for j in range(len(obj)):
        assert sum(y[i] * rows[i][j] for i in range(len(rows))) == obj[j]


def test_random_three_by_three_duality():
    rng = random.Random(3)
    for _ in range(30):
        x0 = [Fraction(rng.randint(0, 3)) for _ in range(3)]
        rows = [[rng.randint(0, 4) for _ in range(3)] for _ in range(3)]
        rhs = [sum(a * b for a, b in zip(r, x0)) + rng.randint(0, 3) for r in rows]
        lp = make_lp({"a": rng.randint(-2, 3), "b": rng.randint(-2, 3), "c": 1},
                     [({"a": r[0], "b": r[1], "c": r[2]}, LE, b) for r, b in zip(rows, rhs)],
                     lower={"a": 0, "b": 0, "c": 0}, upper={"a": 9, "b": 9, "c": 9})
        p, d = solve_lp(lp), solve_lp(dual_of(lp))
        assert p.status == d.status == "optimal" and p.optimum == d.optimum
