from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stackprice.errors import StructuralError
from stackprice.generators import braess_basic, path_graph, random_instance, triangle_network
from stackprice.model import (
    ALL_ZERO,
    FIXED_ONLY,
    Follower,
    Instance,
    PriceVector,
    Resource,
    leader_profit,
    prune_redundant,
    revenue,
    set_cost,
    shortest_label,
)
from stackprice.rational import INF

P1, P2, P3 = frozenset({0, 1, 2}), frozenset({0, 4}), frozenset({3, 2})


def braess_prices(a, b, c):
    return braess_basic().prices({0: a, 1: b, 2: c})


def test_set_cost_braess_paths():
    inst = braess_basic()
    p = braess_prices(3, -3, 3)
    assert set_cost(inst, P1, p) == 3
    assert set_cost(inst, P2, p) == 4
    assert set_cost(inst, P3, p) == 4
    assert set_cost(inst, (), p) == 0


def test_set_cost_unknown_resource():
    inst = braess_basic()
    with pytest.raises(StructuralError):
        set_cost(inst, {99}, braess_prices(0, 0, 0))


def test_set_cost_infinite():
    inst = Instance([Resource(0, INF), Resource(1, 0, True)], [Follower(0, 1, system="S")],
                    systems={"S": __import__("stackprice").StrategySystem(({0}, {1}))})
    assert set_cost(inst, {0, 1}, inst.prices({1: 5})) is INF


def test_leader_profit_examples():
    inst = braess_basic()
    assert leader_profit(inst, (0,), braess_prices(3, -3, 3)) == 3
    assert leader_profit(inst, (None,), braess_prices(3, -3, 3)) == 0
    pg = path_graph(2)
    assert leader_profit(pg, (0, 0), pg.prices({0: 4, 1: -2})) == 8


def test_leader_profit_rejects_foreign_set():
    inst = braess_basic()
    with pytest.raises(StructuralError):
        leader_profit(inst, ({0, 1},), braess_prices(1, 1, 1))
    with pytest.raises(StructuralError):
        leader_profit(inst, (7,), braess_prices(1, 1, 1))


def test_base_cost_is_not_revenue():
    inst = Instance([Resource(0, 2, True, "s", "t")], [Follower(0, 10, source="s", sink="t")], nodes=("s", "t"))
    p = inst.prices({0: 3})
    assert set_cost(inst, {0}, p) == 5
    assert revenue(inst, {0}, p) == 3


def test_shortest_label_modes():
    inst = braess_basic()
    assert shortest_label(inst, 0, ALL_ZERO) == 0
    assert shortest_label(inst, 0, FIXED_ONLY) is INF
    assert shortest_label(triangle_network(), 1, ALL_ZERO) == 0


def test_price_vector_domain_is_exact():
    inst = braess_basic()
    with pytest.raises(StructuralError):
        inst.prices({0: 1, 1: 1})
    with pytest.raises(StructuralError):
        inst.prices({0: 1, 1: 1, 2: 1, 3: 1})


def test_validation_errors():
    with pytest.raises(StructuralError):
        Resource(0, INF, True)
    with pytest.raises(StructuralError):
        Follower(0, -1)
    with pytest.raises(StructuralError):
        Follower(0, 1, multiplicity=0)
    with pytest.raises(StructuralError):
        Instance([Resource(0), Resource(0)], [], nodes=())


def test_prune_redundant_drops_dangling_edge():
    inst = Instance(
        [Resource(0, 1, False, "s", "t"), Resource(1, 0, True, "s", "x")],
        [Follower(0, 3, source="s", sink="t")],
        nodes=("s", "t", "x"),
    )
    pruned, removed = prune_redundant(inst)
    assert removed == (1,)
    assert [r.id for r in pruned.resources] == [0]


price = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@given(price, price, price, price)
def test_cost_ignores_prices_outside_set(a, b, c, d):
    inst = braess_basic()
    assert set_cost(inst, P2, inst.prices({0: a, 1: b, 2: c})) == set_cost(inst, P2, inst.prices({0: a, 1: d, 2: d}))


@given(st.integers(0, 40), price, price)
def test_profit_is_linear_in_prices(seed, alpha, beta):
    inst = random_instance(seed, "dag", followers=2)
    ids = inst.priceable_ids
    p = {rid: Fraction(k + 1, 3) for k, rid in enumerate(ids)}
    q = {rid: Fraction(1 - k, 2) for k, rid in enumerate(ids)}
    combo = {rid: alpha * p[rid] + beta * q[rid] for rid in ids}
    profile = tuple(0 for _ in inst.followers)
    lhs = leader_profit(inst, profile, PriceVector(combo))
    rhs = alpha * leader_profit(inst, profile, PriceVector(p)) + beta * leader_profit(inst, profile, PriceVector(q))
    assert lhs == rhs


@given(st.integers(0, 60), price)
def test_cost_difference_is_revenue(seed, shift):
    inst = random_instance(seed, "sp")
    zero = inst.zero_prices()
    p = inst.prices({rid: shift * (k + 1) for k, rid in enumerate(inst.priceable_ids)})
    for members in inst.system(inst.followers[0]).family:
        if set_cost(inst, members, zero) is INF:
            continue
        assert set_cost(inst, members, p) - set_cost(inst, members, zero) == revenue(inst, members, p)


@given(st.integers(0, 60))
def test_zero_label_below_fixed_label(seed):
    inst = random_instance(seed, "dag")
    assert shortest_label(inst, inst.followers[0], ALL_ZERO) <= shortest_label(inst, inst.followers[0], FIXED_ONLY)
