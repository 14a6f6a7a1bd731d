from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stackprice.errors import MultiFollower, NegativeCycle, ProfileExplosion
from stackprice.generators import (
    braess_basic,
    generalized_braess,
    path_graph,
    random_instance,
    triangle_network,
    two_follower_sp,
)
from stackprice.lp import solve_lp
from stackprice.model import Follower, Instance, PriceVector, Resource, leader_profit
from stackprice.pricing import (
    best_response,
    best_response_profile,
    negative_cycle,
    optimal_pricing,
    path_extraction_duality,
    pop_ratio,
    price_of_positivity,
    profile_lp,
    single_price_best,
    surplus_formula_check,
)
from stackprice.rational import INF

from .oracles import brute_force_optimum, sampled_profit

P1 = frozenset({0, 1, 2})


def test_best_response_examples():
    inst = braess_basic()
    f = inst.followers[0]
    br = best_response(inst, f, inst.prices({0: 3, 1: -3, 2: 3}))
    assert (br.members, br.cost, br.revenue) == (P1, 3, 3)
    br = best_response(inst, f, inst.zero_prices())
    assert (br.members, br.cost, br.revenue) == (P1, 0, 0)
    br = best_response(inst, f, inst.prices({0: 10, 1: 10, 2: 10}))
    assert br.index is None and br.cost == 3


def test_best_response_tie_prefers_revenue():
    inst = braess_basic()
    # P1 and P2 both cost 2; P1 pays the leader 2, P2 only 1.
    br = best_response(inst, inst.followers[0], inst.prices({0: 1, 1: 0, 2: 1}))
    assert br.members == P1


def test_profile_lp_examples():
    inst = braess_basic()
    assert solve_lp(profile_lp(inst, (0,), "free")).optimum == 3
    assert solve_lp(profile_lp(inst, (0,), "nonnegative")).optimum == 2
    assert solve_lp(profile_lp(inst, (None,), "free")).optimum == 0
    tri = triangle_network()
    two_edge = []
    for k in range(3):
        fam = tri.system_at(k).family
        two_edge.append(next(i for i, s in enumerate(fam) if len(s) == 2 and all(tri.resource(e).priceable for e in s)))
    out = solve_lp(profile_lp(tri, tuple(two_edge), "free"))
    assert out.status == "infeasible" or out.optimum < 5


def test_fixture_optima():
    report = price_of_positivity(braess_basic())
    assert (report.free.profit, report.nonnegative.profit, report.pop) == (3, 2, Fraction(3, 2))
    report = price_of_positivity(generalized_braess(2))
    assert (report.free.profit, report.nonnegative.profit, report.pop) == (4, 2, 2)
    report = price_of_positivity(path_graph(2))
    assert (report.free.profit, report.nonnegative.profit, report.pop) == (8, 6, Fraction(4, 3))


def test_single_priceable_edge_has_pop_one():
    inst = Instance(
        [Resource(0, 0, True, "s", "t"), Resource(1, 3, False, "s", "t")],
        [Follower(0, 5, source="s", sink="t")],
        nodes=("s", "t"),
    )
    assert price_of_positivity(inst).pop == 1


def test_single_price_examples():
    assert single_price_best(braess_basic()) == (2, 2)
    assert single_price_best(path_graph(2)) == (1, 5)
    lone = Instance([Resource(0, 0, True, "s", "t")], [Follower(0, 5, source="s", sink="t")], nodes=("s", "t"))
    assert single_price_best(lone) == (5, 5)


def test_surplus_formula_examples():
    check = surplus_formula_check(braess_basic())
    assert (check.formula_value, check.matches_free, check.matches_nonneg) == (3, True, False)
    fig = two_follower_sp()
    alone = replace(fig, followers=fig.followers[:1])
    check = surplus_formula_check(alone)
    # The fixed route through the middle node costs 1, which caps the extractable surplus.
    assert check.formula_value == 1 and check.matches_nonneg and check.matches_free
    with pytest.raises(MultiFollower):
        surplus_formula_check(triangle_network())


def test_path_extraction_duality_braess():
    dual = path_extraction_duality(braess_basic())
    assert dual.strong and dual.primal.optimum == 3


def test_pop_ratio_degenerate():
    assert pop_ratio(Fraction(2), Fraction(0)) is INF
    assert pop_ratio(Fraction(0), Fraction(0)) == 1


def test_profile_cap(monkeypatch):
    with pytest.raises(ProfileExplosion):
        optimal_pricing(braess_basic(), cap=3)
    monkeypatch.setenv("STACKPRICE_PROFILE_CAP", "2")
    with pytest.raises(ProfileExplosion):
        optimal_pricing(braess_basic())


def test_negative_cycle_guard():
    base = braess_basic()
    inst = Instance(base.resources + (Resource(5, 0, False, "v", "u"),), base.followers, nodes=base.nodes)
    prices = inst.prices({0: 2, 1: -1, 2: 2})
    assert set(negative_cycle(inst, prices)) == {1, 5}
    assert negative_cycle(inst, inst.zero_prices()) is None
    with pytest.raises(NegativeCycle):
        best_response(inst, inst.followers[0], prices)
    # The engine finds optimal prices that keep the graph well posed here.
    assert optimal_pricing(inst, "free").profit == 2


small = st.one_of(
    st.builds(lambda s: random_instance(s, "sp"), st.integers(0, 10_000)),
    st.builds(lambda s: random_instance(s, "dag", followers=2), st.integers(0, 10_000)),
    st.builds(lambda s: random_instance(s, "clutter", followers=2), st.integers(0, 10_000)),
)


@given(small)
def test_engine_matches_float_brute_force(inst):
    for mode in ("free", "nonnegative"):
        exact = optimal_pricing(inst, mode).profit
        assert abs(float(exact) - brute_force_optimum(inst, mode)) < 1e-6


@given(small, st.lists(st.fractions(min_value=-4, max_value=6, max_denominator=4), min_size=12, max_size=12))
def test_no_price_vector_beats_the_optimum(inst, values):
    prices = {rid: values[i % len(values)] for i, rid in enumerate(inst.priceable_ids)}
    free = optimal_pricing(inst, "free").profit
    nonneg = optimal_pricing(inst, "nonnegative").profit
    if inst.is_network and negative_cycle(inst, prices) is not None:
        return
    assert sampled_profit(inst, prices) <= free
    assert sampled_profit(inst, {k: abs(v) for k, v in prices.items()}) <= nonneg


@given(small)
def test_dominance_and_bounds(inst):
    report = price_of_positivity(inst)
    _, single = single_price_best(inst)
    assert report.free.profit >= report.nonnegative.profit >= single >= 0
    assert report.free.profit <= report.surplus_upper
    assert report.pop == 1 or report.pop <= report.harmonic_bound


@given(small)
def test_solution_is_self_consistent(inst):
    for mode in ("free", "nonnegative"):
        sol = optimal_pricing(inst, mode)
        assert best_response_profile(inst, sol.prices) == sol.profile
        assert leader_profit(inst, sol.profile, sol.prices) == sol.profit
        if mode == "nonnegative":
            assert all(v >= 0 for v in sol.prices.values())


def _scaled(inst, alpha):
    resources = [replace(r, cost=r.cost if r.cost is INF else r.cost * alpha) for r in inst.resources]
    followers = [replace(f, reservation=f.reservation * alpha) for f in inst.followers]
    return replace(inst, resources=tuple(resources), followers=tuple(followers))


@given(small, st.fractions(min_value=Fraction(1, 5), max_value=5).filter(lambda a: a > 0))
def test_scaling_covariance(inst, alpha):
    a, b = price_of_positivity(inst), price_of_positivity(_scaled(inst, alpha))
    assert b.free.profit == alpha * a.free.profit
    assert b.nonnegative.profit == alpha * a.nonnegative.profit
    assert b.pop == a.pop


@given(st.integers(0, 10_000))
def test_single_follower_series_parallel_is_immune(seed):
    assert price_of_positivity(random_instance(seed, "sp")).pop == 1


def test_multiplicity_scales_profit():
    inst = braess_basic()
    heavy = replace(inst, followers=(replace(inst.followers[0], multiplicity=4),))
    assert optimal_pricing(heavy).profit == 4 * optimal_pricing(inst).profit
