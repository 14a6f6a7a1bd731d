"""Leader-optimal pricing by strategy-profile enumeration.

For every profile (one feasible set or no purchase per follower) the leader's
problem is a linear program in the prices.  The optimum over all profiles is
the leader's optimum; weak inequalities in each LP encode leader-favourable
tie-breaking.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Hashable, Mapping, Optional

from .errors import MultiFollower, NegativeCycle, ProfileExplosion, StructuralError
from .lp import EQ, GE, LE, Constraint, LinearProgram, LpOutcome, dual_of, solve_lp
from .model import (
    ALL_ZERO,
    FIXED_ONLY,
    Instance,
    PriceVector,
    leader_profit,
    set_cost,
    shortest_label,
)
from .rational import INF, ExtRational, harmonic
from .systems import StrategyProfile, id_key

DEFAULT_PROFILE_CAP = 200_000
MODES = ("free", "nonnegative")
_MODE_ALIASES = {"free": "free", "nonnegative": "nonnegative", "nonneg": "nonnegative"}


def normalize_mode(mode: str) -> str:
    try:
        return _MODE_ALIASES[mode]
    except KeyError:
        raise ValueError(f"mode must be 'free' or 'nonnegative', got {mode!r}") from None


def profile_cap(cap: Optional[int] = None) -> int:
    """Explicit cap, else ``STACKPRICE_PROFILE_CAP``, else the default."""
    if cap is not None:
        return int(cap)
    env = os.environ.get("STACKPRICE_PROFILE_CAP")
    return int(env) if env else DEFAULT_PROFILE_CAP


def price_var(rid) -> str:
    return f"p[{rid}]"


# best responses ---------------------------------------------------------------


@dataclass(frozen=True)
class BestResponse:
    """A follower's choice: ``index`` into its family, or ``None`` for no purchase."""

    index: Optional[int]
    members: Optional[frozenset]
    cost: Fraction
    revenue: Fraction


def best_response(instance: Instance, follower, prices: Mapping, *, check_cycles: bool = True) -> BestResponse:
    """Cheapest option with cost at most the reservation; the no-purchase option costs the reservation.

    Ties go to the larger leader revenue, then to family order, and the
    no-purchase option comes after every member.
    """
    k = instance.follower_index(follower)
    f = instance.followers[k]
    if check_cycles and instance.is_network:
        cycle = negative_cycle(instance, prices)
        if cycle is not None:
            raise NegativeCycle(cycle)
    family = instance.system_at(k).family
    best = None
    for idx, m in enumerate(instance.members_at(k)):
        if m.fixed is INF:
            continue
        rev = sum((prices[rid] for rid in m.priced), Fraction(0))
        cost = m.fixed + rev
        if cost > f.reservation:
            continue
        key = (cost, -rev)
        if best is None or key < best[0]:
            best = (key, idx, rev)
    if best is None or (f.reservation, Fraction(0)) < best[0]:
        return BestResponse(None, None, f.reservation, Fraction(0))
    (cost, _), idx, rev = best
    return BestResponse(idx, family[idx], cost, rev)


def best_response_profile(instance: Instance, prices: Mapping, *, check_cycles: bool = True) -> StrategyProfile:
    if check_cycles and instance.is_network:
        cycle = negative_cycle(instance, prices)
        if cycle is not None:
            raise NegativeCycle(cycle)
    return StrategyProfile(tuple(best_response(instance, instance.followers[k], prices, check_cycles=False).index
                                 for k in range(len(instance.followers))))


def negative_cycle(instance: Instance, prices: Mapping) -> Optional[tuple]:
    """Edge ids of a directed cycle with negative total cost, or ``None``.

    Bellman-Ford from a virtual root over every finite-cost edge.
    """
    edges = []
    for r in instance.resources:
        if r.cost is INF:
            continue
        w = r.cost + prices[r.id] if r.priceable else r.cost
        edges.append((r.tail, r.head, w, r.id))
    dist = {v: Fraction(0) for v in instance.nodes}
    pred: dict = {}
    changed = None
    for _ in range(len(dist)):
        changed = None
        for u, v, w, rid in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                pred[v] = (u, rid)
                changed = v
        if changed is None:
            return None
    v = changed
    for _ in range(len(dist)):
        v = pred[v][0]
    cycle, start = [], v
    while True:
        u, rid = pred[v]
        cycle.append(rid)
        v = u
        if v == start:
            break
    return tuple(reversed(cycle))


# profile linear programs ------------------------------------------------------


def _options(instance: Instance, k: int) -> list:
    """Finite-cost member indices of follower ``k`` followed by ``None``."""
    return [i for i, m in enumerate(instance.members_at(k)) if m.fixed is not INF] + [None]


def _validate_profile(instance: Instance, profile) -> tuple:
    choices = tuple(profile)
    if len(choices) != len(instance.followers):
        raise StructuralError("profile must assign every follower exactly once")
    out = []
    for k, c in enumerate(choices):
        members = instance.members_at(k)
        if c is None:
            out.append(None)
            continue
        if not isinstance(c, int) or isinstance(c, bool):
            c = instance.system_at(k).index(c) if frozenset(c) in instance.system_at(k).family else -1
        if not 0 <= c < len(members):
            raise StructuralError(f"profile entry {c!r} is not feasible for follower {instance.followers[k].id!r}")
        out.append(c)
    return tuple(out)


def _rows(instance: Instance, choices: tuple):
    """Constraints of a profile as ``(coeffs, rhs, tag)`` meaning ``coeffs . p <= rhs``.

    Returns ``None`` if a chosen set has infinite cost.  ``tag`` is
    ``(follower index, "reservation" | "alternative", alternative index)``.
    """
    rows = []
    for k, c in enumerate(choices):
        f = instance.followers[k]
        members = instance.members_at(k)
        if c is None:
            for t, m in enumerate(members):
                if m.fixed is INF:
                    continue
                coeffs: dict = {}
                for rid in m.priced:
                    coeffs[rid] = coeffs.get(rid, 0) - 1
                rows.append((coeffs, m.fixed - f.reservation, (k, "alternative", t)))
            continue
        s = members[c]
        if s.fixed is INF:
            return None
        base: dict = {}
        for rid in s.priced:
            base[rid] = base.get(rid, 0) + 1
        rows.append((dict(base), f.reservation - s.fixed, (k, "reservation", None)))
        for t, m in enumerate(members):
            if t == c or m.fixed is INF:
                continue
            coeffs = dict(base)
            for rid in m.priced:
                coeffs[rid] = coeffs.get(rid, 0) - 1
            rows.append(({r: v for r, v in coeffs.items() if v}, m.fixed - s.fixed, (k, "alternative", t)))
    return rows


def _objective(instance: Instance, choices: tuple) -> dict:
    obj: dict = {}
    for k, c in enumerate(choices):
        if c is None:
            continue
        mult = instance.followers[k].multiplicity
        for rid in instance.members_at(k)[c].priced:
            obj[rid] = obj.get(rid, 0) + mult
    return obj


def profile_lp(instance: Instance, profile, mode: str = "free") -> LinearProgram:
    """The full LP of one profile over every priceable resource.

    Variables are named ``p[<id>]``.  Infinite-cost alternatives impose no
    constraint.  A chosen set of infinite cost yields the infeasible
    constraint ``0 <= -1``.
    """
    mode = normalize_mode(mode)
    choices = _validate_profile(instance, profile)
    names = {rid: price_var(rid) for rid in instance.priceable_ids}
    rows = _rows(instance, choices)
    constraints = []
    if rows is None:
        constraints.append(Constraint({}, LE, -1))
    else:
        for coeffs, rhs, _ in rows:
            constraints.append(Constraint({names[r]: v for r, v in coeffs.items()}, LE, rhs))
    objective = {names[r]: v for r, v in _objective(instance, choices).items()}
    lower = {n: 0 for n in names.values()} if mode == "nonnegative" else {}
    return LinearProgram(tuple(names.values()), objective, tuple(constraints), lower=lower)


def _solve_reduced(instance: Instance, choices: tuple, mode: str):
    """Optimum of a profile LP, or ``None`` when infeasible.

    Prices of resources outside every chosen set only appear as lower
    bounds on alternative costs, so they are left out of the LP and later
    set high enough to make every such alternative strictly worse.
    """
    rows = _rows(instance, choices)
    if rows is None:
        return None
    used = set()
    for k, c in enumerate(choices):
        if c is not None:
            used.update(instance.members_at(k)[c].priced)
    kept: dict = {}
    dropped = []
    for coeffs, rhs, tag in rows:
        if any(r not in used for r in coeffs):
            dropped.append((coeffs, rhs))
            continue
        key = frozenset(coeffs.items())
        if not key:
            if rhs < 0:
                return None
            continue
        if key not in kept or rhs < kept[key][1]:
            kept[key] = (coeffs, rhs)
    variables = sorted(used, key=id_key)
    objective = _objective(instance, choices)
    if variables:
        lp = LinearProgram(
            tuple(variables),
            objective,
            tuple(Constraint(coeffs, LE, rhs) for coeffs, rhs in kept.values()),
            lower={v: 0 for v in variables} if mode == "nonnegative" else {},
        )
        outcome = solve_lp(lp)
        if outcome.status == "infeasible":
            return None
        if outcome.status != "optimal":
            raise StructuralError("profile LP is unbounded; reservation constraints should bound it")
        point = dict(outcome.solution)
        optimum = outcome.optimum
    else:
        point, optimum = {}, Fraction(0)
    # Uniform high price on unused resources, one unit above the largest deficit.
    high = Fraction(0)
    for coeffs, rhs in dropped:
        slack = rhs - sum(v * point[r] for r, v in coeffs.items() if r in used)
        count = -sum(v for r, v in coeffs.items() if r not in used)
        high = max(high, -slack / count)
    high += 1
    prices = {rid: point.get(rid, high) for rid in instance.priceable_ids}
    return optimum, prices


# optimal pricing --------------------------------------------------------------


@dataclass(frozen=True)
class PricingSolution:
    """Optimal prices with the induced profile and the tight constraints.

    ``binding_constraints`` lists ``(follower id, "reservation" | "alternative",
    alternative index)`` triples whose constraint holds with equality.
    """

    prices: PriceVector
    profile: StrategyProfile
    profit: Fraction
    mode: str
    binding_constraints: tuple = ()
    profiles_total: int = field(default=0, compare=False)
    lps_solved: int = field(default=0, compare=False)


def profile_count(instance: Instance) -> int:
    total = 1
    for k in range(len(instance.followers)):
        total *= len(_options(instance, k))
    return total


def _upper_bounds(instance: Instance, k: int, options: list, mode: str) -> dict:
    """Per-option revenue bound, scaled by multiplicity; ``None`` marks an infeasible option."""
    f = instance.followers[k]
    members = instance.members_at(k)
    ceiling = min(f.reservation, shortest_label(instance, instance.followers[k], FIXED_ONLY))
    bounds = {}
    for o in options:
        if o is None:
            bounds[o] = Fraction(0) if ceiling >= f.reservation else None
            continue
        b = ceiling - members[o].fixed
        if mode == "nonnegative" and b < 0:
            bounds[o] = None
        else:
            bounds[o] = b * f.multiplicity
    return bounds


def binding_constraints(instance: Instance, profile, prices: Mapping) -> tuple:
    choices = _validate_profile(instance, profile)
    rows = _rows(instance, choices) or []
    out = []
    for coeffs, rhs, (k, kind, alt) in rows:
        if sum((v * prices[r] for r, v in coeffs.items()), Fraction(0)) == rhs:
            out.append((instance.followers[k].id, kind, alt))
    return tuple(out)


def optimal_pricing(instance: Instance, mode: str = "free", *, cap: Optional[int] = None) -> PricingSolution:
    """Leader-optimal prices over all strategy profiles.

    Profiles are visited in order of decreasing revenue bound; the search
    stops once no remaining profile can beat the incumbent.  Among equal
    optima the lowest profile index wins.
    """
    mode = normalize_mode(mode)
    cap = profile_cap(cap)
    total = profile_count(instance)
    if total > cap:
        raise ProfileExplosion(total, cap)
    per_follower = []
    for k in range(len(instance.followers)):
        options = _options(instance, k)
        bounds = _upper_bounds(instance, k, options, mode)
        per_follower.append([(pos, o, bounds[o]) for pos, o in enumerate(options) if bounds[o] is not None])

    radices = [len(_options(instance, k)) for k in range(len(instance.followers))]
    candidates = []
    for combo in product(*per_follower):
        index = 0
        for (pos, _, _), radix in zip(combo, radices):
            index = index * radix + pos
        bound = sum((b for _, _, b in combo), Fraction(0))
        candidates.append((-bound, index, tuple(o for _, o, _ in combo)))
    candidates.sort(key=lambda c: (c[0], c[1]))

    best = None
    solved = 0
    for neg_bound, index, choices in candidates:
        if best is not None:
            if -neg_bound < best[0] or (-neg_bound == best[0] and index > best[1]):
                break
        result = _solve_reduced(instance, choices, mode)
        solved += 1
        if result is None:
            continue
        value, prices = result
        if best is None or value > best[0] or (value == best[0] and index < best[1]):
            best = (value, index, choices, prices)
    if best is None:
        raise StructuralError("no strategy profile admits feasible prices")
    value, _, choices, prices = best
    pv = PriceVector.for_instance(instance, prices)
    realized = best_response_profile(instance, pv)
    profit = leader_profit(instance, realized, pv)
    if profit != value:
        raise AssertionError(f"realized profit {profit} differs from LP optimum {value}")
    return PricingSolution(
        prices=pv,
        profile=realized,
        profit=profit,
        mode=mode,
        binding_constraints=binding_constraints(instance, realized, pv),
        profiles_total=total,
        lps_solved=solved,
    )


# price of positivity ----------------------------------------------------------


@dataclass(frozen=True)
class PopReport:
    free: PricingSolution
    nonnegative: PricingSolution
    pop: ExtRational
    harmonic_bound: Fraction
    surplus_upper: ExtRational

    @property
    def within_harmonic_bound(self) -> bool:
        return self.pop is not INF and self.pop <= self.harmonic_bound

    @property
    def degenerate(self) -> bool:
        """True when the nonnegative optimum is zero, so the ratio is not a quotient."""
        return self.nonnegative.profit == 0


def pop_ratio(free_profit: Fraction, nonneg_profit: Fraction) -> ExtRational:
    if nonneg_profit == 0:
        return INF if free_profit > 0 else Fraction(1)
    return free_profit / nonneg_profit


def surplus_upper(instance: Instance) -> ExtRational:
    """Sum over followers of multiplicity times ``max(0, R - shortest label at zero prices)``."""
    total = Fraction(0)
    for k, f in enumerate(instance.followers):
        label = shortest_label(instance, instance.followers[k], ALL_ZERO)
        if label is not INF and label < f.reservation:
            total += f.multiplicity * (f.reservation - label)
    return total


def price_of_positivity(instance: Instance, *, profile_cap: Optional[int] = None) -> PopReport:
    free = optimal_pricing(instance, "free", cap=profile_cap)
    nonneg = optimal_pricing(instance, "nonnegative", cap=profile_cap)
    m = len(instance.priceable_ids)
    return PopReport(
        free=free,
        nonnegative=nonneg,
        pop=pop_ratio(free.profit, nonneg.profit),
        harmonic_bound=harmonic(max(1, m * instance.total_followers)),
        surplus_upper=surplus_upper(instance),
    )


# single-price strategies ------------------------------------------------------


def _single_price_candidates(instance: Instance) -> list:
    qs = {Fraction(0)}
    for k, f in enumerate(instance.followers):
        members = [m for m in instance.members_at(k) if m.fixed is not INF]
        for s in members:
            if s.priced:
                qs.add((f.reservation - s.fixed) / len(s.priced))
            for t in members:
                d = len(s.priced) - len(t.priced)
                if d > 0:
                    qs.add((t.fixed - s.fixed) / d)
    return sorted(q for q in qs if q >= 0)


def single_price_best(instance: Instance) -> tuple[Fraction, Fraction]:
    """Best uniform price ``q >= 0`` and its profit; ties go to the smaller ``q``."""
    best_q, best_profit = Fraction(0), None
    for q in _single_price_candidates(instance):
        prices = {rid: q for rid in instance.priceable_ids}
        profit = sum(
            (f.multiplicity * best_response(instance, instance.followers[k], prices, check_cycles=False).revenue
             for k, f in enumerate(instance.followers)),
            Fraction(0),
        )
        if best_profit is None or profit > best_profit:
            best_q, best_profit = q, profit
    return best_q, best_profit


# single-follower formulas -----------------------------------------------------


@dataclass(frozen=True)
class SurplusCheck:
    formula_value: ExtRational
    free_profit: Fraction
    nonnegative_profit: Fraction
    matches_free: bool
    matches_nonneg: bool


def surplus_formula(instance: Instance) -> ExtRational:
    """``min(label with fixed resources only, R) - label at zero prices`` for a lone follower."""
    if len(instance.followers) != 1 or instance.followers[0].multiplicity != 1:
        raise MultiFollower("the surplus formula is defined for a single follower of multiplicity 1")
    f = instance.followers[0]
    zero = shortest_label(instance, instance.followers[0], ALL_ZERO)
    fixed = shortest_label(instance, instance.followers[0], FIXED_ONLY)
    if zero is INF:
        raise StructuralError("follower has no finite-cost option")
    return min(fixed, f.reservation) - zero


def surplus_formula_check(instance: Instance, *, profile_cap: Optional[int] = None) -> SurplusCheck:
    value = surplus_formula(instance)
    free = optimal_pricing(instance, "free", cap=profile_cap).profit
    nonneg = optimal_pricing(instance, "nonnegative", cap=profile_cap).profit
    return SurplusCheck(value, free, nonneg, value == free, value == nonneg)


def zero_price_path(instance: Instance) -> Optional[int]:
    """Index of the first cheapest member at zero prices whose resources are all priceable."""
    zero = shortest_label(instance, instance.followers[0], ALL_ZERO)
    family = instance.system_at(0).family
    for idx, m in enumerate(instance.members_at(0)):
        if m.fixed == zero and all(instance.resource(r).priceable for r in family[idx]):
            return idx
    return None


def path_extraction_lp(instance: Instance, path_index: Optional[int] = None) -> LinearProgram:
    """Prices on a fully priceable cheapest path together with node potentials.

    Variables ``p[e]`` for edges of the path and ``l[v]`` for nodes, all
    free.  The path's edges are tight, fixed edges respect the potentials,
    and the reservation acts as an extra fixed source-sink edge.  Priceable
    edges off the path are priced out and contribute no row.
    """
    if not instance.is_network:
        raise StructuralError("path extraction needs a network instance")
    surplus_formula(instance)
    if path_index is None:
        path_index = zero_price_path(instance)
        if path_index is None:
            raise StructuralError("no cheapest zero-price path consists solely of priceable edges")
    f = instance.followers[0]
    path = instance.system_at(0).family[path_index]
    label = {v: f"l[{v}]" for v in instance.nodes}
    variables = tuple(price_var(rid) for rid in sorted(path, key=id_key)) + tuple(label.values())
    constraints = []
    for r in instance.resources:
        if r.id in path:
            constraints.append(Constraint({label[r.head]: 1, label[r.tail]: -1, price_var(r.id): -1}, EQ, r.cost))
        elif not r.priceable and r.cost is not INF:
            constraints.append(Constraint({label[r.head]: 1, label[r.tail]: -1}, LE, r.cost))
    constraints.append(Constraint({label[f.sink]: 1, label[f.source]: -1}, LE, f.reservation))
    objective = {price_var(rid): 1 for rid in path}
    return LinearProgram(variables, objective, tuple(constraints))


@dataclass(frozen=True)
class DualityCheck:
    primal: LpOutcome
    dual: LpOutcome

    @property
    def strong(self) -> bool:
        return (self.primal.status == "optimal" and self.dual.status == "optimal"
                and self.primal.optimum == self.dual.optimum)


def path_extraction_duality(instance: Instance) -> DualityCheck:
    lp = path_extraction_lp(instance)
    return DualityCheck(solve_lp(lp), solve_lp(dual_of(lp)))


__all__ = [
    "BestResponse",
    "PricingSolution",
    "PopReport",
    "SurplusCheck",
    "DualityCheck",
    "best_response",
    "best_response_profile",
    "negative_cycle",
    "profile_lp",
    "profile_count",
    "optimal_pricing",
    "price_of_positivity",
    "pop_ratio",
    "surplus_upper",
    "single_price_best",
    "surplus_formula",
    "surplus_formula_check",
    "zero_price_path",
    "path_extraction_lp",
    "path_extraction_duality",
    "binding_constraints",
]
