"""Domain model for Stackelberg pricing games over exact rationals.

An :class:`Instance` is a ground set of resources (edges, for networks), a
subset of which the leader prices, together with a list of followers.  Each
follower minimizes the total cost of a feasible set, buying nothing when
every option exceeds the reservation value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .errors import StructuralError
from .rational import INF, ExtRational, as_ext_rational, as_rational
from .systems import (
    DEFAULT_PATH_CAP,
    StrategyProfile,
    StrategySystem,
    enumerate_paths,
    family_of_bases,
    id_key,
)

__all__ = [
    "Resource",
    "Follower",
    "Instance",
    "PriceVector",
    "PriceMode",
    "ALL_ZERO",
    "FIXED_ONLY",
    "set_cost",
    "revenue",
    "leader_profit",
    "shortest_label",
    "prune_redundant",
]


@dataclass(frozen=True)
class Resource:
    """A resource (edge) with a cost.

    For a fixed resource ``cost`` is its fixed cost and may be ``INF``.  For a
    priceable resource ``cost`` is the base component added to the leader's
    price; it counts toward the follower's cost but is never revenue.
    """

    id: Hashable
    cost: ExtRational = Fraction(0)
    priceable: bool = False
    tail: Hashable = None
    head: Hashable = None

    def __post_init__(self):
        object.__setattr__(self, "cost", as_ext_rational(self.cost))
        if self.priceable and self.cost is INF:
            raise StructuralError(f"priceable resource {self.id!r} needs a finite base cost")
        if (self.tail is None) != (self.head is None):
            raise StructuralError(f"resource {self.id!r} has only one endpoint")

    @property
    def kind(self) -> str:
        return "priceable" if self.priceable else "fixed"


@dataclass(frozen=True)
class Follower:
    id: Hashable
    reservation: Fraction
    multiplicity: int = 1
    source: Hashable = None
    sink: Hashable = None
    system: Hashable = None

    def __post_init__(self):
        object.__setattr__(self, "reservation", as_rational(self.reservation))
        if self.reservation < 0:
            raise StructuralError(f"follower {self.id!r} has a negative reservation value")
        if not isinstance(self.multiplicity, int) or self.multiplicity < 1:
            raise StructuralError(f"follower {self.id!r} needs a positive integer multiplicity")


class PriceMode(enum.Enum):
    ALL_ZERO = "all-zero"
    FIXED_ONLY = "fixed-only"


ALL_ZERO = PriceMode.ALL_ZERO
FIXED_ONLY = PriceMode.FIXED_ONLY


@dataclass(frozen=True)
class _Member:
    fixed: ExtRational
    priced: tuple


@dataclass(frozen=True)
class Instance:
    """A pricing game.

    Network instances set ``nodes`` and give every resource a tail and head;
    their followers carry ``source``/``sink``.  Abstract instances leave
    ``nodes`` as ``None`` and each follower names an entry of ``systems``,
    which is either a :class:`StrategySystem` or a matroid oracle.
    """

    resources: tuple
    followers: tuple
    nodes: Optional[tuple] = None
    systems: Mapping = field(default_factory=dict)
    name: str = ""
    path_cap: int = field(default=DEFAULT_PATH_CAP, compare=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "resources", tuple(self.resources))
        object.__setattr__(self, "followers", tuple(self.followers))
        if self.nodes is not None:
            object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "systems", dict(self.systems))
        ids = [r.id for r in self.resources]
        if len(set(ids)) != len(ids):
            raise StructuralError("resource ids must be unique")
        fids = [f.id for f in self.followers]
        if len(set(fids)) != len(fids):
            raise StructuralError("follower ids must be unique")
        if self.nodes is not None:
            nodeset = set(self.nodes)
            for r in self.resources:
                if r.tail not in nodeset or r.head not in nodeset:
                    raise StructuralError(f"edge {r.id!r} references an unknown node")
            for f in self.followers:
                if f.source not in nodeset or f.sink not in nodeset:
                    raise StructuralError(f"follower {f.id!r} references an unknown node")
        else:
            for f in self.followers:
                if f.system not in self.systems:
                    raise StructuralError(f"follower {f.id!r} references unknown system {f.system!r}")

    # lookups -----------------------------------------------------------

    @property
    def is_network(self) -> bool:
        return self.nodes is not None

    @property
    def by_id(self) -> dict:
        cached = self._cache.get("by_id")
        if cached is None:
            cached = self._cache["by_id"] = {r.id: r for r in self.resources}
        return cached

    def resource(self, rid) -> Resource:
        try:
            return self.by_id[rid]
        except KeyError:
            raise StructuralError(f"unknown resource id {rid!r}") from None

    @property
    def priceable_ids(self) -> tuple:
        return tuple(r.id for r in self.resources if r.priceable)

    @property
    def total_followers(self) -> int:
        return sum(f.multiplicity for f in self.followers)

    def follower_index(self, follower) -> int:
        if isinstance(follower, Follower):
            follower = follower.id
        for k, f in enumerate(self.followers):
            if f.id == follower:
                return k
        raise StructuralError(f"unknown follower {follower!r}")

    # strategy systems --------------------------------------------------

    def system(self, follower) -> StrategySystem:
        """Materialized feasible family of one follower (cached)."""
        return self.system_at(self.follower_index(follower))

    def system_at(self, k: int) -> StrategySystem:
        """Like :meth:`system`, addressed by position in ``followers``."""
        key = ("system", k)
        if key not in self._cache:
            f = self.followers[k]
            if self.is_network:
                sys_ = enumerate_paths(self, f.source, f.sink, cap=self.path_cap)
            else:
                spec = self.systems[f.system]
                sys_ = spec if isinstance(spec, StrategySystem) else family_of_bases(spec)
                for members in sys_.family:
                    for rid in members:
                        self.resource(rid)
            self._cache[key] = sys_
        return self._cache[key]

    def members(self, follower) -> tuple:
        """Per-member ``(fixed part, priceable ids)`` for one follower (cached)."""
        return self.members_at(self.follower_index(follower))

    def members_at(self, k: int) -> tuple:
        key = ("members", k)
        if key not in self._cache:
            self._cache[key] = tuple(self._split(s) for s in self.system_at(k).family)
        return self._cache[key]

    def _split(self, members) -> _Member:
        fixed: ExtRational = Fraction(0)
        priced = []
        for rid in sorted(members, key=id_key):
            r = self.resource(rid)
            fixed = fixed + r.cost
            if r.priceable:
                priced.append(rid)
        return _Member(fixed, tuple(priced))

    def prices(self, mapping: Mapping) -> "PriceVector":
        return PriceVector.for_instance(self, mapping)

    def zero_prices(self) -> "PriceVector":
        return PriceVector.for_instance(self, {rid: 0 for rid in self.priceable_ids})


@dataclass(frozen=True)
class PriceVector(Mapping):
    """Prices on exactly the priceable resources of an instance."""

    entries: Mapping

    def __post_init__(self):
        object.__setattr__(self, "entries", {k: as_rational(v) for k, v in dict(self.entries).items()})

    @classmethod
    def for_instance(cls, instance: Instance, mapping: Mapping) -> "PriceVector":
        pv = cls(mapping)
        expected = set(instance.priceable_ids)
        got = set(pv.entries)
        if got != expected:
            missing = sorted(expected - got, key=id_key)
            extra = sorted(got - expected, key=id_key)
            raise StructuralError(f"price vector domain mismatch (missing {missing}, extra {extra})")
        return pv

    def __getitem__(self, rid):
        return self.entries[rid]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def scaled(self, alpha) -> "PriceVector":
        alpha = as_rational(alpha)
        return PriceVector({k: alpha * v for k, v in self.entries.items()})


def _price_of(prices, rid) -> Fraction:
    try:
        return prices[rid]
    except KeyError:
        raise StructuralError(f"no price given for priceable resource {rid!r}") from None


def set_cost(instance: Instance, members: Iterable, prices: Mapping) -> ExtRational:
    """Fixed costs plus base cost and price of every priceable member."""
    total: ExtRational = Fraction(0)
    for rid in members:
        r = instance.resource(rid)
        total = total + r.cost
        if r.priceable:
            total = total + _price_of(prices, rid)
    return total


def revenue(instance: Instance, members: Iterable, prices: Mapping) -> Fraction:
    """Leader revenue from one purchase of ``members`` (prices only, no base costs)."""
    return sum((_price_of(prices, rid) for rid in members if instance.resource(rid).priceable), Fraction(0))


def leader_profit(instance: Instance, profile: StrategyProfile | Sequence, prices: Mapping) -> Fraction:
    """Total revenue over followers, weighted by multiplicity; ``None`` choices pay nothing."""
    choices = tuple(profile)
    if len(choices) != len(instance.followers):
        raise StructuralError("profile must assign every follower exactly once")
    total = Fraction(0)
    for k, (f, choice) in enumerate(zip(instance.followers, choices)):
        if choice is None:
            continue
        family = instance.system_at(k).family
        if isinstance(choice, int) and not isinstance(choice, bool):
            if not 0 <= choice < len(family):
                raise StructuralError(f"profile index {choice} out of range for follower {f.id!r}")
            members = family[choice]
        else:
            members = frozenset(choice)
            if members not in family:
                raise StructuralError(f"set {sorted(members, key=id_key)} is not feasible for follower {f.id!r}")
        total += f.multiplicity * revenue(instance, members, prices)
    return total


def shortest_label(instance: Instance, follower, prices) -> ExtRational:
    """Cheapest feasible set of a follower.

    ``prices`` may be a price mapping, :data:`ALL_ZERO`, or :data:`FIXED_ONLY`;
    the last one only considers sets without priceable resources and returns
    ``INF`` when there are none.
    """
    best: ExtRational = INF
    for m in instance.members(follower):
        if prices is FIXED_ONLY:
            if m.priced:
                continue
            cost = m.fixed
        elif prices is ALL_ZERO:
            cost = m.fixed
        else:
            cost = m.fixed + sum((_price_of(prices, rid) for rid in m.priced), Fraction(0))
        if cost < best:
            best = cost
    return best


def prune_redundant(instance: Instance) -> tuple[Instance, tuple]:
    """Drop edges lying on no simple source-sink path of any follower.

    Returns the pruned instance and the ids that were removed.  Abstract
    instances are returned unchanged.
    """
    if not instance.is_network:
        return instance, ()
    used = set()
    for k in range(len(instance.followers)):
        used |= instance.system_at(k).ground
    removed = tuple(r.id for r in instance.resources if r.id not in used)
    if not removed:
        return instance, ()
    kept = Instance(
        resources=tuple(r for r in instance.resources if r.id in used),
        followers=instance.followers,
        nodes=instance.nodes,
        systems=instance.systems,
        name=instance.name,
        path_cap=instance.path_cap,
    )
    return kept, removed
