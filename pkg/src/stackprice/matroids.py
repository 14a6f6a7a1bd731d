"""Matroid followers: independence oracles, greedy bases and the exchange check."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Hashable, Mapping

from .errors import MatroidError
from .systems import id_key

EXHAUSTIVE_CHECK_LIMIT = 10


class MatroidOracle:
    """Base class: subclasses define ``ground`` and ``is_independent``."""

    kind = "abstract"
    ground: frozenset

    def is_independent(self, subset) -> bool:
        raise NotImplementedError

    def rank(self, subset=None) -> int:
        pool = self.ground if subset is None else frozenset(subset)
        chosen: list = []
        for e in sorted(pool, key=id_key):
            if self.is_independent(chosen + [e]):
                chosen.append(e)
        return len(chosen)

    def is_basis(self, subset) -> bool:
        subset = frozenset(subset)
        return subset <= self.ground and len(subset) == self.rank() and self.is_independent(subset)


@dataclass(frozen=True)
class UniformMatroid(MatroidOracle):
    ground: frozenset
    r: int
    kind = "uniform"

    def __post_init__(self):
        object.__setattr__(self, "ground", frozenset(self.ground))
        if not 0 <= self.r <= len(self.ground):
            raise MatroidError(f"rank {self.r} outside [0, {len(self.ground)}]")

    def is_independent(self, subset) -> bool:
        subset = frozenset(subset)
        return subset <= self.ground and len(subset) <= self.r


@dataclass(frozen=True)
class GraphicMatroid(MatroidOracle):
    """Cycle matroid of a multigraph given as ``{edge id: (u, v)}``; loops are dependent."""

    edges: Mapping
    ground: frozenset = field(init=False)
    kind = "graphic"

    def __post_init__(self):
        edges = {k: tuple(v) for k, v in dict(self.edges).items()}
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "ground", frozenset(edges))

    def __hash__(self):
        return hash(frozenset(self.edges.items()))

    def is_independent(self, subset) -> bool:
        parent: dict = {}

        def find(x):
            while parent.get(x, x) != x:
                parent[x] = parent.get(parent[x], parent[x])
                x = parent[x]
            return x

        for e in subset:
            if e not in self.edges:
                return False
            u, v = self.edges[e]
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True


@dataclass(frozen=True)
class ExplicitMatroid(MatroidOracle):
    """Matroid given by its list of bases; validated on construction for small ground sets."""

    bases: tuple
    ground: frozenset = None
    kind = "explicit"

    def __post_init__(self):
        bases = tuple(sorted({frozenset(b) for b in self.bases}, key=lambda b: sorted(b, key=id_key)))
        if not bases:
            raise MatroidError("a matroid needs at least one basis")
        object.__setattr__(self, "bases", bases)
        ground = frozenset().union(*bases) if self.ground is None else frozenset(self.ground)
        object.__setattr__(self, "ground", ground)
        if len({len(b) for b in bases}) != 1:
            raise MatroidError("bases differ in cardinality")
        if len(ground) <= EXHAUSTIVE_CHECK_LIMIT and not satisfies_basis_exchange(bases):
            raise MatroidError("family violates the basis exchange axiom")

    def is_independent(self, subset) -> bool:
        subset = frozenset(subset)
        return any(subset <= b for b in self.bases)

    def rank(self, subset=None) -> int:
        if subset is None:
            return len(self.bases[0])
        return super().rank(subset)


def satisfies_basis_exchange(bases) -> bool:
    family = set(map(frozenset, bases))
    for A in family:
        for B in family:
            for a in A - B:
                if not any((A - {a}) | {b} in family for b in B - A):
                    return False
    return True


def check_axioms(matroid: MatroidOracle) -> bool:
    """Exhaustively test the independence axioms (small ground sets only)."""
    ground = sorted(matroid.ground, key=id_key)
    if len(ground) > EXHAUSTIVE_CHECK_LIMIT:
        raise MatroidError("exhaustive axiom check limited to 10 elements")
    indep = [frozenset(c) for k in range(len(ground) + 1) for c in combinations(ground, k) if matroid.is_independent(c)]
    if frozenset() not in indep:
        return False
    indep_set = set(indep)
    for X in indep:
        for e in X:
            if X - {e} not in indep_set:
                return False
    for X in indep:
        for Y in indep:
            if len(X) > len(Y) and not any(Y | {e} in indep_set for e in X - Y):
                return False
    return True


def _weight(weights: Mapping, members) -> Fraction:
    return sum((Fraction(weights[e]) for e in members), Fraction(0))


def greedy_min_basis(matroid: MatroidOracle, weights: Mapping) -> frozenset:
    """Minimum-weight basis; ties go to the smaller resource id."""
    missing = matroid.ground - set(weights)
    if missing:
        raise MatroidError(f"weights missing for {sorted(missing, key=id_key)}")
    chosen: list = []
    for e in sorted(matroid.ground, key=lambda x: (Fraction(weights[x]), id_key(x))):
        if matroid.is_independent(chosen + [e]):
            chosen.append(e)
    return frozenset(chosen)


@dataclass(frozen=True)
class ExchangeResult:
    basis: frozenset
    relation: str  # "unchanged" or "single-swap"
    removed: Hashable = None
    added: Hashable = None


def exchange_after_increase(matroid: MatroidOracle, weights: Mapping, basis, element, new_weight) -> ExchangeResult:
    """Optimum after raising the weight of ``element``, as a swap relative to ``basis``.

    Either ``basis`` stays optimal or some ``basis - element + f`` is optimal
    under the new weights; anything else raises :class:`MatroidError`.
    """
    basis = frozenset(basis)
    if not matroid.is_basis(basis):
        raise MatroidError("given set is not a basis")
    if _weight(weights, basis) != _weight(weights, greedy_min_basis(matroid, weights)):
        raise MatroidError("given basis is not minimum weight")
    new_weight = Fraction(new_weight)
    if new_weight <= Fraction(weights[element]):
        raise MatroidError("new weight must exceed the current one")
    raised = dict(weights)
    raised[element] = new_weight
    optimum = _weight(raised, greedy_min_basis(matroid, raised))
    if _weight(raised, basis) == optimum:
        return ExchangeResult(basis, "unchanged")
    rest = basis - {element}
    candidates = sorted(matroid.ground - basis, key=lambda x: (Fraction(raised[x]), id_key(x)))
    for f in candidates:
        swapped = rest | {f}
        if matroid.is_independent(swapped) and _weight(raised, swapped) == optimum:
            return ExchangeResult(swapped, "single-swap", element, f)
    raise MatroidError("no single swap restores optimality")


def all_matroids(n: int):
    """Every matroid on ground ``range(n)``, enumerated through basis families.

    Exponential in ``C(n, r)``; meant for ``n <= 5``.
    """
    ground = list(range(n))
    yield UniformMatroid(frozenset(ground), 0)
    for r in range(1, n + 1):
        candidates = [frozenset(c) for c in combinations(ground, r)]
        for mask in range(1, 1 << len(candidates)):
            family = [candidates[i] for i in range(len(candidates)) if mask >> i & 1]
            if satisfies_basis_exchange(family):
                yield ExplicitMatroid(tuple(family), frozenset(ground))


def verify_matroid_immunity(instance, profile_cap=None):
    """Run both pricing modes on a matroid-follower instance and require equal optima."""
    from .errors import ImmunityViolation
    from .pricing import price_of_positivity

    for f in instance.followers:
        spec = instance.systems.get(f.system)
        if not isinstance(spec, MatroidOracle):
            raise MatroidError(f"follower {f.id!r} is not a matroid follower")
    report = price_of_positivity(instance, profile_cap=profile_cap)
    if report.free.profit != report.nonnegative.profit:
        raise ImmunityViolation(f"matroid instance with free profit {report.free.profit} "
                                f"above nonnegative profit {report.nonnegative.profit}")
    return report
