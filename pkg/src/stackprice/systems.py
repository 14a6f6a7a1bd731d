"""Follower strategy systems: explicit families of feasible resource sets.

Network followers get their family from :func:`enumerate_paths`; abstract
followers carry an explicit family, a clutter, or a matroid whose bases are
listed by :func:`family_of_bases`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from .errors import CapExceeded, ClutterViolation, NoPath, PathExplosion, StructuralError

DEFAULT_PATH_CAP = 100_000
DEFAULT_MATROID_CAP = 16

ORIGINS = ("path-system", "explicit", "matroid-bases", "clutter")


def id_key(x):
    """Sort key tolerating a mix of int and str identifiers."""
    return (isinstance(x, str), x)


def is_antichain(family) -> bool:
    sets = list(family)
    for i, a in enumerate(sets):
        for b in sets[i + 1:]:
            if a <= b or b <= a:
                return False
    return True


@dataclass(frozen=True)
class StrategySystem:
    """A follower's feasible family over a ground set of resource ids.

    ``sequences`` keeps the traversal order of each path for path systems and
    is empty otherwise.
    """

    family: tuple
    ground: frozenset = None
    origin: str = "explicit"
    sequences: tuple = field(default=(), compare=False)

    def __post_init__(self):
        family = tuple(frozenset(s) for s in self.family)
        object.__setattr__(self, "family", family)
        ground = frozenset().union(*family) if self.ground is None else frozenset(self.ground)
        object.__setattr__(self, "ground", ground)
        if not family:
            raise StructuralError("strategy system has an empty family")
        if self.origin not in ORIGINS:
            raise StructuralError(f"unknown origin {self.origin!r}")
        for s in family:
            if not s <= ground:
                raise StructuralError(f"member {sorted(s, key=id_key)} is not inside the ground set")
        if len(set(family)) != len(family):
            raise StructuralError("strategy system lists the same set twice")
        if self.origin == "clutter" and not is_antichain(family):
            raise ClutterViolation("clutter family contains nested members")

    def __len__(self):
        return len(self.family)

    def __iter__(self):
        return iter(self.family)

    def __getitem__(self, i):
        return self.family[i]

    def index(self, members) -> int:
        return self.family.index(frozenset(members))


@dataclass(frozen=True)
class StrategyProfile:
    """One choice per follower, aligned with ``instance.followers``.

    Each entry is an index into that follower's family, or ``None`` for the
    no-purchase option.
    """

    choices: tuple

    def __post_init__(self):
        object.__setattr__(self, "choices", tuple(self.choices))

    def __iter__(self):
        return iter(self.choices)

    def __len__(self):
        return len(self.choices)

    def __getitem__(self, k):
        return self.choices[k]


def enumerate_paths(instance, s, t, cap: int = DEFAULT_PATH_CAP) -> StrategySystem:
    """All simple directed ``s``-``t`` paths of a network instance.

    Paths come out in lexicographic order of their edge-id sequences, which
    makes the result independent of the order edges were inserted.
    """
    if s == t:
        raise StructuralError("source and sink coincide")
    out: dict = {}
    for r in instance.resources:
        if r.tail is None:
            raise StructuralError("path enumeration needs a network instance")
        out.setdefault(r.tail, []).append(r)
    for edges in out.values():
        edges.sort(key=lambda r: id_key(r.id))

    paths: list[tuple] = []
    on_path = {s}
    stack: list = []

    def dfs(node):
        if node == t:
            paths.append(tuple(stack))
            if len(paths) > cap:
                raise PathExplosion(cap)
            return
        for r in out.get(node, ()):
            if r.head in on_path:
                continue
            on_path.add(r.head)
            stack.append(r.id)
            dfs(r.head)
            stack.pop()
            on_path.discard(r.head)

    dfs(s)
    if not paths:
        raise NoPath(f"no directed path from {s!r} to {t!r}")
    ground = frozenset(e for p in paths for e in p)
    return StrategySystem(
        family=tuple(frozenset(p) for p in paths),
        ground=ground,
        origin="path-system",
        sequences=tuple(paths),
    )


def braess_path(instance, i: int, j: int) -> frozenset:
    """Edge set of the path entering the ladder at left node ``i`` and leaving at right node ``j``.

    ``instance`` must come from :func:`stackprice.generators.generalized_braess`,
    whose node names are ``"s"``, ``"t"``, ``"l<i>"`` and ``"r<i>"``.
    """
    if i > j:
        raise ValueError(f"need i <= j, got ({i}, {j})")
    by_ends = {(r.tail, r.head): r.id for r in instance.resources}
    try:
        edges = [by_ends[("s", f"l{i}")]]
        for k in range(i, j + 1):
            edges.append(by_ends[(f"l{k}", f"r{k}")])
            if k < j:
                edges.append(by_ends[(f"r{k}", f"l{k + 1}")])
        edges.append(by_ends[(f"r{j}", "t")])
    except KeyError as exc:
        raise ValueError(f"no ladder path for ({i}, {j})") from exc
    return frozenset(edges)


def family_of_bases(matroid, cap: int = DEFAULT_MATROID_CAP) -> StrategySystem:
    """List every basis of ``matroid`` by brute force over subsets of rank size."""
    ground = sorted(matroid.ground, key=id_key)
    if len(ground) > cap:
        raise CapExceeded(f"matroid ground set has {len(ground)} elements, cap is {cap}")
    rank = matroid.rank()
    bases = [frozenset(c) for c in combinations(ground, rank) if matroid.is_independent(c)]
    return StrategySystem(family=tuple(bases), ground=frozenset(ground), origin="matroid-bases")


def clutter(family: Sequence, ground: Optional[frozenset] = None) -> StrategySystem:
    return StrategySystem(family=tuple(family), ground=ground, origin="clutter")


def path_sequence(system: StrategySystem, index: int) -> Optional[tuple]:
    if system.sequences:
        return system.sequences[index]
    return None
