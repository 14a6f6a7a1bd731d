"""Structural immunity checks.

Networks: series-parallel recognition by reductions, and search for the
three-path s-t paradox that every other two-terminal graph contains.
Clutters: the necessary three-element pattern and the sufficient variant
with its canonical witness instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Hashable, Optional

from .errors import CapExceeded, ClutterViolation, StructuralError
from .model import Follower, Instance, Resource, prune_redundant
from .rational import INF
from .systems import StrategySystem, enumerate_paths, id_key, is_antichain

DEFAULT_SEARCH_CAP = 1_000_000


def terminals(instance: Instance) -> tuple:
    """Source and sink of a network instance.

    The followers' common pair if they share one, else the unique node
    without incoming edges and the unique node without outgoing edges.
    """
    if not instance.is_network:
        raise StructuralError("structural graph checks need a network instance")
    pairs = {(f.source, f.sink) for f in instance.followers}
    if len(pairs) == 1:
        return pairs.pop()
    heads = {r.head for r in instance.resources}
    tails = {r.tail for r in instance.resources}
    sources = [v for v in instance.nodes if v in tails and v not in heads]
    sinks = [v for v in instance.nodes if v in heads and v not in tails]
    if len(sources) != 1 or len(sinks) != 1:
        raise StructuralError("instance is not two-terminal")
    return sources[0], sinks[0]


# series-parallel recognition ---------------------------------------------------


@dataclass(frozen=True)
class StParadox:
    """Three paths as edge-id tuples; ``P1`` runs source to sink through ``a, u, v, b`` in order."""

    a: Hashable
    u: Hashable
    v: Hashable
    b: Hashable
    P1: tuple
    P2: tuple
    P3: tuple

    @property
    def edges(self) -> frozenset:
        return frozenset(self.P1) | frozenset(self.P2) | frozenset(self.P3)


@dataclass(frozen=True)
class SpVerdict:
    is_series_parallel: bool
    reduction_trace: tuple
    paradox: Optional[StParadox] = None
    source: Hashable = None
    sink: Hashable = None
    pruned: tuple = ()


def _reduce(edges: dict, s, t) -> tuple[dict, list]:
    """Apply parallel and series reductions until neither applies."""
    edges = dict(edges)
    trace: list = []
    fresh = 0
    changed = True
    while changed:
        changed = False
        by_ends: dict = {}
        for eid in sorted(edges, key=id_key):
            by_ends.setdefault(edges[eid], []).append(eid)
        for ends, group in by_ends.items():
            while len(group) > 1:
                e1, e2 = group.pop(0), group.pop(0)
                fresh += 1
                new = f"~{fresh}"
                del edges[e1], edges[e2]
                edges[new] = ends
                group.insert(0, new)
                trace.append(("parallel", e1, e2, new))
                changed = True
        indeg: dict = {}
        outdeg: dict = {}
        for eid, (u, v) in edges.items():
            outdeg.setdefault(u, []).append(eid)
            indeg.setdefault(v, []).append(eid)
        for node in sorted(set(indeg) | set(outdeg), key=id_key):
            if node in (s, t):
                continue
            ins, outs = indeg.get(node, []), outdeg.get(node, [])
            if len(ins) == 1 and len(outs) == 1:
                e_in, e_out = ins[0], outs[0]
                u, w = edges[e_in][0], edges[e_out][1]
                if u == w:
                    continue
                fresh += 1
                new = f"~{fresh}"
                del edges[e_in], edges[e_out]
                edges[new] = (u, w)
                trace.append(("series", node, e_in, e_out, new))
                changed = True
                break
    return edges, trace


def recognize_series_parallel(instance: Instance, *, search_cap: int = DEFAULT_SEARCH_CAP) -> SpVerdict:
    """Decide whether the (pruned) follower graph is two-terminal series-parallel.

    When it is not, a paradox witness is attached.
    """
    s, t = terminals(instance)
    pruned, removed = prune_redundant(instance)
    edges = {r.id: (r.tail, r.head) for r in pruned.resources}
    final, trace = _reduce(edges, s, t)
    is_sp = len(final) == 1 and next(iter(final.values())) == (s, t)
    paradox = None if is_sp else find_st_paradox(pruned, cap=search_cap)
    return SpVerdict(is_sp, tuple(trace), paradox, s, t, removed)


# s-t paradox ---------------------------------------------------------------


def _path_nodes(instance: Instance, path: tuple, s) -> list:
    nodes = [s]
    for eid in path:
        nodes.append(instance.resource(eid).head)
    return nodes


def find_st_paradox(instance: Instance, *, cap: int = DEFAULT_SEARCH_CAP) -> Optional[StParadox]:
    """First paradox in deterministic order, or ``None``.

    Main paths come in enumeration order, then node positions
    ``a < u < v < b`` lexicographically, then side paths by depth-first
    search over edges sorted by id.  ``cap`` bounds the total number of
    search steps.
    """
    s, t = terminals(instance)
    out: dict = {}
    for r in sorted(instance.resources, key=lambda r: id_key(r.id)):
        out.setdefault(r.tail, []).append(r)
    steps = [0]

    def side_paths(start, end, blocked):
        """Simple ``start``-``end`` paths whose interior avoids ``blocked``."""
        stack: list = []
        seen = {start}

        def dfs(node):
            for r in out.get(node, ()):
                steps[0] += 1
                if steps[0] > cap:
                    raise CapExceeded(f"paradox search exceeded {cap} steps")
                if r.head == end:
                    stack.append(r)
                    yield tuple(stack)
                    stack.pop()
                    continue
                if r.head in seen or r.head in blocked:
                    continue
                seen.add(r.head)
                stack.append(r)
                yield from dfs(r.head)
                stack.pop()
                seen.discard(r.head)

        yield from dfs(start)

    system = enumerate_paths(instance, s, t, cap=instance.path_cap)
    for p1 in system.sequences:
        nodes = _path_nodes(instance, p1, s)
        on_p1 = set(nodes)
        n = len(nodes)
        for ia in range(n):
            for iu in range(ia + 1, n):
                for iv in range(iu + 1, n):
                    for ib in range(iv + 1, n):
                        a, u, v, b = nodes[ia], nodes[iu], nodes[iv], nodes[ib]
                        for p2 in side_paths(a, v, on_p1):
                            p2_nodes = {a} | {r.head for r in p2}
                            for p3 in side_paths(u, b, on_p1 | p2_nodes):
                                return StParadox(a, u, v, b, tuple(p1), tuple(r.id for r in p2),
                                                 tuple(r.id for r in p3))
    return None


def paradox_to_instance(paradox: StParadox, host: Instance) -> Instance:
    """Witness pricing instance on the host graph with a price of positivity of 3/2.

    On the paradox subgraph the first edge of ``P2`` and the last edge of
    ``P3`` cost 1, and the ``P1`` edges leaving ``a``, leaving ``u`` and
    entering ``b`` are priceable; every other subgraph edge is free and
    every host edge outside the subgraph is prohibitive.  One follower with
    reservation 3.
    """
    s, t = terminals(host)
    p1_tail = {host.resource(e).tail: e for e in paradox.P1}
    p1_head = {host.resource(e).head: e for e in paradox.P1}
    priceable = {p1_tail[paradox.a], p1_tail[paradox.u], p1_head[paradox.b]}
    unit = {paradox.P2[0], paradox.P3[-1]}
    sub = paradox.edges
    resources = []
    for r in host.resources:
        if r.id in priceable:
            resources.append(Resource(r.id, 0, True, r.tail, r.head))
        elif r.id in unit:
            resources.append(Resource(r.id, 1, False, r.tail, r.head))
        elif r.id in sub:
            resources.append(Resource(r.id, 0, False, r.tail, r.head))
        else:
            resources.append(Resource(r.id, INF, False, r.tail, r.head))
    follower = Follower(host.followers[0].id, 3, source=s, sink=t)
    name = f"paradox-witness-{host.name}" if host.name else "paradox-witness"
    return Instance(resources, [follower], nodes=host.nodes, name=name, path_cap=host.path_cap)


# clutters ------------------------------------------------------------------


@dataclass(frozen=True)
class ClutterWitness:
    a: Hashable
    b: Hashable
    c: Hashable
    A: frozenset
    B: frozenset
    C: frozenset

    def as_tuple(self) -> tuple:
        return (self.a, self.b, self.c, self.A, self.B, self.C)


def _family(system) -> tuple:
    family = tuple(system.family) if isinstance(system, StrategySystem) else tuple(frozenset(s) for s in system)
    if not is_antichain(family):
        raise ClutterViolation("family contains nested members")
    return family


def clutter_witnesses(system):
    """Every pattern ``a in A-(B|C)``, ``b in (A&B)-C``, ``c in (A&C)-B`` in deterministic order."""
    family = _family(system)
    for A, B, C in permutations(family, 3):
        for a in sorted(A - (B | C), key=id_key):
            for b in sorted((A & B) - C, key=id_key):
                for c in sorted((A & C) - B, key=id_key):
                    yield ClutterWitness(a, b, c, A, B, C)


def clutter_necessary_condition(system) -> Optional[ClutterWitness]:
    """First witness of the necessary pattern, or ``None`` when the clutter is immune."""
    return next(clutter_witnesses(system), None)


def clutter_sufficient_condition(system, witness: ClutterWitness) -> tuple[bool, Optional[Instance]]:
    """Check that no member besides ``A``, ``B``, ``C`` fits inside their union; if so build the witness instance.

    The instance prices ``a``, ``b``, ``c`` (base cost 0), charges 1 on one
    element of ``(B & C) - A`` or else on one element each of ``B - A`` and
    ``C - A``, leaves the rest of the union free, prices everything else out
    and uses reservation 3.
    """
    family = _family(system)
    A, B, C = witness.A, witness.B, witness.C
    union = A | B | C
    if any(S <= union for S in family if S not in (A, B, C)):
        return False, None
    shared = sorted((B & C) - A, key=id_key)
    if shared:
        unit = {shared[0]}
    else:
        unit = {sorted(B - A, key=id_key)[0], sorted(C - A, key=id_key)[0]}
    ground = sorted(frozenset().union(*family), key=id_key)
    resources = []
    for e in ground:
        if e in (witness.a, witness.b, witness.c):
            resources.append(Resource(e, 0, True))
        elif e in unit:
            resources.append(Resource(e, 1))
        elif e in union:
            resources.append(Resource(e, 0))
        else:
            resources.append(Resource(e, INF))
    sys_ = StrategySystem(family, origin="clutter")
    inst = Instance(resources, [Follower(0, 3, system="S")], systems={"S": sys_}, name="clutter-witness")
    return True, inst


@dataclass(frozen=True)
class ClutterDiagnosis:
    """``verdict`` is ``immune``, ``paradox`` or ``undetermined``."""

    antichain_ok: bool
    nec_witness: Optional[ClutterWitness] = None
    suf_holds: Optional[bool] = None
    witness_instance: Optional[Instance] = field(default=None, compare=False)

    @property
    def verdict(self) -> str:
        if self.antichain_ok and self.nec_witness is None:
            return "immune"
        if self.suf_holds:
            return "paradox"
        return "undetermined"


def diagnose_clutter(system) -> ClutterDiagnosis:
    """Try every necessary-pattern witness until one also satisfies the sufficient condition."""
    family = tuple(system.family) if isinstance(system, StrategySystem) else tuple(frozenset(s) for s in system)
    if not is_antichain(family):
        return ClutterDiagnosis(False)
    first = None
    for w in clutter_witnesses(family):
        first = first or w
        holds, inst = clutter_sufficient_condition(family, w)
        if holds:
            return ClutterDiagnosis(True, w, True, inst)
    if first is None:
        return ClutterDiagnosis(True)
    return ClutterDiagnosis(True, first, False)


__all__ = [
    "StParadox",
    "SpVerdict",
    "ClutterWitness",
    "ClutterDiagnosis",
    "terminals",
    "recognize_series_parallel",
    "find_st_paradox",
    "paradox_to_instance",
    "clutter_witnesses",
    "clutter_necessary_condition",
    "clutter_sufficient_condition",
    "diagnose_clutter",
]
