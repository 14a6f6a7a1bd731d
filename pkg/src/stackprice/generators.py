"""Deterministic instance families and seeded random instances."""

from __future__ import annotations

import random
from dataclasses import replace
from fractions import Fraction

from .matroids import ExplicitMatroid, GraphicMatroid, UniformMatroid, greedy_min_basis
from .model import ALL_ZERO, Follower, Instance, Resource, prune_redundant, shortest_label
from .systems import StrategySystem, family_of_bases


def _network(edges, followers, name, nodes=None):
    """Build a network instance from ``(tail, head, cost, priceable)`` tuples; ids follow list order."""
    resources = [Resource(i, cost, priceable, tail, head) for i, (tail, head, cost, priceable) in enumerate(edges)]
    if nodes is None:
        seen = {}
        for tail, head, _, _ in edges:
            seen.setdefault(tail)
            seen.setdefault(head)
        nodes = tuple(seen)
    return Instance(resources=resources, followers=followers, nodes=nodes, name=name)


def braess_basic() -> Instance:
    """Four-node Braess graph: priceable chain s-u-v-t, unit-cost shortcuts s-v and u-t, R = 3.

    Edge ids 0, 1, 2 are the priceable edges in path order.
    """
    edges = [
        ("s", "u", 0, True),
        ("u", "v", 0, True),
        ("v", "t", 0, True),
        ("s", "v", 1, False),
        ("u", "t", 1, False),
    ]
    return _network(edges, [Follower(0, 3, source="s", sink="t")], "braess", nodes=("s", "u", "v", "t"))


def braess_costs(n: int) -> tuple[list, list]:
    """Left and right fixed costs of the ``h = 4**(n-1)`` ladder, 1-indexed lists padded at 0.

    The upper half of the left costs is the block sequence 1; 2; 2,3; 2,3,3,4; ...
    where every block is the previous ones plus one.  The lower half mirrors it
    through ``left[i] = 2n-2 - left[h+1-i]``, and ``right[i] = 2n-2 - left[i]``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    h = 4 ** (n - 1)
    half = h // 2
    left = [None] * (h + 1)
    left[half + 1] = 1
    for block in range(1, 2 * n - 2):
        size = 2 ** (block - 1)
        for j in range(1, size + 1):
            left[half + size + j] = left[half + j] + 1
    for i in range(1, half + 1):
        left[i] = 2 * n - 2 - left[h + 1 - i]
    right = [None] + [2 * n - 2 - left[i] for i in range(1, h + 1)]
    return left, right


def generalized_braess(n: int) -> Instance:
    """Ladder graph on ``h = 4**(n-1)`` rungs with one follower and ``R = 2n``.

    Nodes are ``s``, ``t``, ``l1..lh`` and ``r1..rh``.  Edge ids: ``s -> l_i``
    is ``i-1``, ``r_i -> t`` is ``h+i-1``, the forward rung ``l_i -> r_i`` is
    ``2h+i-1`` and the back rung ``r_i -> l_{i+1}`` is ``3h+i-1``.
    """
    left, right = braess_costs(n)
    h = len(left) - 1
    edges = []
    for i in range(1, h + 1):
        edges.append(("s", f"l{i}", left[i], False))
    for i in range(1, h + 1):
        edges.append((f"r{i}", "t", right[i], False))
    for i in range(1, h + 1):
        edges.append((f"l{i}", f"r{i}", 0, True))
    for i in range(1, h):
        edges.append((f"r{i}", f"l{i + 1}", 0, True))
    nodes = ("s", "t") + tuple(f"l{i}" for i in range(1, h + 1)) + tuple(f"r{i}" for i in range(1, h + 1))
    return _network(edges, [Follower(0, 2 * n, source="s", sink="t")], f"generalized-braess-{n}", nodes)


def path_graph(m: int) -> Instance:
    """Priceable chain ``s -> t1 -> ... -> tm`` with fixed bypasses ``s -> ti`` of cost ``2**(m-i+1)``.

    Follower group ``i`` (id ``i``) has ``2**(i-1)`` members travelling to
    ``ti`` with reservation equal to the bypass cost.  Chain edge ``i`` has id
    ``i-1``; bypass ``i`` has id ``m+i-1``.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    terminals = ["s"] + [f"t{i}" for i in range(1, m + 1)]
    cost = {i: 2 ** (m - i + 1) for i in range(1, m + 1)}
    edges = [(terminals[i - 1], terminals[i], 0, True) for i in range(1, m + 1)]
    edges += [("s", terminals[i], cost[i], False) for i in range(1, m + 1)]
    followers = [Follower(i, cost[i], 2 ** (i - 1), source="s", sink=terminals[i]) for i in range(1, m + 1)]
    return _network(edges, followers, f"path-graph-{m}", tuple(terminals))


def two_follower_sp() -> Instance:
    """Series-parallel graph where two followers cannot both be drained (R = 2 and R = 1)."""
    edges = [
        ("s1", "s2", 0, False),
        ("s1", "t", 2, False),
        ("s2", "t", 0, True),
        ("s2", "t", 1, False),
    ]
    followers = [Follower(1, 2, source="s1", sink="t"), Follower(2, 1, source="s2", sink="t")]
    return _network(edges, followers, "two-follower-sp", nodes=("s1", "s2", "t"))


def triangle_network() -> Instance:
    """Three followers around a priceable directed triangle ``n1 -> n2 -> n3 -> n1``."""
    edges = [
        ("n1", "n2", 0, True),
        ("n2", "n3", 0, True),
        ("n3", "n1", 0, True),
        ("n1", "n3", 1, False),
        ("n2", "n1", 2, False),
        ("n3", "n2", 2, False),
        ("n3", "n1", 1, False),
    ]
    followers = [
        Follower(1, 1, source="n1", sink="n3"),
        Follower(2, 2, source="n2", sink="n1"),
        Follower(3, 2, source="n3", sink="n2"),
    ]
    return _network(edges, followers, "triangle", nodes=("n1", "n2", "n3"))


def st_paradox_graph() -> Instance:
    """The three-path pattern on its own: every path segment has two edges, all costs zero.

    Main path ``s a m1 u m2 v m3 b t``; detour ``a q2 v`` and detour ``u q3 b``.
    """
    edges = [
        ("s", "a", 0, False),
        ("a", "m1", 0, False),
        ("m1", "u", 0, False),
        ("u", "m2", 0, False),
        ("m2", "v", 0, False),
        ("v", "m3", 0, False),
        ("m3", "b", 0, False),
        ("b", "t", 0, False),
        ("a", "q2", 0, False),
        ("q2", "v", 0, False),
        ("u", "q3", 0, False),
        ("q3", "b", 0, False),
    ]
    return _network(edges, [Follower(0, 3, source="s", sink="t")], "st-paradox")


# random instances ------------------------------------------------------------


def _rand_cost(rng: random.Random, max_cost: int) -> Fraction:
    return Fraction(rng.randint(0, 2 * max_cost), rng.choice((1, 2, 2)))


def _sp_edges(rng: random.Random, n_edges: int):
    """Random two-terminal series-parallel multigraph by repeated edge substitution."""
    edges = [("s", "t")]
    fresh = 0
    while len(edges) < n_edges:
        k = rng.randrange(len(edges))
        tail, head = edges[k]
        if rng.random() < 0.5:
            fresh += 1
            mid = f"x{fresh}"
            edges[k:k + 1] = [(tail, mid), (mid, head)]
        else:
            edges.insert(k + 1, (tail, head))
    return edges


def _dag_edges(rng: random.Random, n_nodes: int, density: float):
    edges = []
    for i in range(n_nodes - 1):
        edges.append((i, rng.randint(i + 1, n_nodes - 1)))
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < density:
                edges.append((i, j))
    if rng.random() < 0.3 and edges:
        edges.append(rng.choice(edges))
    rng.shuffle(edges)
    return edges


def random_instance(seed, mode: str = "sp", *, n_edges: int = None, n_nodes: int = None,
                    followers: int = 1, p_priceable: float = 0.5, max_cost: int = 3,
                    density: float = 0.35) -> Instance:
    """Reproducible random instance.

    ``mode`` is ``"sp"`` (series-parallel by construction, single source and
    sink), ``"dag"`` (general acyclic two-terminal graph, possibly extra
    followers between intermediate nodes) or ``"clutter"`` (abstract
    instance with a random antichain family).  The mode is recorded in
    ``Instance.name``.
    """
    rng = random.Random(f"{mode}:{seed}")
    if mode == "clutter":
        return _random_clutter(rng, seed, followers, p_priceable, max_cost)
    if mode == "sp":
        pairs = _sp_edges(rng, n_edges or rng.randint(3, 7))
        ends = [("s", "t")] * followers
        nodes = None
    elif mode == "dag":
        size = n_nodes or rng.randint(4, 6)
        pairs = _dag_edges(rng, size, density)
        ends = [(0, size - 1)]
        reach = _reachability(size, pairs)
        others = [(a, b) for a in range(size) for b in range(a + 1, size) if b in reach[a] and (a, b) != (0, size - 1)]
        for _ in range(followers - 1):
            ends.append(rng.choice(others) if others else (0, size - 1))
        nodes = tuple(range(size))
    else:
        raise ValueError(f"unknown random mode {mode!r}")

    edges = []
    for tail, head in pairs:
        priceable = rng.random() < p_priceable
        edges.append((tail, head, 0 if priceable else _rand_cost(rng, max_cost), priceable))
    if not any(e[3] for e in edges):
        k = rng.randrange(len(edges))
        edges[k] = (edges[k][0], edges[k][1], 0, True)
    fol = [Follower(k, 0, source=a, sink=b) for k, (a, b) in enumerate(ends)]
    inst = _network(edges, fol, f"random-{mode}-{seed}", nodes=nodes)
    inst, _ = prune_redundant(inst)
    if not any(r.priceable for r in inst.resources):
        return random_instance(f"{seed}+", mode, n_edges=n_edges, n_nodes=n_nodes, followers=followers,
                               p_priceable=p_priceable, max_cost=max_cost, density=density)
    return _with_reservations(inst, rng, max_cost)


def _with_reservations(inst: Instance, rng: random.Random, max_cost: int) -> Instance:
    """Reservations at least each follower's cheapest zero-price option, so buying is possible."""
    followers = []
    for f in inst.followers:
        floor = shortest_label(inst, f, ALL_ZERO)
        extra = Fraction(rng.randint(0, 4 * max_cost), rng.choice((1, 1, 2)))
        followers.append(replace(f, reservation=floor + extra))
    return replace(inst, followers=tuple(followers))


def _reachability(size, pairs):
    out = {i: set() for i in range(size)}
    for a, b in pairs:
        out[a].add(b)
    reach = {}
    for i in reversed(range(size)):
        r = set()
        for j in out[i]:
            r.add(j)
            r |= reach[j]
        reach[i] = r
    return reach


def _random_clutter(rng, seed, followers, p_priceable, max_cost):
    size = rng.randint(4, 6)
    ground = list(range(size))
    family: list = []
    attempts = 0
    while len(family) < rng.randint(2, 4) and attempts < 50:
        attempts += 1
        cand = frozenset(rng.sample(ground, rng.randint(1, min(3, size))))
        if all(not (cand <= s or s <= cand) for s in family):
            family.append(cand)
    if not family:
        family = [frozenset(ground)]
    used = sorted(frozenset().union(*family))
    resources = []
    for rid in used:
        priceable = rng.random() < p_priceable
        resources.append(Resource(rid, 0 if priceable else _rand_cost(rng, max_cost), priceable))
    if not any(r.priceable for r in resources):
        resources[0] = Resource(resources[0].id, 0, True)
    system = StrategySystem(tuple(family), origin="clutter")
    fol = [Follower(k, 0, system="S") for k in range(followers)]
    inst = Instance(resources, fol, systems={"S": system}, name=f"random-clutter-{seed}")
    return _with_reservations(inst, rng, max_cost)


def random_matroid(rng: random.Random, ground_size: int, kind: str = None):
    """A random uniform, graphic, or explicit (listed-bases) matroid on ``range(ground_size)``."""
    kind = kind or rng.choice(("uniform", "graphic", "explicit"))
    ground = frozenset(range(ground_size))
    if kind == "uniform":
        return UniformMatroid(ground, rng.randint(1, ground_size))
    n_vertices = rng.randint(2, 5)
    edges = {}
    for e in range(ground_size):
        u = rng.randrange(n_vertices)
        v = rng.randrange(n_vertices - 1)
        if v >= u:
            v += 1
        edges[e] = (u, v)
    graphic = GraphicMatroid(edges)
    if kind == "graphic":
        return graphic
    return ExplicitMatroid(family_of_bases(graphic).family, ground)


def random_matroid_instance(seed, *, max_ground: int = 7, max_followers: int = 3, max_cost: int = 4) -> Instance:
    """Abstract instance whose followers pick minimum-cost bases of random matroids on a shared ground set."""
    rng = random.Random(f"matroid:{seed}")
    size = rng.randint(2, max_ground)
    resources = []
    for rid in range(size):
        priceable = rng.random() < 0.5
        resources.append(Resource(rid, 0 if priceable else _rand_cost(rng, max_cost), priceable))
    if not any(r.priceable for r in resources):
        resources[0] = Resource(0, 0, True)
    systems, followers = {}, []
    for k in range(rng.randint(1, max_followers)):
        matroid = random_matroid(rng, size)
        if matroid.rank() == 0:
            matroid = UniformMatroid(matroid.ground, 1)
        systems[f"M{k}"] = matroid
        followers.append(Follower(k, Fraction(rng.randint(0, 4 * max_cost), rng.choice((1, 2))), system=f"M{k}"))
    return Instance(resources, followers, systems=systems, name=f"random-matroid-{seed}")


FAMILIES = {
    "braess": braess_basic,
    "generalized-braess": generalized_braess,
    "path-graph": path_graph,
    "two-follower-sp": two_follower_sp,
    "triangle": triangle_network,
    "random": random_instance,
}

__all__ = [
    "braess_basic",
    "braess_costs",
    "generalized_braess",
    "path_graph",
    "two_follower_sp",
    "triangle_network",
    "st_paradox_graph",
    "random_instance",
    "random_matroid",
    "random_matroid_instance",
    "greedy_min_basis",
]
