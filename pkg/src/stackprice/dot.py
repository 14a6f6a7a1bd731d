"""Graphviz DOT export for network instances, solutions and paradox witnesses."""

from __future__ import annotations

import json
from typing import Mapping, Optional

from .errors import StructuralError
from .model import Instance
from .rational import format_str

_PATH_COLORS = ("red", "blue", "darkgreen", "orange", "purple", "brown")


def _quote(x) -> str:
    return json.dumps(str(x))


def to_dot(instance: Instance, *, prices: Optional[Mapping] = None, chosen=(), highlight: Optional[Mapping] = None) -> str:
    """DOT digraph with priceable edges drawn bold.

    ``prices`` maps edge ids (or their string forms) to prices shown in the
    labels.  ``chosen`` is an iterable of edge-id sets, each drawn in its own
    color; ``highlight`` maps edge id to an explicit color and wins over
    ``chosen``.
    """
    if not instance.is_network:
        raise StructuralError("DOT export needs a network instance")
    prices = {str(k): v for k, v in (prices or {}).items()}
    colors: dict = {}
    for n, members in enumerate(chosen):
        for eid in members:
            colors.setdefault(eid, _PATH_COLORS[n % len(_PATH_COLORS)])
    colors.update(highlight or {})
    lines = [f"digraph {_quote(instance.name or 'instance')} {{", "  rankdir=LR;"]
    for v in instance.nodes:
        lines.append(f"  {_quote(v)};")
    for r in instance.resources:
        attrs = []
        if r.priceable:
            label = f"e{r.id}: p"
            if str(r.id) in prices:
                label += f"={format_str(prices[str(r.id)])}"
            if r.cost != 0:
                label += f"+{format_str(r.cost)}"
            attrs.append('style="bold"')
        else:
            label = f"e{r.id}: {format_str(r.cost)}"
        attrs.insert(0, f"label={_quote(label)}")
        if r.id in colors:
            attrs.append(f'color="{colors[r.id]}"')
            attrs.append("penwidth=2")
        lines.append(f"  {_quote(r.tail)} -> {_quote(r.head)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def solution_dot(instance: Instance, result: Mapping) -> str:
    """DOT for an instance plus a results document (one solve mode) as written by the CLI."""
    if "free" in result and "mode" not in result:
        result = result["free"]
    chosen = [entry["set"] for entry in result.get("profile", ()) if entry.get("set") is not None]
    known = {str(r.id): r.id for r in instance.resources}
    chosen = [[known.get(str(e), e) for e in s] for s in chosen]
    return to_dot(instance, prices=result.get("prices"), chosen=chosen)


def paradox_dot(instance: Instance, paradox) -> str:
    colors = {}
    for eid in paradox.P1:
        colors[eid] = "black"
    for eid in paradox.P2:
        colors[eid] = "red"
    for eid in paradox.P3:
        colors[eid] = "blue"
    return to_dot(instance, highlight=colors)


__all__ = ["to_dot", "solution_dot", "paradox_dot"]
