"""Instance and result JSON, validated strictly against a schema.

Rationals are written as integers when whole and as ``"a/b"`` strings
otherwise; infinity is ``"inf"``.
"""

from __future__ import annotations

import json
from typing import Any

import jsonschema

from .errors import StructuralError
from .matroids import ExplicitMatroid, GraphicMatroid, MatroidOracle, UniformMatroid
from .model import Follower, Instance, Resource
from .rational import as_ext_rational, as_rational, format_rational
from .systems import StrategySystem, id_key

SCHEMA_VERSION = 1

_ID = {"type": ["integer", "string"]}
_RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"},
    ]
}
_EXT_RATIONAL = {"oneOf": _RATIONAL["oneOf"] + [{"const": "inf"}]}
_ID_SET = {"type": "array", "items": _ID}

_FAMILY_SYSTEM = {
    "type": "object",
    "properties": {
        "type": {"const": "family"},
        "origin": {"enum": ["explicit", "clutter"]},
        "family": {"type": "array", "items": _ID_SET, "minItems": 1},
        "ground": _ID_SET,
    },
    "required": ["type", "origin", "family"],
    "additionalProperties": False,
}

_MATROID_SYSTEM = {
    "type": "object",
    "properties": {
        "type": {"const": "matroid"},
        "kind": {"enum": ["uniform", "graphic", "explicit"]},
        "ground": _ID_SET,
        "params": {
            "type": "object",
            "properties": {
                "rank": {"type": "integer", "minimum": 0},
                "edges": {"type": "array", "items": {"type": "array", "items": _ID, "minItems": 3, "maxItems": 3}},
                "bases": {"type": "array", "items": _ID_SET, "minItems": 1},
            },
            "additionalProperties": False,
        },
    },
    "required": ["type", "kind", "ground", "params"],
    "additionalProperties": False,
}

INSTANCE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "version": {"const": SCHEMA_VERSION},
                "name": {"type": "string"},
                "nodes": {"type": "array", "items": _ID},
                "edges": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "id": _ID,
                            "tail": _ID,
                            "head": _ID,
                            "cost": _EXT_RATIONAL,
                            "priceable": {"type": "boolean"},
                        },
                        "required": ["id", "tail", "head", "cost", "priceable"],
                        "additionalProperties": False,
                    },
                },
                "followers": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "id": _ID,
                            "s": _ID,
                            "t": _ID,
                            "reservation": _RATIONAL,
                            "multiplicity": {"type": "integer", "minimum": 1},
                        },
                        "required": ["id", "s", "t", "reservation"],
                        "additionalProperties": False,
                    },
                },
            },
            "required": ["version", "nodes", "edges", "followers"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "version": {"const": SCHEMA_VERSION},
                "name": {"type": "string"},
                "resources": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {"id": _ID, "cost": _EXT_RATIONAL, "priceable": {"type": "boolean"}},
                        "required": ["id", "cost", "priceable"],
                        "additionalProperties": False,
                    },
                },
                "followers": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "id": _ID,
                            "system": {"type": "string"},
                            "reservation": _RATIONAL,
                            "multiplicity": {"type": "integer", "minimum": 1},
                        },
                        "required": ["id", "system", "reservation"],
                        "additionalProperties": False,
                    },
                },
                "systems": {"type": "object", "additionalProperties": {"oneOf": [_FAMILY_SYSTEM, _MATROID_SYSTEM]}},
            },
            "required": ["version", "resources", "followers", "systems"],
            "additionalProperties": False,
        },
    ],
}


def validate_instance_json(data: Any) -> None:
    try:
        jsonschema.validate(data, INSTANCE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise StructuralError(f"instance JSON rejected: {exc.message}") from None


def _sorted_ids(ids) -> list:
    return sorted(ids, key=id_key)


def _system_to_json(spec) -> dict:
    if isinstance(spec, StrategySystem):
        origin = "clutter" if spec.origin == "clutter" else "explicit"
        return {
            "type": "family",
            "origin": origin,
            "family": [_sorted_ids(s) for s in spec.family],
            "ground": _sorted_ids(spec.ground),
        }
    if isinstance(spec, UniformMatroid):
        return {"type": "matroid", "kind": "uniform", "ground": _sorted_ids(spec.ground), "params": {"rank": spec.r}}
    if isinstance(spec, GraphicMatroid):
        edges = [[e, *spec.edges[e]] for e in _sorted_ids(spec.edges)]
        return {"type": "matroid", "kind": "graphic", "ground": _sorted_ids(spec.ground), "params": {"edges": edges}}
    if isinstance(spec, ExplicitMatroid):
        return {
            "type": "matroid",
            "kind": "explicit",
            "ground": _sorted_ids(spec.ground),
            "params": {"bases": [_sorted_ids(b) for b in spec.bases]},
        }
    raise StructuralError(f"cannot serialize system of type {type(spec).__name__}")


def _system_from_json(data: dict):
    if data["type"] == "family":
        return StrategySystem(
            tuple(frozenset(s) for s in data["family"]),
            ground=frozenset(data["ground"]) if "ground" in data else None,
            origin=data["origin"],
        )
    kind, ground, params = data["kind"], frozenset(data["ground"]), data["params"]
    try:
        if kind == "uniform":
            return UniformMatroid(ground, params["rank"])
        if kind == "graphic":
            edges = {e: (u, v) for e, u, v in params["edges"]}
            if frozenset(edges) != ground:
                raise StructuralError("graphic matroid ground must equal its edge ids")
            return GraphicMatroid(edges)
        return ExplicitMatroid(tuple(frozenset(b) for b in params["bases"]), ground)
    except KeyError as exc:
        raise StructuralError(f"{kind} matroid needs parameter {exc.args[0]!r}") from None


def instance_to_json(instance: Instance) -> dict:
    out: dict = {"version": SCHEMA_VERSION}
    if instance.name:
        out["name"] = instance.name
    if instance.is_network:
        out["nodes"] = list(instance.nodes)
        out["edges"] = [
            {"id": r.id, "tail": r.tail, "head": r.head, "cost": format_rational(r.cost), "priceable": r.priceable}
            for r in instance.resources
        ]
        out["followers"] = [
            {"id": f.id, "s": f.source, "t": f.sink, "reservation": format_rational(f.reservation),
             "multiplicity": f.multiplicity}
            for f in instance.followers
        ]
        return out
    out["resources"] = [
        {"id": r.id, "cost": format_rational(r.cost), "priceable": r.priceable} for r in instance.resources
    ]
    out["followers"] = [
        {"id": f.id, "system": str(f.system), "reservation": format_rational(f.reservation),
         "multiplicity": f.multiplicity}
        for f in instance.followers
    ]
    out["systems"] = {str(name): _system_to_json(spec) for name, spec in instance.systems.items()}
    return out


def instance_from_json(data: Any) -> Instance:
    validate_instance_json(data)
    name = data.get("name", "")
    if "edges" in data:
        resources = [
            Resource(e["id"], as_ext_rational(e["cost"]), e["priceable"], e["tail"], e["head"]) for e in data["edges"]
        ]
        followers = [
            Follower(f["id"], as_rational(f["reservation"]), f.get("multiplicity", 1), source=f["s"], sink=f["t"])
            for f in data["followers"]
        ]
        return Instance(resources, followers, nodes=tuple(data["nodes"]), name=name)
    resources = [Resource(r["id"], as_ext_rational(r["cost"]), r["priceable"]) for r in data["resources"]]
    followers = [
        Follower(f["id"], as_rational(f["reservation"]), f.get("multiplicity", 1), system=f["system"])
        for f in data["followers"]
    ]
    systems = {name_: _system_from_json(spec) for name_, spec in data["systems"].items()}
    return Instance(resources, followers, systems=systems, name=name)


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_json(instance), indent=2)


def loads_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"invalid JSON: {exc}") from None
    return instance_from_json(data)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return loads_instance(fh.read())


def save_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_instance(instance))
        fh.write("\n")


# results ------------------------------------------------------------------


def profile_to_json(instance: Instance, profile) -> list:
    out = []
    for k, (f, choice) in enumerate(zip(instance.followers, profile)):
        members = None if choice is None else _sorted_ids(instance.system_at(k).family[choice])
        out.append({"follower": f.id, "choice": choice, "set": members})
    return out


def solution_to_json(instance: Instance, solution) -> dict:
    return {
        "mode": solution.mode,
        "profit": format_rational(solution.profit),
        "prices": {str(rid): format_rational(v) for rid, v in solution.prices.items()},
        "profile": profile_to_json(instance, solution.profile),
        "binding_constraints": [
            {"follower": fid, "kind": kind, "alternative": alt} for fid, kind, alt in solution.binding_constraints
        ],
    }


def pop_report_to_json(instance: Instance, report) -> dict:
    return {
        "free": solution_to_json(instance, report.free),
        "nonnegative": solution_to_json(instance, report.nonnegative),
        "pop": format_rational(report.pop),
        "harmonic_bound": format_rational(report.harmonic_bound),
        "within_harmonic_bound": report.within_harmonic_bound,
        "surplus_upper": format_rational(report.surplus_upper),
    }


__all__ = [
    "INSTANCE_SCHEMA",
    "validate_instance_json",
    "instance_to_json",
    "instance_from_json",
    "dumps_instance",
    "loads_instance",
    "load_instance",
    "save_instance",
    "profile_to_json",
    "solution_to_json",
    "pop_report_to_json",
]
