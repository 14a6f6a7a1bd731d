"""Input validation helpers shared by the estimator facade and the CLI."""

from __future__ import annotations

import os
from typing import Mapping

from .errors import StructuralError
from .model import Instance, PriceVector
from .pricing import normalize_mode


def check_instance(obj) -> Instance:
    """Accept an :class:`Instance`, an instance JSON document, or a path to one."""
    from .jsonio import instance_from_json, load_instance

    if isinstance(obj, Instance):
        return obj
    if isinstance(obj, Mapping):
        return instance_from_json(dict(obj))
    if isinstance(obj, (str, os.PathLike)):
        return load_instance(obj)
    raise StructuralError(f"expected an Instance, a JSON mapping or a path, got {type(obj).__name__}")


def check_prices(instance: Instance, prices: Mapping) -> PriceVector:
    """Price vector on exactly the priceable resources of ``instance``."""
    if isinstance(prices, PriceVector):
        prices = prices.entries
    return PriceVector.for_instance(instance, prices)


def check_mode(mode: str) -> str:
    return normalize_mode(mode)


def check_cap(cap) -> int | None:
    if cap is None:
        return None
    if isinstance(cap, bool) or not isinstance(cap, int) or cap < 1:
        raise ValueError(f"profile cap must be a positive integer, got {cap!r}")
    return cap
