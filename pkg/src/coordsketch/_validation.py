"""Input checks shared by the public entry points."""

from __future__ import annotations

import numbers
from typing import Any, Mapping

from .core import Key, RankFamily, WeightedSetCollection


def check_k(k: Any, name: str = "k") -> int:
    if isinstance(k, bool) or not isinstance(k, numbers.Integral) or k < 1:
        raise ValueError(f"{name} must be a positive integer, got {k!r}")
    return int(k)


def check_seed(seed: Any) -> int:
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)


def check_family(family: Any) -> RankFamily:
    return RankFamily.parse(family)


def check_collection(data: Any) -> WeightedSetCollection:
    """Coerce ``data`` to a :class:`WeightedSetCollection`.

    Accepts a collection as-is, or a mapping ``set_id -> {key_id: weight}``,
    or ``set_id -> [key_id, ...]`` (unit weights). A key listed in several
    sets must carry the same weight in each.
    """
    if isinstance(data, WeightedSetCollection):
        return data
    if not isinstance(data, Mapping) or not data:
        raise ValueError("expected a WeightedSetCollection or a nonempty mapping of set id to members")
    weights: dict[int, float] = {}
    sets: dict[str, list[int]] = {}
    for set_id, members in data.items():
        items = members.items() if isinstance(members, Mapping) else ((m, 1.0) for m in members)
        ids = []
        for kid, w in items:
            kid, w = int(kid), float(w)
            if kid in weights and weights[kid] != w:
                raise ValueError(f"key {kid} has conflicting weights {weights[kid]} and {w}")
            weights[kid] = w
            ids.append(kid)
        sets[str(set_id)] = ids
    return WeightedSetCollection((Key(i, w) for i, w in sorted(weights.items())), sets)
