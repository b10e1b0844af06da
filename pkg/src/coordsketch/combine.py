"""Union-sketch, short (SCS) and long (LCS) combinations of coordinated sketches."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import BottomKSketch, RankFamily, SketchEntry


class Kind(enum.Enum):
    UNION = "UNION"
    SCS = "SCS"
    LCS = "LCS"

    @classmethod
    def parse(cls, value: "Kind | str") -> "Kind":
        if isinstance(value, Kind):
            return value
        try:
            return cls[str(value).strip().upper()]
        except KeyError:
            raise ValueError(f"unknown combination kind {value!r}") from None


class Membership(enum.Enum):
    IN = "IN"
    OUT = "OUT"
    UNKNOWN = "UNKNOWN"


class CoordinationError(ValueError):
    """Sketches passed to a combination were not built from one rank assignment."""


@dataclass(frozen=True)
class Combination:
    """A pooled view of coordinated sketches of the sets in ``source_set_ids``.

    ``threshold`` is the rank below which entries are kept: the (k+1)-st
    smallest rank of the union for ``UNION``, and ``min_A r_{k+1}(A)`` for
    ``SCS`` and ``LCS`` (for ``LCS`` it is informative only; each entry's
    conditioning rank lives in ``per_key_tau``).
    """

    kind: Kind
    k: int
    family: RankFamily
    source_set_ids: tuple[str, ...]
    entries: tuple[SketchEntry, ...]
    threshold: float
    set_thresholds: Mapping[str, float]
    membership: Mapping[tuple[int, str], Membership]
    per_key_tau: Mapping[int, float] = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    def key_ids(self) -> list[int]:
        return [e.key_id for e in self.entries]

    def member(self, key_id: int, set_id: str) -> Membership:
        return membership_query(self, key_id, set_id)


def _check_sketches(sketches: Sequence[BottomKSketch]) -> tuple[dict[int, SketchEntry], dict[str, BottomKSketch]]:
    if not sketches:
        raise ValueError("need at least one sketch")
    k = sketches[0].k
    family = sketches[0].family
    by_set: dict[str, BottomKSketch] = {}
    pooled: dict[int, SketchEntry] = {}
    for sk in sketches:
        if sk.k != k:
            raise ValueError(f"sketch {sk.set_id!r} has k={sk.k}, expected {k}")
        if sk.family is not family:
            raise ValueError(f"sketch {sk.set_id!r} uses {sk.family.value} ranks, expected {family.value}")
        if sk.set_id in by_set:
            raise ValueError(f"duplicate set id {sk.set_id!r}")
        by_set[sk.set_id] = sk
        for e in sk.entries:
            seen = pooled.get(e.key_id)
            if seen is None:
                pooled[e.key_id] = e
            elif seen.rank != e.rank or seen.weight != e.weight:
                raise CoordinationError(
                    f"key {e.key_id} has rank {seen.rank!r} and {e.rank!r} in different sketches"
                )
    return pooled, by_set


def _sorted_entries(entries) -> list[SketchEntry]:
    return sorted(entries, key=lambda e: (e.rank, e.key_id))


def _full_membership(entries, by_set) -> dict[tuple[int, str], Membership]:
    return {
        (e.key_id, s): Membership.IN if e.key_id in sk else Membership.OUT
        for e in entries
        for s, sk in by_set.items()
    }


def union_sketch(sketches: Sequence[BottomKSketch]) -> Combination:
    """Bottom-k sketch of the union of the sets, computed from their sketches."""
    pooled, by_set = _check_sketches(sketches)
    k = sketches[0].k
    ordered = _sorted_entries(pooled.values())
    kept = ordered[:k]
    threshold = min([e.rank for e in ordered[k:]] + [sk.threshold for sk in by_set.values()])
    return Combination(
        kind=Kind.UNION,
        k=k,
        family=sketches[0].family,
        source_set_ids=tuple(by_set),
        entries=tuple(kept),
        threshold=threshold,
        set_thresholds={s: sk.threshold for s, sk in by_set.items()},
        membership=_full_membership(kept, by_set),
    )


def scs(sketches: Sequence[BottomKSketch]) -> Combination:
    """Short combination: pooled keys ranked below ``min_A r_{k+1}(A)``, with full membership."""
    pooled, by_set = _check_sketches(sketches)
    threshold = min(sk.threshold for sk in by_set.values())
    kept = [e for e in _sorted_entries(pooled.values()) if e.rank < threshold]
    return Combination(
        kind=Kind.SCS,
        k=sketches[0].k,
        family=sketches[0].family,
        source_set_ids=tuple(by_set),
        entries=tuple(kept),
        threshold=threshold,
        set_thresholds={s: sk.threshold for s, sk in by_set.items()},
        membership=_full_membership(kept, by_set),
    )


def lcs(sketches: Sequence[BottomKSketch]) -> Combination:
    """Long combination: every pooled key, with partial membership knowledge.

    ``per_key_tau[i]`` is ``r_{k+1}`` of the set with the largest threshold
    among the sets whose sketch holds ``i``.
    """
    pooled, by_set = _check_sketches(sketches)
    # ascending threshold, ties by set id
    order = sorted(by_set, key=lambda s: (by_set[s].threshold, s))
    entries = _sorted_entries(pooled.values())
    per_key_tau: dict[int, float] = {}
    membership: dict[tuple[int, str], Membership] = {}
    for e in entries:
        for s in order:
            sk = by_set[s]
            if e.key_id in sk:
                per_key_tau[e.key_id] = sk.threshold
                membership[(e.key_id, s)] = Membership.IN
            elif e.rank < sk.threshold:
                membership[(e.key_id, s)] = Membership.OUT
            else:
                membership[(e.key_id, s)] = Membership.UNKNOWN
    return Combination(
        kind=Kind.LCS,
        k=sketches[0].k,
        family=sketches[0].family,
        source_set_ids=tuple(by_set),
        entries=tuple(entries),
        threshold=min(sk.threshold for sk in by_set.values()),
        set_thresholds={s: sk.threshold for s, sk in by_set.items()},
        membership=membership,
        per_key_tau=per_key_tau,
    )


_BUILDERS = {Kind.UNION: union_sketch, Kind.SCS: scs, Kind.LCS: lcs}


def combine(sketches: Sequence[BottomKSketch], kind: Kind | str) -> Combination:
    return _BUILDERS[Kind.parse(kind)](sketches)


def membership_query(combination: Combination, key_id: int, set_id: str) -> Membership:
    """Whether ``key_id`` belongs to ``set_id`` as far as the combination can tell."""
    try:
        return combination.membership[(key_id, set_id)]
    except KeyError:
        if set_id not in combination.source_set_ids:
            raise KeyError(f"set {set_id!r} is not a source of this combination") from None
        raise KeyError(f"key {key_id} is not in this combination") from None


def entry_tau(combination: Combination, key_id: int) -> float:
    """Conditioning rank used for the adjusted weight of ``key_id``."""
    if combination.kind is Kind.LCS:
        return combination.per_key_tau[key_id]
    return combination.threshold


def is_exhausted(combination: Combination) -> bool:
    return all(math.isinf(t) for t in combination.set_thresholds.values())

