"""Rank assignments, bottom-k and k-mins sketches of weighted sets.

A rank assignment maps every key to a rank drawn from a weight-dependent
distribution. Sketches of different sets built from the same assignment are
*coordinated*: a key shared by two sets gets the same rank in both, which is
what lets sketches be combined later on.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

INF = math.inf

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TWO_M53 = 2.0**-53


class RankFamily(enum.Enum):
    """Rank distribution family.

    ``WS`` draws exponential ranks ``-ln(u)/w`` (bottom-k = weighted sampling
    without replacement). ``PRI`` draws ``u/w`` (priority sampling).
    """

    WS = "WS"
    PRI = "PRI"

    @classmethod
    def parse(cls, value: "RankFamily | str") -> "RankFamily":
        if isinstance(value, RankFamily):
            return value
        try:
            return cls[str(value).strip().upper()]
        except KeyError:
            raise ValueError(f"unknown rank family {value!r}; expected WS or PRI") from None

    def rank_from_uniform(self, u, w):
        """Map uniform ``u`` in (0, 1) and weight ``w`` to a rank value."""
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=float)
        if self is RankFamily.WS:
            out = -np.log(u) / w
        else:
            out = u / w
        return out if out.ndim else float(out)

    def inclusion_prob(self, w, tau):
        """Probability that a key of weight ``w`` gets a rank strictly below ``tau``.

        Works elementwise on arrays. ``tau = inf`` gives 1, ``tau = 0`` gives 0.
        """
        w = np.asarray(w, dtype=float)
        tau = np.asarray(tau, dtype=float)
        with np.errstate(invalid="ignore", over="ignore"):
            if self is RankFamily.WS:
                p = -np.expm1(-w * tau)
            else:
                p = np.minimum(1.0, w * tau)
        p = np.where(np.isinf(tau), 1.0, p)
        p = np.where(tau <= 0, 0.0, p)
        return p if p.ndim else float(p)


@dataclass(frozen=True, eq=True)
class Key:
    """A ground-set element: integer id, positive weight and attributes."""

    id: int
    weight: float
    attrs: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        try:
            weight = float(self.weight)
        except (TypeError, ValueError):
            raise ValueError(f"key {self.id}: weight {self.weight!r} is not a number") from None
        if not (weight > 0 and math.isfinite(weight)):
            raise ValueError(f"key {self.id}: weight must be positive and finite, got {self.weight!r}")
        if not 0 <= int(self.id) <= _MASK64:
            raise ValueError(f"key id {self.id} outside the unsigned 64-bit range")
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "weight", weight)

    def __hash__(self):
        return hash(self.id)


class WeightedSetCollection:
    """A ground set of keys together with named subsets of key ids."""

    def __init__(self, ground: Iterable[Key], sets: Mapping[str, Iterable[int]]):
        self.ground: dict[int, Key] = {}
        for key in ground:
            if key.id in self.ground:
                raise ValueError(f"duplicate key id {key.id}")
            self.ground[key.id] = key
        self.sets: dict[str, frozenset[int]] = {}
        for set_id, members in sets.items():
            members = frozenset(int(m) for m in members)
            missing = members.difference(self.ground)
            if missing:
                raise ValueError(f"set {set_id!r} references unknown keys {sorted(missing)[:5]}")
            self.sets[str(set_id)] = members

    def __repr__(self):
        return f"WeightedSetCollection(|ground|={len(self.ground)}, sets={list(self.sets)})"

    def keys_of(self, set_id: str) -> list[Key]:
        """Keys of one set, in ascending id order."""
        return [self.ground[i] for i in sorted(self.sets[set_id])]

    def union_ids(self, set_ids: Iterable[str] | None = None) -> list[int]:
        set_ids = self.sets if set_ids is None else set_ids
        out: set[int] = set()
        for s in set_ids:
            out |= self.sets[s]
        return sorted(out)

    def weight(self, ids: Iterable[int]) -> float:
        return math.fsum(self.ground[i].weight for i in ids)

    def subcollection(self, set_ids: Sequence[str]) -> "WeightedSetCollection":
        ids = self.union_ids(set_ids)
        return WeightedSetCollection([self.ground[i] for i in ids], {s: self.sets[s] for s in set_ids})


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _as_u64(x) -> np.ndarray:
    if isinstance(x, np.ndarray) and x.dtype == np.uint64:
        return x
    if np.ndim(x) == 0:
        return np.uint64(int(x) & _MASK64)
    arr = np.asarray(x)
    if arr.dtype.kind in "ui" and (arr.dtype.kind == "u" or (arr >= 0).all()):
        return arr.astype(np.uint64)
    return np.array([int(v) & _MASK64 for v in arr.ravel()], dtype=np.uint64).reshape(arr.shape)


def hash_uniform(seeds, ids) -> np.ndarray:
    """Deterministic uniforms in the open interval (0, 1) for (seed, id) pairs.

    ``seeds`` and ``ids`` broadcast against each other, so a column of seeds
    against a row of ids yields one row of uniforms per seed.
    """
    seeds = _as_u64(seeds)
    ids = _as_u64(ids)
    with np.errstate(over="ignore"):
        h = _mix64(_mix64(seeds + _GOLDEN) ^ (ids * _GOLDEN))
    # midpoint of one of 2**53 equal cells: never 0, never 1
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53


@dataclass(frozen=True)
class RankAssignment:
    """Hash-based coordinated rank assignment: rank is a pure function of (seed, id, weight)."""

    family: RankFamily
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "family", RankFamily.parse(self.family))
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)

    def uniforms(self, ids) -> np.ndarray:
        return hash_uniform(self.seed, ids)

    def ranks(self, ids, weights) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.uint64)
        return np.asarray(self.family.rank_from_uniform(self.uniforms(ids), np.asarray(weights, dtype=float)), dtype=float).reshape(ids.shape)


@dataclass(frozen=True)
class TableRankAssignment:
    """Rank assignment given by an explicit table ``key id -> rank`` (fixtures, replays)."""

    family: RankFamily
    table: Mapping[int, float]

    def __post_init__(self):
        object.__setattr__(self, "family", RankFamily.parse(self.family))

    def ranks(self, ids, weights=None) -> np.ndarray:
        try:
            return np.array([self.table[int(i)] for i in np.asarray(ids).ravel()], dtype=float)
        except KeyError as exc:
            raise ValueError(f"no rank for key {exc.args[0]}") from None


def draw_rank(assignment, key: Key) -> float:
    """Rank of a single key under ``assignment``."""
    if not key.weight > 0:
        raise ValueError("weight must be positive")
    return float(assignment.ranks(np.array([key.id]), np.array([key.weight]))[0])


def inclusion_prob(family, w, tau):
    """``p(w, tau)``: probability a key of weight ``w`` gets rank < ``tau``."""
    family = RankFamily.parse(family)
    if np.any(np.asarray(w) <= 0):
        raise ValueError("weight must be positive")
    if np.any(np.asarray(tau) < 0):
        raise ValueError("tau must be nonnegative")
    return family.inclusion_prob(w, tau)


class SketchEntry(NamedTuple):
    key_id: int
    rank: float
    weight: float
    attrs: Mapping[str, Any] = {}


@dataclass(frozen=True)
class BottomKSketch:
    """The ``min(k, |A|)`` least-ranked keys of a set and the (k+1)-st smallest rank.

    ``threshold`` is ``inf`` when the set has at most ``k`` keys.
    """

    set_id: str
    k: int
    family: RankFamily
    entries: tuple[SketchEntry, ...]
    threshold: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if len(self.entries) > self.k:
            raise ValueError("sketch holds more than k entries")
        if self.entries and not self.entries[-1].rank <= self.threshold:
            raise ValueError("entry rank above sketch threshold")
        object.__setattr__(self, "_ids", {e.key_id: e for e in self.entries})

    @property
    def degenerate(self) -> bool:
        """True for the sketch of an empty set."""
        return not self.entries

    @property
    def exhausted(self) -> bool:
        return math.isinf(self.threshold)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key_id) -> bool:
        return key_id in self._ids

    def entry(self, key_id: int) -> SketchEntry:
        return self._ids[key_id]

    def key_ids(self) -> list[int]:
        return [e.key_id for e in self.entries]


def _select_bottom(ids: np.ndarray, ranks: np.ndarray, k: int) -> tuple[np.ndarray, float]:
    """Indices of the k least (rank, id) pairs in order, plus the (k+1)-st rank."""
    n = len(ids)
    if n > k + 1:
        cut = np.partition(ranks, k)[k]
        cand = np.flatnonzero(ranks <= cut)
    else:
        cand = np.arange(n)
    order = cand[np.lexsort((ids[cand], ranks[cand]))]
    threshold = float(ranks[order[k]]) if n > k else INF
    return order[:k], threshold


def build_bottom_k(keys: Sequence[Key], assignment, k: int, set_id: str = "") -> BottomKSketch:
    """Bottom-k sketch of the set ``keys`` under ``assignment``.

    Ties in rank are broken by ascending key id. An empty ``keys`` gives a
    degenerate sketch with no entries and an infinite threshold.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    family = assignment.family
    if not keys:
        return BottomKSketch(set_id, k, family, (), INF)
    ids = np.array([key.id for key in keys], dtype=np.uint64)
    weights = np.array([key.weight for key in keys], dtype=float)
    ranks = assignment.ranks(ids, weights)
    chosen, threshold = _select_bottom(ids, ranks, k)
    entries = tuple(
        SketchEntry(int(keys[j].id), float(ranks[j]), float(keys[j].weight), keys[j].attrs) for j in chosen
    )
    return BottomKSketch(set_id, k, family, entries, threshold)


def build_coordinated(collection: WeightedSetCollection, family, seed: int, k: int) -> dict[str, BottomKSketch]:
    """Bottom-k sketches of every set in ``collection`` from one shared rank assignment."""
    assignment = RankAssignment(RankFamily.parse(family), seed)
    return build_coordinated_from(collection, assignment, k)


def build_coordinated_from(collection: WeightedSetCollection, assignment, k: int) -> dict[str, BottomKSketch]:
    return {s: build_bottom_k(collection.keys_of(s), assignment, k, set_id=s) for s in collection.sets}


@dataclass(frozen=True)
class KMinsSketch:
    """Minimum-rank key of a set under each of k independent rank assignments."""

    set_id: str
    family: RankFamily
    coordinates: tuple[tuple[int, float], ...]

    @property
    def k(self) -> int:
        return len(self.coordinates)


def build_kmins(keys: Sequence[Key], family, seeds: Sequence[int], set_id: str = "") -> KMinsSketch:
    """k-mins sketch with one coordinate per seed."""
    family = RankFamily.parse(family)
    if not seeds:
        raise ValueError("need at least one seed")
    if len(set(int(s) & _MASK64 for s in seeds)) != len(seeds):
        raise ValueError("k-mins seeds must be distinct")
    if not keys:
        raise ValueError("k-mins sketch of an empty set is undefined")
    ids = np.array([key.id for key in keys], dtype=np.uint64)
    weights = np.array([key.weight for key in keys], dtype=float)
    seed_col = _as_u64(list(seeds))[:, None]
    ranks = np.asarray(family.rank_from_uniform(hash_uniform(seed_col, ids[None, :]), weights[None, :]))
    # ties by ascending id: sort keys by id once, argmin returns the first minimum
    by_id = np.argsort(ids, kind="stable")
    ranks = ranks[:, by_id]
    best = np.argmin(ranks, axis=1)
    coords = tuple((int(ids[by_id][b]), float(ranks[j, b])) for j, b in enumerate(best))
    return KMinsSketch(set_id, family, coords)


def kmins_union(sketches: Sequence[KMinsSketch]) -> KMinsSketch:
    """Coordinate-wise minimum: the k-mins sketch of the union."""
    if not sketches:
        raise ValueError("no sketches")
    k = sketches[0].k
    if any(s.k != k for s in sketches):
        raise ValueError("k-mins sketches have different k")
    coords = []
    for j in range(k):
        coords.append(min((s.coordinates[j] for s in sketches), key=lambda c: (c[1], c[0])))
    return KMinsSketch("|".join(s.set_id for s in sketches), sketches[0].family, tuple(coords))
