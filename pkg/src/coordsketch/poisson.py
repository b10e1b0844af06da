"""Coordinated Poisson samples and their multiple-set adjusted weights.

A Poisson sample of a set with threshold ``tau`` keeps every key whose rank
is below ``tau``; inclusions of distinct keys are independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .combine import Combination, CoordinationError, Kind, Membership
from .core import INF, Key, RankAssignment, RankFamily, SketchEntry, WeightedSetCollection
from .estimate_ml import MonotoneEquation, solve_monotone
from .estimate_rc import AdjustedWeightMap, rc_adjusted_weights


@dataclass(frozen=True)
class PoissonSample:
    set_id: str
    family: RankFamily
    tau: float
    entries: tuple[SketchEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "_ids", {e.key_id: e for e in self.entries})

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key_id) -> bool:
        return key_id in self._ids


def solve_tau_for_expected_size(keys: Sequence[Key] | Sequence[float], family, k: float) -> float:
    """Threshold ``tau`` with ``sum_i p(w_i, tau) = k``.

    PRI uses the exact piecewise-linear solution. WS uses a bracketed root
    find and returns ``inf`` when ``k`` equals the set size.
    """
    family = RankFamily.parse(family)
    w = np.array([x.weight if isinstance(x, Key) else float(x) for x in keys], dtype=float)
    n = len(w)
    if not 0 < k <= n:
        raise ValueError(f"expected size k={k} must lie in (0, {n}]")
    if family is RankFamily.PRI:
        w = np.sort(w)[::-1]
        if k == n:
            return float(1.0 / w[-1])
        rest = np.cumsum(w[::-1])[::-1]  # rest[j] = sum of w[j:]
        for j in range(int(math.floor(k)) + 1):
            tau = (k - j) / rest[j]
            if w[j] * tau <= 1 and (j == 0 or w[j - 1] * tau >= 1):
                return float(tau)
        raise RuntimeError("no consistent PRI threshold found")
    if k == n:
        return INF

    def f(tau):
        return float(np.sum(-np.expm1(-w * tau))) - k

    hi = k / w.sum()
    for _ in range(200):
        if f(hi) >= 0:
            break
        hi *= 2
    return solve_monotone(MonotoneEquation(f, 0.0, hi))


def build_poisson(keys: Sequence[Key], assignment, tau: float, set_id: str = "") -> PoissonSample:
    """Keys of the set whose rank under ``assignment`` is strictly below ``tau``."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    family = assignment.family
    if not keys:
        return PoissonSample(set_id, family, float(tau), ())
    ids = np.array([key.id for key in keys], dtype=np.uint64)
    weights = np.array([key.weight for key in keys], dtype=float)
    ranks = assignment.ranks(ids, weights)
    keep = np.flatnonzero(ranks < tau)
    keep = keep[np.lexsort((ids[keep], ranks[keep]))]
    entries = tuple(SketchEntry(int(keys[j].id), float(ranks[j]), float(keys[j].weight), keys[j].attrs) for j in keep)
    return PoissonSample(set_id, family, float(tau), entries)


def build_poisson_coordinated(
    collection: WeightedSetCollection,
    family,
    seed: int,
    k: Optional[float] = None,
    taus: Optional[Mapping[str, float]] = None,
) -> dict[str, PoissonSample]:
    """Coordinated Poisson samples of every set.

    Give ``k`` to solve each set's threshold for expected size ``k`` (capped
    at the set size), or ``taus`` for fixed thresholds.
    """
    if (k is None) == (taus is None):
        raise ValueError("pass exactly one of k, taus")
    assignment = RankAssignment(RankFamily.parse(family), seed)
    out = {}
    for s in collection.sets:
        keys = collection.keys_of(s)
        if taus is not None:
            tau = taus[s]
        else:
            tau = solve_tau_for_expected_size(keys, assignment.family, min(k, len(keys))) if keys else INF
        out[s] = build_poisson(keys, assignment, tau, s)
    return out


def _pool(samples: Sequence[PoissonSample]) -> dict[int, SketchEntry]:
    if not samples:
        raise ValueError("need at least one sample")
    family = samples[0].family
    pooled: dict[int, SketchEntry] = {}
    seen_ids = set()
    for sm in samples:
        if sm.family is not family:
            raise ValueError("samples use different rank families")
        if sm.set_id in seen_ids:
            raise ValueError(f"duplicate set id {sm.set_id!r}")
        seen_ids.add(sm.set_id)
        for e in sm.entries:
            prev = pooled.get(e.key_id)
            if prev is None:
                pooled[e.key_id] = e
            elif prev.rank != e.rank or prev.weight != e.weight:
                raise CoordinationError(f"key {e.key_id} has different ranks across samples")
    return pooled


def _as_list(samples) -> list[PoissonSample]:
    return list(samples.values()) if isinstance(samples, Mapping) else list(samples)


def poisson_scs(samples) -> Combination:
    """Pooled keys ranked below ``min_A tau_A``: a Poisson sample of the union at that threshold."""
    samples = _as_list(samples)
    pooled = _pool(samples)
    tau_s = min(sm.tau for sm in samples)
    kept = sorted((e for e in pooled.values() if e.rank < tau_s), key=lambda e: (e.rank, e.key_id))
    membership = {
        (e.key_id, sm.set_id): Membership.IN if e.key_id in sm else Membership.OUT for e in kept for sm in samples
    }
    return Combination(
        kind=Kind.SCS,
        k=0,
        family=samples[0].family,
        source_set_ids=tuple(sm.set_id for sm in samples),
        entries=tuple(kept),
        threshold=tau_s,
        set_thresholds={sm.set_id: sm.tau for sm in samples},
        membership=membership,
    )


def poisson_lcs(samples) -> Combination:
    """All pooled keys; each conditioned on the largest ``tau_A`` among samples holding it."""
    samples = _as_list(samples)
    pooled = _pool(samples)
    entries = sorted(pooled.values(), key=lambda e: (e.rank, e.key_id))
    per_key_tau: dict[int, float] = {}
    membership: dict[tuple[int, str], Membership] = {}
    for e in entries:
        for sm in samples:
            if e.key_id in sm:
                per_key_tau[e.key_id] = max(per_key_tau.get(e.key_id, 0.0), sm.tau)
                membership[(e.key_id, sm.set_id)] = Membership.IN
            elif e.rank < sm.tau:
                membership[(e.key_id, sm.set_id)] = Membership.OUT
            else:
                membership[(e.key_id, sm.set_id)] = Membership.UNKNOWN
    return Combination(
        kind=Kind.LCS,
        k=0,
        family=samples[0].family,
        source_set_ids=tuple(sm.set_id for sm in samples),
        entries=tuple(entries),
        threshold=min(sm.tau for sm in samples),
        set_thresholds={sm.set_id: sm.tau for sm in samples},
        membership=membership,
        per_key_tau=per_key_tau,
    )


def poisson_scs_like_weights(samples) -> AdjustedWeightMap:
    return rc_adjusted_weights(poisson_scs(samples))


def poisson_lcs_like_weights(samples) -> AdjustedWeightMap:
    return rc_adjusted_weights(poisson_lcs(samples))
