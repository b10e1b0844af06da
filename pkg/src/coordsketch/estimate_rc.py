"""Rank-conditioning adjusted weights and predicate-driven weight estimation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, NamedTuple, Optional, Sequence

from .combine import Combination, Kind, combine, entry_tau
from .core import BottomKSketch
from .predicate import Node, Predicate, all_of, analyze_predicate, any_of, as_predicate, evaluate_on_entry

log = logging.getLogger(__name__)


class InapplicableEstimator(ValueError):
    """The requested combination cannot evaluate the predicate."""


@dataclass(frozen=True)
class AdjustedWeightMap:
    """Per-key adjusted weights; keys not present have adjusted weight 0."""

    kind: Kind
    weights: Mapping[int, float]
    combination: Optional[Combination] = field(default=None, repr=False, compare=False)

    def __getitem__(self, key_id: int) -> float:
        return self.weights.get(key_id, 0.0)

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def total(self) -> float:
        return math.fsum(self.weights.values())


def rc_adjusted_weights(combination: Combination) -> AdjustedWeightMap:
    """HT weights ``w / p(w, tau)`` with the combination's conditioning rank ``tau``."""
    family = combination.family
    out: dict[int, float] = {}
    for e in combination.entries:
        tau = entry_tau(combination, e.key_id)
        p = family.inclusion_prob(e.weight, tau)
        if not p > 0:
            raise RuntimeError(f"inclusion probability 0 for key {e.key_id} at tau={tau!r}")
        out[e.key_id] = e.weight / p
    return AdjustedWeightMap(combination.kind, out, combination)


class Estimate(NamedTuple):
    value: float
    kind: Kind
    size: int


def _select(sketches: Mapping[str, BottomKSketch], set_ids: Sequence[str]) -> list[BottomKSketch]:
    missing = [s for s in set_ids if s not in sketches]
    if missing:
        raise KeyError(f"no sketch for relevant sets {missing}")
    return [sketches[s] for s in set_ids]


def _satisfying(pred: Predicate, combination: Combination):
    for e in combination.entries:
        v = evaluate_on_entry(pred, combination, e)
        if v is None:
            raise RuntimeError(
                f"predicate {pred} needs unknown membership of key {e.key_id} in a {combination.kind.value}"
            )
        if v:
            yield e


def resolve_kind(pred: Predicate, combination: "Kind | str | None") -> tuple[list[str], Kind]:
    sets, best = analyze_predicate(pred)
    if combination is None or (isinstance(combination, str) and combination.lower() == "best"):
        return sets, best
    kind = Kind.parse(combination)
    if kind is Kind.LCS and best is not Kind.LCS:
        raise InapplicableEstimator(f"LCS cannot evaluate {pred}")
    return sets, kind


def estimate_weight(
    sketches: Mapping[str, BottomKSketch],
    pred: "Predicate | Node | str",
    combination: "Kind | str | None" = None,
) -> Estimate:
    """Estimate the total weight of keys satisfying ``pred``.

    By default the best applicable combination over the relevant sets is used;
    pass ``combination`` to force ``UNION``, ``SCS`` or ``LCS``.
    """
    pred = as_predicate(pred)
    sets, kind = resolve_kind(pred, combination)
    comb = combine(_select(sketches, sets), kind)
    awm = rc_adjusted_weights(comb)
    value = math.fsum(awm[e.key_id] for e in _satisfying(pred, comb))
    return Estimate(value, kind, len(comb))


def estimate_function_sum(awm: AdjustedWeightMap, pred: "Predicate | Node | str", h: Callable) -> float:
    """Unbiased estimate of ``sum h(i)`` over keys satisfying ``pred``.

    ``h`` is called as ``h(key_id, weight, attrs)``.
    """
    pred = as_predicate(pred)
    if awm.combination is None:
        raise ValueError("adjusted weights carry no combination to evaluate the predicate on")
    total = []
    for e in _satisfying(pred, awm.combination):
        total.append(awm[e.key_id] * h(e.key_id, e.weight, e.attrs) / e.weight)
    return math.fsum(total)


class PairAggregates(NamedTuple):
    union_w: float
    intersection_w: float
    hamming: float
    hamming_raw: float
    jaccard_ratio: Optional[float]
    clamped: bool


def derived_aggregates(sketches: Mapping[str, BottomKSketch], set_a: str, set_b: str) -> PairAggregates:
    """Union (LCS), intersection (SCS), Hamming distance and a ratio Jaccard estimate.

    The Hamming difference is clamped at 0; ``hamming_raw`` keeps the
    unclamped value and ``clamped`` flags when clamping happened.
    """
    union_w = estimate_weight(sketches, any_of(set_a, set_b), Kind.LCS).value
    inter_w = estimate_weight(sketches, all_of(set_a, set_b), Kind.SCS).value
    raw = union_w - inter_w
    clamped = raw < 0
    if clamped:
        log.warning("negative Hamming estimate %.6g clamped to 0", raw)
    jaccard = inter_w / union_w if union_w > 0 else None
    return PairAggregates(union_w, inter_w, max(raw, 0.0), raw, jaccard, clamped)


def inclusion_exclusion_intersection(
    sketches: Mapping[str, BottomKSketch],
    set_a: str,
    set_b: str,
    weight_a: Optional[float] = None,
    weight_b: Optional[float] = None,
) -> float:
    """``w(A) + w(B) - w(A u B)`` with the LCS union estimate.

    Not recommended: it is markedly noisier than the SCS intersection
    estimator. Set weights default to single-sketch RC estimates.
    """
    if weight_a is None:
        weight_a = estimate_weight(sketches, all_of(set_a), Kind.UNION).value
    if weight_b is None:
        weight_b = estimate_weight(sketches, all_of(set_b), Kind.UNION).value
    union_w = estimate_weight(sketches, any_of(set_a, set_b), Kind.LCS).value
    return weight_a + weight_b - union_w
