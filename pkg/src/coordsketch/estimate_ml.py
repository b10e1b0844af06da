"""Maximum-likelihood weight estimators over exponential-rank (WS) sketches.

All the likelihood equations here have a left-hand side that is strictly
monotone on an open interval bounded by poles of the form ``1/(x - s)``, so
each estimate is a single bracketed root find.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .combine import Combination, Kind, Membership, union_sketch
from .core import BottomKSketch, RankFamily
from .estimate_rc import rc_adjusted_weights
from .predicate import Node, Predicate, analyze_predicate, as_predicate, evaluate3, evaluate_on_entry, relevant_sets


class BracketError(ValueError):
    """The evaluator does not change sign on the bracket."""


@dataclass(frozen=True)
class MonotoneEquation:
    """``evaluator(x) = 0`` with a unique root in the open interval ``(lo, hi)``.

    Endpoints may be poles; the evaluator is only called strictly inside.
    """

    evaluator: Callable[[float], float]
    lo: float
    hi: float


def _inside(lo: float, hi: float, frac: float) -> float:
    return lo + (hi - lo) * frac


def _probe(f, lo, hi) -> tuple[float, float]:
    """Points just inside each end, walked toward the ends while the sign stays unresolved."""
    a = _inside(lo, hi, 1e-9)
    b = _inside(lo, hi, 1 - 1e-9)
    # crunch toward the endpoint until the float no longer moves
    for _ in range(60):
        if f(a) * f(b) <= 0:
            break
        a2, b2 = lo + (a - lo) / 16, hi - (hi - b) / 16
        moved = False
        if lo < a2 < a:
            a, moved = a2, True
        if b < b2 < hi:
            b, moved = b2, True
        if not moved:
            break
    return a, b


def solve_monotone(eq: MonotoneEquation, rel_tol: float = 1e-15, max_iter: int = 200) -> float:
    """Root of a monotone equation on its bracket: bisection, then secant polish."""
    f = eq.evaluator
    if not eq.lo < eq.hi:
        raise BracketError(f"empty bracket ({eq.lo}, {eq.hi})")
    a, b = _probe(f, eq.lo, eq.hi)
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if fa * fb > 0:
        raise BracketError(f"no sign change on ({eq.lo}, {eq.hi}): f={fa:.3g}, {fb:.3g}")
    it = 0
    while it < max_iter:
        it += 1
        m = 0.5 * (a + b)
        if m in (a, b) or (b - a) <= rel_tol * max(abs(m), 1e-300):
            break
        fm = f(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    # secant step from the bracket ends, kept only if it stays inside and improves
    best, fbest = (a, fa) if abs(fa) <= abs(fb) else (b, fb)
    if fb != fa:
        x = b - fb * (b - a) / (fb - fa)
        if a <= x <= b:
            fx = f(x)
            if abs(fx) < abs(fbest):
                best = x
    return best


def _require_ws(family: RankFamily):
    if family is not RankFamily.WS:
        raise ValueError("maximum-likelihood estimators require WS (exponential) ranks")


def _harmonic(x: float, prefix: np.ndarray) -> float:
    return float(np.sum(1.0 / (x - prefix)))


def _grow_and_solve(f, lo: float, hi: float) -> float:
    for _ in range(64):
        if f(hi) < 0:
            break
        hi = lo + 2 * (hi - lo)
    else:
        raise BracketError("upper bracket growth exhausted")
    # there is a pole at lo; f(hi) is negative
    return solve_monotone(MonotoneEquation(f, lo, hi))


def harmonic_root(prefix: Sequence[float], tau: float) -> float:
    """Solve ``sum_i 1/(x - prefix[i]) = tau`` for ``x > max(prefix)``."""
    prefix = np.asarray(prefix, dtype=float)
    lo = float(prefix.max())
    hi = lo + len(prefix) / tau * (1 + 1e-9)
    return _grow_and_solve(lambda x: _harmonic(x, prefix) - tau, lo, hi)


def ml_union_scs(combination: Combination) -> float:
    """ML estimate of the union weight from an SCS of WS sketches.

    Solves ``sum_{i=0..l} 1/(x - s_i) = r_{k+1}(S)`` where ``s_i`` are prefix
    sums of the SCS entry weights in rank order (``s_0 = 0``).
    """
    if combination.kind is not Kind.SCS:
        raise ValueError("expected an SCS combination")
    _require_ws(combination.family)
    weights = np.array([e.weight for e in combination.entries], dtype=float)
    prefix = np.concatenate([[0.0], np.cumsum(weights)])
    if math.isinf(combination.threshold):
        return float(prefix[-1])
    if not len(weights):
        raise ValueError("empty SCS with a finite threshold")
    return harmonic_root(prefix, combination.threshold)


def _subpop_entries(combination: Combination, pred: Predicate):
    out = []
    for e in combination.entries:
        v = evaluate_on_entry(pred, combination, e)
        if v is None:
            raise RuntimeError(f"unknown membership for key {e.key_id}")
        if v:
            out.append(e)
    return out


def ml_subpop_scs(combination: Combination, pred: "Predicate | Node | str") -> float:
    """ML estimate of a subpopulation weight from an SCS of WS sketches.

    With ``m`` matching entries and prefix sums ``s_0..s_{m-1}`` of their
    weights, solves ``sum_{i=0..m-1} 1/(x - s_i) = r_{k+1}(S)``.
    """
    if combination.kind is not Kind.SCS:
        raise ValueError("expected an SCS combination")
    _require_ws(combination.family)
    pred = as_predicate(pred)
    matched = _subpop_entries(combination, pred)
    weights = np.array([e.weight for e in matched], dtype=float)
    if math.isinf(combination.threshold):
        return float(weights.sum())
    if not len(weights):
        return 0.0
    prefix = np.concatenate([[0.0], np.cumsum(weights)[:-1]])
    return harmonic_root(prefix, combination.threshold)


class IntersectionML(NamedTuple):
    intersection: float
    union: float
    resemblance: float
    clamped: bool


def intersection_equation(
    inter_prefix: np.ndarray, diff_prefix: np.ndarray, total: float
) -> Callable[[float], float]:
    """Left-hand side ``sum 1/(x - s_i) - sum 1/(total - 2x - s'_i)`` (decreasing in x)."""

    def f(x: float) -> float:
        return float(np.sum(1.0 / (x - inter_prefix)) - np.sum(1.0 / (total - 2 * x - diff_prefix)))

    return f


def ml_intersection_known_weights(
    combination: Combination,
    weight_a: float,
    weight_b: float,
    set_a: Optional[str] = None,
    set_b: Optional[str] = None,
    literal_index: bool = False,
) -> IntersectionML:
    """ML estimate of ``w(A n B)`` from the SCS of two WS sketches and known set weights.

    ``m`` SCS entries lie in both sets, ``m'`` in exactly one; with prefix
    sums ``s`` and ``s'`` of their weights, the root of
    ``sum_{i<m} 1/(x - s_i) - sum_{i<m'} 1/(w(A) + w(B) - 2x - s'_i) = 0`` is
    taken between the two poles. ``literal_index=True`` starts the second sum
    at ``i = 1`` instead. The result is clamped to ``[0, min(w(A), w(B))]``.
    """
    if combination.kind is not Kind.SCS:
        raise ValueError("expected an SCS combination")
    _require_ws(combination.family)
    sources = combination.source_set_ids
    if set_a is None or set_b is None:
        if len(sources) != 2:
            raise ValueError("intersection ML needs exactly two sets")
        set_a, set_b = sources
    total = weight_a + weight_b
    inter, diff = [], []
    for e in combination.entries:
        ina = combination.membership[(e.key_id, set_a)] is Membership.IN
        inb = combination.membership[(e.key_id, set_b)] is Membership.IN
        if ina and inb:
            inter.append(e.weight)
        elif ina or inb:
            diff.append(e.weight)
    cap = min(weight_a, weight_b)

    def result(x: float, clamped: bool = False) -> IntersectionML:
        if x < 0 or x > cap:
            x, clamped = min(max(x, 0.0), cap), True
        union = total - x
        return IntersectionML(x, union, x / union if union > 0 else 1.0, clamped)

    m = len(inter)
    if math.isinf(combination.threshold):
        return result(float(sum(inter)))
    if m == 0:
        return result(0.0)
    s = np.concatenate([[0.0], np.cumsum(inter)[:-1]])
    s2 = np.concatenate([[0.0], np.cumsum(diff)[:-1]]) if diff else np.empty(0)
    if literal_index:
        s2 = s2[1:]
    if len(s2) == 0:
        return result(cap)
    f = intersection_equation(s, s2, total)
    lo = float(s[-1])
    hi = (total - float(s2[-1])) / 2
    if not lo < hi:
        return result(cap, clamped=True)
    return result(solve_monotone(MonotoneEquation(f, lo, hi)))


def lcs_union_known_weights(
    sketches: Sequence[BottomKSketch] | Mapping[str, BottomKSketch],
    known_weights: Mapping[str, float],
    pred: "Predicate | Node | str | None" = None,
) -> float:
    """Union (or attribute-restricted union) weight using exact per-set weights.

    Sets are processed in ascending ``r_{k+1}``. The sketch of each set is
    split into keys absent from every later set (``H``) and the rest; the
    weight of ``H`` is estimated as the set weight times the RC-weighted
    fraction of the sketch falling in ``H``. The last set contributes its
    known weight (or its restricted fraction when ``pred`` is given).
    """
    if isinstance(sketches, Mapping):
        sketches = list(sketches.values())
    pred = as_predicate(pred) if pred is not None else None
    if pred is not None and relevant_sets(pred) and analyze_predicate(pred)[1] is not Kind.LCS:
        raise ValueError("known-weight union estimator takes attribute conditions over the union only")
    for sk in sketches:
        if sk.degenerate:
            raise ValueError(f"sketch of {sk.set_id!r} is empty")
        if sk.set_id not in known_weights:
            raise KeyError(f"no known weight for {sk.set_id!r}")
    order = sorted(sketches, key=lambda sk: (sk.threshold, sk.set_id))
    total = []
    for j, sk in enumerate(order):
        later = order[j + 1:]
        single = union_sketch([sk])
        a = rc_adjusted_weights(single)
        denom = math.fsum(a.weights.values())
        num = []
        for e in sk.entries:
            if any(e.key_id in other for other in later):
                continue
            if pred is not None and not _attribute_only(pred, e):
                continue
            num.append(a[e.key_id])
        if not later and pred is None:
            total.append(known_weights[sk.set_id])
        else:
            total.append(known_weights[sk.set_id] * math.fsum(num) / denom)
    return math.fsum(total)


def _attribute_only(pred: Predicate, entry) -> bool:
    # membership atoms are true: every entry here lies in the union
    v = evaluate3(pred.formula, lambda s: True, entry.key_id, entry.weight, entry.attrs)
    if v and pred.attribute_filter is not None:
        v = pred.attribute_filter(entry.key_id, entry.weight, entry.attrs)
    return bool(v)
