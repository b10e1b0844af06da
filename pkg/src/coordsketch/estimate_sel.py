"""Adjusted selectivities: unbiased estimators of ``w(i) / w(U)``.

Samples here are explicit with-replacement draws under one of three
stopping rules:

* ``WSR``: stop after ``k`` draws.
* ``WSRD``: stop at the first draw of the (k+1)-st distinct key.
* ``WSRC``: stop at the first draw that is the (k+1)-st distinct key of some
  set in a collection.

The draw that triggers a stop is not counted.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Mapping, NamedTuple, Optional

import numpy as np
from scipy.stats import binom

from .combine import Combination, Kind
from .core import Key, WeightedSetCollection

DEFAULT_BUDGET = 2_000_000
DEFAULT_MC_DRAWS = 100_000
_MC_SUBSEED = 0x5E1EC7


class Rule(enum.Enum):
    WSR = "WSR"
    WSRD = "WSRD"
    WSRC = "WSRC"

    @classmethod
    def parse(cls, value: "Rule | str") -> "Rule":
        if isinstance(value, Rule):
            return value
        try:
            return cls[str(value).strip().upper()]
        except KeyError:
            raise ValueError(f"unknown stopping rule {value!r}") from None


class IntractableError(RuntimeError):
    """Exact evaluation exceeds the enumeration budget and Monte Carlo is off."""


@dataclass(frozen=True)
class ReplacementSample:
    """Multiplicities of the keys drawn before the stopping rule fired.

    ``exhausted`` is set when the rule can never fire (too few distinct
    keys); the counts then cover the draws up to the point where every
    reachable key had been seen.
    """

    rule: Rule
    k: int
    counts: Mapping[int, int]
    weights: Mapping[int, float]
    exhausted: bool = False
    sets: Optional[Mapping[str, frozenset]] = field(default=None, repr=False)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def distinct(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class AdjustedSelectivityMap:
    rho: Mapping[int, float]

    def __getitem__(self, key_id: int) -> float:
        return self.rho.get(key_id, 0.0)

    def __len__(self):
        return len(self.rho)

    def __iter__(self):
        return iter(self.rho)

    def total(self) -> float:
        return math.fsum(self.rho.values())

    def selectivity(self, key_ids: Iterable[int]) -> float:
        """Estimated ``w(J) / w(U)`` for the subpopulation ``J``."""
        return math.fsum(self[i] for i in set(key_ids))


def _ground_keys(ground) -> list[Key]:
    if isinstance(ground, WeightedSetCollection):
        return list(ground.ground.values())
    if isinstance(ground, Mapping):
        return list(ground.values())
    return list(ground)


def _sets_of(S) -> dict[str, frozenset]:
    if isinstance(S, WeightedSetCollection):
        return dict(S.sets)
    return {str(s): frozenset(int(i) for i in ids) for s, ids in S.items()}


def draw_replacement_sample(
    ground,
    rule: "Rule | str",
    k: int,
    S=None,
    seed: int = 0,
    chunk: int = 4096,
) -> ReplacementSample:
    """Draw iid keys with probability proportional to weight until ``rule`` stops.

    ``ground`` is a key list, a ``{id: Key}`` map or a collection. ``S`` (a
    collection or a ``{set_id: ids}`` map) is required for ``WSRC``.
    """
    rule = Rule.parse(rule)
    if k < 1:
        raise ValueError("k must be >= 1")
    keys = _ground_keys(ground)
    if not keys:
        raise ValueError("empty ground set")
    sets = None
    if rule is Rule.WSRC:
        if S is None:
            raise ValueError("WSRC needs the set collection S")
        sets = _sets_of(S)
    ids = np.array([key.id for key in keys], dtype=np.int64)
    w = np.array([key.weight for key in keys], dtype=float)
    weights = {int(i): float(x) for i, x in zip(ids, w)}
    cdf = np.cumsum(w)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)

    def draws():
        while True:
            idx = np.searchsorted(cdf, rng.random(chunk), side="right")
            yield from ids[np.minimum(idx, len(ids) - 1)].tolist()

    counts: dict[int, int] = {}
    if rule is Rule.WSR:
        stream = draws()
        for _ in range(k):
            i = next(stream)
            counts[i] = counts.get(i, 0) + 1
        return ReplacementSample(rule, k, counts, weights)

    if rule is Rule.WSRD:
        reachable = len(ids)
        exhausted = reachable <= k

        def stops(i):
            return i not in counts and len(counts) == k
    else:
        members = {int(i): [s for s, m in sets.items() if int(i) in m] for i in ids}
        per_set = {s: 0 for s in sets}
        # only keys of some set in S are counted
        reachable = len(set().union(*sets.values()) & set(members)) if sets else 0
        exhausted = all(len(m) <= k for m in sets.values())

        def stops(i):
            return i not in counts and any(per_set[s] == k for s in members[i])

    for i in draws():
        if rule is Rule.WSRC and not members[i]:
            continue
        if exhausted:
            counts[i] = counts.get(i, 0) + 1
            if len(counts) == reachable:
                break
            continue
        if stops(i):
            break
        if i not in counts and rule is Rule.WSRC:
            for s in members[i]:
                per_set[s] += 1
        counts[i] = counts.get(i, 0) + 1
    return ReplacementSample(rule, k, counts, weights, exhausted, sets)


def rho1(sample: ReplacementSample) -> AdjustedSelectivityMap:
    """Count fractions ``c(i) / c(U)``."""
    total = sample.total
    if total == 0:
        raise ValueError("sample has no draws")
    return AdjustedSelectivityMap({i: c / total for i, c in sample.counts.items()})


def rho_scs_uniform(combination: Combination, rel_tol: float = 1e-12) -> AdjustedSelectivityMap:
    """``1/l`` for each of the ``l`` entries of an SCS (or union sketch) of equal-weight keys.

    Rejects unequal weights: the uniform estimator is biased for weighted keys.
    """
    if combination.kind not in (Kind.SCS, Kind.UNION):
        raise ValueError("expected an SCS or union-sketch combination")
    entries = combination.entries
    if not entries:
        raise ValueError("empty combination")
    w0 = entries[0].weight
    if any(not math.isclose(e.weight, w0, rel_tol=rel_tol) for e in entries):
        raise ValueError("uniform selectivity estimator requires equal key weights")
    share = 1.0 / len(entries)
    return AdjustedSelectivityMap({e.key_id: share for e in entries})


# -- worked bias example -----------------------------------------------------


class JaccardDemo(NamedTuple):
    naive_expectation: Fraction
    true_resemblance: Fraction


BIAS_DEMO_WEIGHTS = {1: 4, 2: 1, 3: 1, 4: 1}
BIAS_DEMO_SETS = {"A1": frozenset({1, 2, 3}), "A2": frozenset({1, 4})}


def _bottom_prefix_law(weights: Mapping[int, int], k: int):
    """Exact distribution of the ordered first ``k`` keys of a weighted draw without replacement."""
    ids = sorted(weights)
    total = sum(weights.values())
    for seq in permutations(ids, k):
        p, left = Fraction(1), Fraction(total)
        for i in seq:
            p *= Fraction(weights[i]) / left
            left -= weights[i]
        yield seq, p


def bias_demo_expectation(weighted: bool = True, k: int = 2) -> Fraction:
    """Expected intersection fraction of a bottom-k WS sketch of the demo union.

    ``weighted=True`` uses weight fractions, otherwise key-count fractions.
    """
    inter = BIAS_DEMO_SETS["A1"] & BIAS_DEMO_SETS["A2"]
    out = Fraction(0)
    for seq, p in _bottom_prefix_law(BIAS_DEMO_WEIGHTS, k):
        if weighted:
            num = sum(BIAS_DEMO_WEIGHTS[i] for i in seq if i in inter)
            den = sum(BIAS_DEMO_WEIGHTS[i] for i in seq)
            out += p * Fraction(num, den)
        else:
            out += p * Fraction(sum(1 for i in seq if i in inter), k)
    return out


def jaccard_biased_demo() -> JaccardDemo:
    """Naive weighted-fraction Jaccard expectation versus the true resemblance on the demo sets."""
    inter = BIAS_DEMO_SETS["A1"] & BIAS_DEMO_SETS["A2"]
    union = BIAS_DEMO_SETS["A1"] | BIAS_DEMO_SETS["A2"]
    truth = Fraction(sum(BIAS_DEMO_WEIGHTS[i] for i in inter), sum(BIAS_DEMO_WEIGHTS[i] for i in union))
    return JaccardDemo(bias_demo_expectation(weighted=True), truth)


def eq3_series(ell: int, p: float, t_max: int = 200) -> float:
    """Partial sum over ``t = 1..t_max`` of ``C(t+l-1, l-1) p^t (1-p)^l t/(t+l-1)``; converges to ``p``."""
    terms = [math.comb(t + ell - 1, ell - 1) * p**t * (1 - p) ** ell * t / (t + ell - 1) for t in range(1, t_max + 1)]
    return math.fsum(terms)


# -- conditional (tighter) selectivities -------------------------------------


def composition_count(n: int, parts: int) -> int:
    """Number of ways to write ``n`` as an ordered sum of ``parts`` nonnegative integers."""
    return math.comb(n + parts - 1, parts - 1)


def _inv1p(m):
    return 1.0 / (1.0 + m)


def _exact_moments(n: int, p: np.ndarray) -> tuple[float, np.ndarray]:
    """``E[1/P]`` and ``E[(1+m_j)/P]`` with ``P = prod_h (1+m_h)``, ``m ~ Multinomial(n, p)``.

    Sums over every composition, factorized key by key: the multinomial is a
    chain of binomial splits, so the sum is evaluated as a backward
    recursion over the keys.
    """
    kp = len(p)
    r = np.arange(n + 1)
    inv = _inv1p(r)
    ones = np.ones(n + 1)
    # split probability of key h among keys h..end
    tails = np.cumsum(p[::-1])[::-1]
    q = np.minimum(p / tails, 1.0)
    # binomial split laws for the middle levels, shared by every run
    pmf = {h: [binom.pmf(r[: rr + 1], rr, q[h]) for rr in range(n + 1)] for h in range(1, kp - 1)}
    top = binom.pmf(r, n, q[0])

    def run(skip: Optional[int]) -> float:
        # tail[r] = E[prod over keys h..end of f_h(m_h) | r draws left for those keys]
        tail = ones if skip == kp - 1 else inv
        for h in range(kp - 2, 0, -1):
            f = ones if skip == h else inv
            tail = np.array([np.dot(pmf[h][rr] * f[: rr + 1], tail[rr::-1]) for rr in range(n + 1)])
        f = ones if skip == 0 else inv
        return float(np.dot(top * f, tail[::-1]))

    if kp == 1:
        return 1.0 / (1 + n), np.array([1.0])
    denom = run(None)
    nums = np.array([run(j) for j in range(kp)])
    return denom, nums


def _mc_moments(n: int, p: np.ndarray, draws: int, seed: int) -> tuple[float, np.ndarray]:
    rng = np.random.default_rng(seed)
    denom = 0.0
    nums = np.zeros(len(p))
    done = 0
    while done < draws:
        size = min(10_000, draws - done)
        m = rng.multinomial(n, p, size=size)
        inv = 1.0 / np.prod(1.0 + m, axis=1)
        denom += inv.sum()
        nums += ((1.0 + m) * inv[:, None]).sum(axis=0)
        done += size
    return denom / draws, nums / draws


def rho2(
    sample: ReplacementSample,
    budget: int = DEFAULT_BUDGET,
    monte_carlo: bool = True,
    mc_draws: int = DEFAULT_MC_DRAWS,
    seed: int = 0,
) -> AdjustedSelectivityMap:
    """Selectivities conditioned on the sampled key set (and, for WSRD, on the draw count).

    For WSR with ``k'`` distinct keys the extra ``k - k'`` draws follow
    ``Multinomial(k - k', p)`` with ``p`` proportional to the sampled weights;
    for WSRD the ``o`` repeats follow ``Multinomial(o, p)``. The expectations
    are exact when the number of compositions is within ``budget``; otherwise
    Monte Carlo with common random numbers is used, or
    :class:`IntractableError` raised when ``monte_carlo`` is False.
    """
    if sample.rule is Rule.WSRC:
        raise ValueError("conditional selectivities are defined for WSR and WSRD samples")
    if sample.exhausted:
        raise ValueError("sample is exhausted; the stopping rule never fired")
    ids = sorted(sample.counts)
    w = np.array([sample.weights[i] for i in ids], dtype=float)
    p = w / w.sum()
    kp = len(ids)
    if sample.rule is Rule.WSR:
        n = sample.k - kp
        scale = sample.k
    else:
        n = sample.total - kp
        scale = sample.total
    if n < 0:
        raise ValueError("sample has more distinct keys than draws")
    if composition_count(n, kp) <= budget:
        denom, nums = _exact_moments(n, p)
    elif monte_carlo:
        sub = int(np.random.SeedSequence([seed, _MC_SUBSEED, n, kp]).generate_state(1)[0])
        denom, nums = _mc_moments(n, p, mc_draws, sub)
    else:
        raise IntractableError(
            f"{composition_count(n, kp)} compositions exceed the budget of {budget} and Monte Carlo is disabled"
        )
    t = nums / denom
    return AdjustedSelectivityMap({i: float(tj / scale) for i, tj in zip(ids, t)})
