"""Synthetic weighted set collections, the brute-force oracle and small fixtures.

Dataset specs are written like function calls::

    pair(10000, 2000)
    shared_core(num_sets=3, core=1000, exclusive=5000)
    heterogeneous(45, 30000, 0.3, 93, 1170)

Key ids start at 1 and every key carries a ``label`` attribute equal to
``id % 10``.
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .core import Key, RankFamily, TableRankAssignment, WeightedSetCollection
from .predicate import Node, Predicate, as_predicate, evaluate_exact


def _set_ids(n: int) -> list[str]:
    return [f"A{j + 1}" for j in range(n)]


def _check_pos(**kw):
    for name, v in kw.items():
        if not (isinstance(v, (int, np.integer)) and v >= 1):
            raise ValueError(f"{name} must be a positive integer, got {v!r}")


def _nonneg(**kw):
    for name, v in kw.items():
        if not (isinstance(v, (int, np.integer)) and v >= 0):
            raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")


def pair_sets(n: int, overlap: int) -> dict[str, list[int]]:
    """Two sets of ``n`` keys sharing ``overlap`` keys."""
    _check_pos(n=n)
    _nonneg(overlap=overlap)
    if overlap > n:
        raise ValueError(f"overlap {overlap} exceeds set size {n}")
    a = list(range(1, n + 1))
    b = list(range(n - overlap + 1, 2 * n - overlap + 1))
    return {"A1": a, "A2": b}


def shared_core_sets(num_sets: int, core: int, exclusive: int) -> dict[str, list[int]]:
    """``num_sets`` sets sharing ``core`` keys, each with ``exclusive`` keys of its own."""
    _check_pos(num_sets=num_sets)
    _nonneg(core=core, exclusive=exclusive)
    if core + exclusive == 0:
        raise ValueError("sets would be empty")
    common = list(range(1, core + 1))
    out = {}
    nxt = core + 1
    for s in _set_ids(num_sets):
        out[s] = common + list(range(nxt, nxt + exclusive))
        nxt += exclusive
    return out


def disjoint_sets(num_sets: int, size: int) -> dict[str, list[int]]:
    _check_pos(num_sets=num_sets, size=size)
    return shared_core_sets(num_sets, 0, size)


def heterogeneous_sets(
    num_sets: int,
    universe: int,
    alpha: float = 0.3,
    min_size: int = 93,
    max_size: int = 1170,
    seed: int = 0,
) -> dict[str, list[int]]:
    """Sets with truncated-Pareto sizes drawn from a universe of keys with skewed popularity.

    Mimics rating data: a few large sets, many small ones, and keys
    (reviewers) whose activity follows a Zipf-like law.
    """
    _check_pos(num_sets=num_sets, universe=universe, min_size=min_size, max_size=max_size)
    if not min_size <= max_size <= universe:
        raise ValueError("need min_size <= max_size <= universe")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    rng = np.random.default_rng(seed)
    # inverse-CDF draw from a Pareto truncated to [min_size, max_size]
    u = rng.random(num_sets)
    lo, hi = float(min_size), float(max_size)
    sizes = lo * (1 - u * (1 - (lo / hi) ** alpha)) ** (-1 / alpha)
    sizes = np.clip(np.round(sizes), min_size, max_size).astype(int)
    popularity = 1.0 / np.arange(1, universe + 1) ** 0.5
    popularity /= popularity.sum()
    out = {}
    for s, size in zip(_set_ids(num_sets), sizes):
        members = rng.choice(universe, size=int(size), replace=False, p=popularity) + 1
        out[s] = sorted(int(m) for m in members)
    return out


GENERATORS: dict[str, Callable[..., dict[str, list[int]]]] = {
    "pair": pair_sets,
    "shared_core": shared_core_sets,
    "heavy_overlap": shared_core_sets,
    "disjoint": disjoint_sets,
    "heterogeneous": heterogeneous_sets,
}


def _call_parts(text: str) -> tuple[str, tuple, dict]:
    text = text.strip()
    m = re.fullmatch(r"([A-Za-z_]\w*)\s*(?:\((.*)\))?", text, re.S)
    if not m:
        raise ValueError(f"cannot parse {text!r}; expected name(arg, ...)")
    name, inner = m.group(1), m.group(2)
    if not inner or not inner.strip():
        return name, (), {}
    try:
        call = ast.parse(f"f({inner})", mode="eval").body
        args = tuple(ast.literal_eval(a) for a in call.args)
        kwargs = {k.arg: ast.literal_eval(k.value) for k in call.keywords}
    except (SyntaxError, ValueError):
        raise ValueError(f"bad arguments in {text!r}") from None
    return name, args, kwargs


@dataclass(frozen=True)
class WeightModel:
    """``uniform`` (all weights 1) or ``pareto(alpha)`` (weights ``1 + Pareto(alpha)``)."""

    name: str = "uniform"
    alpha: float = 2.0

    @classmethod
    def parse(cls, text: "str | WeightModel") -> "WeightModel":
        if isinstance(text, WeightModel):
            return text
        name, args, kwargs = _call_parts(text)
        if name == "uniform" and not args and not kwargs:
            return cls("uniform")
        if name == "pareto":
            alpha = kwargs.get("alpha", args[0] if args else 2.0)
            if not float(alpha) > 0:
                raise ValueError("pareto alpha must be positive")
            return cls("pareto", float(alpha))
        raise ValueError(f"unknown weight model {text!r}")

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.name == "uniform":
            return np.ones(n)
        return 1.0 + rng.pareto(self.alpha, size=n)

    def __str__(self):
        return "uniform" if self.name == "uniform" else f"pareto({self.alpha!r})"


@dataclass(frozen=True)
class DatasetSpec:
    generator: str
    args: tuple = ()
    kwargs: Mapping[str, Any] = field(default_factory=dict)
    weights: WeightModel = WeightModel()
    seed: int = 0

    @classmethod
    def parse(cls, text: str, weights: "str | WeightModel" = "uniform", seed: int = 0) -> "DatasetSpec":
        name, args, kwargs = _call_parts(text)
        if name not in GENERATORS:
            raise ValueError(f"unknown dataset generator {name!r}; choose from {sorted(GENERATORS)}")
        return cls(name, args, dict(kwargs), WeightModel.parse(weights), int(seed))

    def __str__(self):
        parts = [repr(a) for a in self.args] + [f"{k}={v!r}" for k, v in sorted(self.kwargs.items())]
        return f"{self.generator}({', '.join(parts)})"


def gen_dataset(spec: "DatasetSpec | str", weights: "str | WeightModel" = "uniform", seed: int = 0) -> WeightedSetCollection:
    """Build the collection described by ``spec``; deterministic in (spec, weights, seed)."""
    if isinstance(spec, str):
        spec = DatasetSpec.parse(spec, weights, seed)
    gen = GENERATORS[spec.generator]
    kwargs = dict(spec.kwargs)
    if spec.generator == "heterogeneous":
        kwargs.setdefault("seed", spec.seed)
    try:
        sets = gen(*spec.args, **kwargs)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {spec.generator}: {exc}") from None
    ids = sorted(set().union(*map(set, sets.values())))
    rng = np.random.default_rng([spec.seed, 0x77E1])
    w = spec.weights.draw(len(ids), rng)
    ground = [Key(i, float(x), {"label": i % 10}) for i, x in zip(ids, w)]
    return WeightedSetCollection(ground, sets)


def oracle_weight(collection: WeightedSetCollection, pred: "Predicate | Node | str") -> float:
    """Exact weight of the keys satisfying ``pred``, by a full scan of the ground set."""
    pred = as_predicate(pred)
    member_of: dict[int, set] = {}
    for s, members in collection.sets.items():
        for i in members:
            member_of.setdefault(i, set()).add(s)
    total = [key.weight for i, key in collection.ground.items() if evaluate_exact(pred, key, member_of.get(i, set()))]
    return math.fsum(total)


def oracle_jaccard(collection: WeightedSetCollection, a: str, b: str) -> float:
    inter = oracle_weight(collection, f"in({a}) & in({b})")
    union = oracle_weight(collection, f"in({a}) | in({b})")
    return inter / union if union > 0 else math.nan


# -- small fixtures ----------------------------------------------------------

FOUR_SET_WEIGHTS = {1: 1, 2: 2, 3: 1, 4: 3, 5: 1, 6: 1, 7: 1, 8: 1, 9: 1, 10: 1}
FOUR_SET_RANKS = {1: 0.487, 2: 0.36, 3: 0.3, 4: 0.208, 5: 0.765, 6: 0.599, 7: 0.131, 8: 0.886, 9: 0.73, 10: 0.341}
FOUR_SET_SETS = {
    "A1": [1, 3, 5, 7, 9],
    "A2": [2, 5, 6, 9, 10],
    "A3": [3, 4, 5, 6, 7],
    "A4": [2, 4, 6, 8, 10],
}


def four_set_fixture() -> tuple[WeightedSetCollection, TableRankAssignment]:
    """Ten keys, four sets and a fixed priority-rank table (use with k = 3)."""
    ground = [Key(i, w, {"label": i % 10}) for i, w in FOUR_SET_WEIGHTS.items()]
    return WeightedSetCollection(ground, FOUR_SET_SETS), TableRankAssignment(RankFamily.PRI, FOUR_SET_RANKS)
