"""Monte Carlo experiment runner, result CSVs and improvement-factor summaries.

A config file holds ``key = value`` lines::

    dataset = shared_core(3, 1000, 5000)
    weights = uniform
    family = WS
    k = 64, 256
    repetitions = 1000
    seed = 0
    estimators = union, scs, lcs
    aggregates = union; intersection(A1, A2); predicate: (in(A1) | in(A2)) & attr(label) < 5
    output = results.csv

Aggregates are separated by ``;``. ``union``, ``intersection``,
``jaccard`` and ``hamming`` apply to the config's ``sets`` (default: all
sets) or to an explicit list in parentheses. ``predicate: <text>`` takes a
predicate over any sets.
"""

from __future__ import annotations

import csv
import io as _io
import logging
import math
import os
import re
from dataclasses import dataclass, fields, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .combine import Kind, scs as build_scs
from .core import RankFamily, WeightedSetCollection, build_coordinated, build_kmins
from .datasets import DatasetSpec, gen_dataset, oracle_weight
from .estimate_ml import lcs_union_known_weights, ml_intersection_known_weights, ml_subpop_scs, ml_union_scs
from .estimate_rc import inclusion_exclusion_intersection
from .montecarlo import BatchEngine, seed_range
from .predicate import Predicate, all_of, analyze_predicate, any_of, evaluate_exact, parse_predicate, relevant_sets

log = logging.getLogger(__name__)

RESULTS_SCHEMA = "coordsketch.results.v1"
SUMMARY_SCHEMA = "coordsketch.summary.v1"

BATCH_ESTIMATORS = {
    "union": "UNION",
    "scs": "SCS",
    "lcs": "LCS",
    "poisson_scs": "POISSON_SCS",
    "poisson_lcs": "POISSON_LCS",
}
SCALAR_ESTIMATORS = ("ml_scs", "ml_known", "lcs_known", "ie", "kmins")
ESTIMATORS = tuple(BATCH_ESTIMATORS) + SCALAR_ESTIMATORS
AGGREGATES = ("union", "intersection", "jaccard", "hamming", "predicate")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class Inapplicable(Exception):
    """Estimator cannot answer the aggregate."""


# -- configuration -----------------------------------------------------------


@dataclass(frozen=True)
class Aggregate:
    kind: str
    sets: tuple[str, ...] = ()
    predicate: Optional[Predicate] = None

    @classmethod
    def parse(cls, text: str) -> "Aggregate":
        text = text.strip()
        if text.lower().startswith("predicate:"):
            try:
                return cls("predicate", (), parse_predicate(text.split(":", 1)[1]))
            except ValueError as exc:
                raise ConfigError(f"bad predicate aggregate {text!r}: {exc}") from None
        m = re.fullmatch(r"(\w+)\s*(?:\(([^)]*)\))?", text)
        if not m or m.group(1).lower() not in AGGREGATES[:-1]:
            raise ConfigError(f"unknown aggregate {text!r}; choose from {', '.join(AGGREGATES)}")
        sets = tuple(s.strip() for s in (m.group(2) or "").split(",") if s.strip())
        return cls(m.group(1).lower(), sets)

    def bind(self, default_sets: Sequence[str]) -> "Aggregate":
        if self.kind == "predicate" or self.sets:
            return self
        return replace(self, sets=tuple(default_sets))

    def relevant(self) -> list[str]:
        return relevant_sets(self.predicate) if self.kind == "predicate" else list(self.sets)

    def label(self) -> str:
        if self.kind == "predicate":
            return f"predicate:{self.predicate}"
        return f"{self.kind}({','.join(self.sets)})"


def _split_aggregates(value: str) -> list[str]:
    """Split on ``;``, and on commas outside parentheses except within predicate text."""
    out = []
    for part in value.split(";"):
        part = part.strip()
        if not part:
            continue
        if part.lower().startswith("predicate:"):
            out.append(part)
            continue
        depth, start = 0, 0
        for j, ch in enumerate(part):
            depth += ch == "("
            depth -= ch == ")"
            if ch == "," and depth == 0:
                out.append(part[start:j].strip())
                start = j + 1
        out.append(part[start:].strip())
    return [a for a in out if a]


def _csv_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetSpec
    estimators: tuple[str, ...]
    ks: tuple[int, ...]
    aggregates: tuple[Aggregate, ...]
    repetitions: int = 1000
    seed: int = 0
    family: RankFamily = RankFamily.WS
    sets: Optional[tuple[str, ...]] = None
    name: str = ""
    output: Optional[str] = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not self.ks or any(k < 1 for k in self.ks):
            raise ConfigError("k values must be >= 1")
        bad = [e for e in self.estimators if e not in ESTIMATORS]
        if bad or not self.estimators:
            raise ConfigError(f"unknown estimators {bad}; choose from {', '.join(ESTIMATORS)}")
        if not self.aggregates:
            raise ConfigError("no aggregates")

    @property
    def label(self) -> str:
        return self.name or f"{self.dataset}/{self.dataset.weights}"

    @classmethod
    def from_text(cls, text: str, base_dir: Optional[str] = None) -> "ExperimentConfig":
        raw: dict[str, str] = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {n}: expected key = value")
            key, value = line.split("=", 1)
            key = key.strip().lower().replace("-", "_")
            if key in raw:
                raise ConfigError(f"line {n}: duplicate key {key!r}")
            raw[key] = value.strip()
        known = {"dataset", "weights", "dataset_seed", "family", "k", "repetitions", "seed", "estimators",
                 "aggregates", "sets", "name", "output"}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys {unknown}")
        for req in ("dataset", "estimators", "k", "aggregates"):
            if req not in raw:
                raise ConfigError(f"missing required key {req!r}")
        try:
            spec = DatasetSpec.parse(raw["dataset"], raw.get("weights", "uniform"), int(raw.get("dataset_seed", 0)))
            ks = tuple(int(k) for k in _csv_list(raw["k"]))
            family = RankFamily.parse(raw.get("family", "WS"))
            reps = int(raw.get("repetitions", 1000))
            seed = int(raw.get("seed", 0))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        aggregates = tuple(Aggregate.parse(a) for a in _split_aggregates(raw["aggregates"]))
        output = raw.get("output")
        if output and base_dir and not os.path.isabs(output):
            output = os.path.join(base_dir, output)
        return cls(
            dataset=spec,
            estimators=tuple(e.lower() for e in _csv_list(raw["estimators"])),
            ks=ks,
            aggregates=aggregates,
            repetitions=reps,
            seed=seed,
            family=family,
            sets=tuple(_csv_list(raw["sets"])) if "sets" in raw else None,
            name=raw.get("name", ""),
            output=output,
        )

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), os.path.dirname(os.path.abspath(path)))


# -- results -----------------------------------------------------------------


@dataclass(frozen=True)
class ResultRow:
    dataset: str
    aggregate: str
    estimator: str
    k: int
    status: str
    truth: float
    mean_estimate: float
    mean_relative_error: float
    rel_error_se: float
    empirical_variance: float
    mean_combination_size: float
    repetitions: int
    clamped: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"


_HEX_COLUMNS = ("mean_estimate", "mean_relative_error")
_INT_FIELDS = ("k", "repetitions", "clamped")
_STR_FIELDS = ("dataset", "aggregate", "estimator", "status")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _result_columns() -> list[str]:
    cols = [f.name for f in fields(ResultRow)]
    return cols + [f"{c}_hex" for c in _HEX_COLUMNS]


def write_results(rows: Iterable[ResultRow], dst=None):
    rows = sorted(rows, key=lambda r: (r.dataset, r.aggregate, r.estimator, r.k))
    buf = _io.StringIO()
    buf.write(f"#schema={RESULTS_SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_result_columns())
    for r in rows:
        vals = [_fmt(getattr(r, f.name)) for f in fields(ResultRow)]
        vals += [float(getattr(r, c)).hex() for c in _HEX_COLUMNS]
        w.writerow(vals)
    text = buf.getvalue()
    if dst is None:
        return text
    if isinstance(dst, (str, os.PathLike)):
        with open(dst, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        dst.write(text)
    return None


def _read_schema_csv(src, schema: str) -> list[dict]:
    if isinstance(src, (str, os.PathLike)):
        with open(src, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = src.read()
    lines = text.splitlines()
    if not lines or lines[0].strip() != f"#schema={schema}":
        raise ValueError(f"expected a '#schema={schema}' first line")
    return list(csv.DictReader(lines[1:]))


def read_results(src) -> list[ResultRow]:
    out = []
    for rec in _read_schema_csv(src, RESULTS_SCHEMA):
        kw = {}
        for f in fields(ResultRow):
            v = rec[f.name]
            if f.name in _HEX_COLUMNS and rec.get(f"{f.name}_hex"):
                kw[f.name] = float.fromhex(rec[f"{f.name}_hex"])
            elif f.name in _INT_FIELDS:
                kw[f.name] = int(v)
            elif f.name in _STR_FIELDS:
                kw[f.name] = v
            else:
                kw[f.name] = float(v)
        out.append(ResultRow(**kw))
    return out


# -- per-repetition evaluation ----------------------------------------------


def _is_uniform(weights: np.ndarray) -> bool:
    return bool(np.all(weights == weights[0]))


class _Task:
    """One aggregate on a fixed collection: truth, masks and estimator dispatch."""

    def __init__(self, collection: WeightedSetCollection, agg: Aggregate):
        self.collection = collection
        self.agg = agg
        sets = agg.relevant()
        missing = [s for s in sets if s not in collection.sets]
        if missing:
            raise ConfigError(f"aggregate {agg.label()} names unknown sets {missing}")
        if not sets:
            raise ConfigError(f"aggregate {agg.label()} has no sets")
        self.sets = sets
        if agg.kind == "predicate":
            self.pred = agg.predicate
            self.union_pred = Predicate(any_of(*sets))
            self.lcs_ok = analyze_predicate(self.pred)[1] is Kind.LCS
        else:
            self.union_pred = Predicate(any_of(*sets))
            self.inter_pred = Predicate(all_of(*sets))
            self.pred = self.union_pred if agg.kind == "union" else self.inter_pred
            self.lcs_ok = agg.kind == "union"
        self.truth = self._truth()

    def _truth(self) -> float:
        c = self.collection
        if self.agg.kind in ("union", "intersection", "predicate"):
            return oracle_weight(c, self.pred)
        u, i = oracle_weight(c, self.union_pred), oracle_weight(c, self.inter_pred)
        if self.agg.kind == "jaccard":
            return i / u if u > 0 else math.nan
        return u - i

    def masks(self, engine: BatchEngine) -> dict[str, np.ndarray]:
        member_of: dict[int, set] = {}
        for s in self.sets:
            for i in self.collection.sets[s]:
                member_of.setdefault(i, set()).add(s)
        out = {}
        for name, pred in (("pred", self.pred), ("union", self.union_pred), ("inter", getattr(self, "inter_pred", None))):
            if pred is None:
                continue
            keys = [self.collection.ground[int(i)] for i in engine.ids]
            out[name] = np.array([evaluate_exact(pred, key, member_of.get(key.id, set())) for key in keys], dtype=bool)
        return out


def _batch_estimates(task: _Task, estimator: str, block, masks, uniform: bool) -> tuple[np.ndarray, np.ndarray, int]:
    """Per-seed estimates, combination sizes and clamp count for a batch estimator."""
    kind = BATCH_ESTIMATORS[estimator]
    lcs_like = kind in ("LCS", "POISSON_LCS")
    scs_twin = {"LCS": "SCS", "POISSON_LCS": "POISSON_SCS"}.get(kind, kind)
    agg = task.agg.kind
    size = block.sizes(kind).astype(float)
    if agg in ("union", "intersection", "predicate"):
        if lcs_like and not task.lcs_ok:
            raise Inapplicable(f"{estimator} cannot evaluate {task.agg.label()}")
        return block.estimate(kind, masks["pred"]), size, 0
    if agg == "hamming":
        u = block.estimate(kind, masks["union"])
        i = block.estimate(scs_twin, masks["inter"])
        raw = u - i
        return np.maximum(raw, 0.0), size, int(np.sum(raw < 0))
    # jaccard
    if kind in ("UNION", "SCS") and uniform:
        return block.count_in(kind, masks["inter"]) / np.maximum(size, 1), size, 0
    if kind == "SCS":
        raise Inapplicable("uniform SCS selectivity needs equal weights")
    u = block.estimate(kind, masks["union"])
    i = block.estimate(scs_twin, masks["inter"])
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(u > 0, i / u, np.nan), size, 0


def _kmins_seeds(rep_seed: int, k: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(int(rep_seed)).generate_state(k, dtype=np.uint64)]


def _scalar_estimate(task: _Task, estimator: str, collection: WeightedSetCollection, family: RankFamily,
                     seed: int, k: int) -> tuple[float, float, int]:
    """One repetition of a per-object estimator: (estimate, combination size, clamped)."""
    agg = task.agg.kind
    if estimator in ("ml_scs", "ml_known", "kmins") and family is not RankFamily.WS:
        raise Inapplicable(f"{estimator} needs WS ranks")
    if estimator == "kmins":
        seeds = _kmins_seeds(seed, k)
        union_keys = [collection.ground[i] for i in sorted(collection.union_ids(task.sets))]
        sk = build_kmins(union_keys, family, seeds)
        total_rank = math.fsum(r for _, r in sk.coordinates)
        w_u = (k - 1) / total_rank if k > 1 else 1.0 / total_rank
        member_of = {i: {s for s in task.sets if i in collection.sets[s]} for i, _ in sk.coordinates}
        frac_pred = np.mean([evaluate_exact(task.pred, collection.ground[i], member_of[i]) for i, _ in sk.coordinates])
        if agg in ("union", "intersection", "predicate"):
            return (w_u if agg == "union" else w_u * frac_pred), float(k), 0
        inter = getattr(task, "inter_pred")
        frac_i = np.mean([evaluate_exact(inter, collection.ground[i], member_of[i]) for i, _ in sk.coordinates])
        return (frac_i if agg == "jaccard" else w_u * (1 - frac_i)), float(k), 0

    sketches = build_coordinated(collection.subcollection(task.sets), family, seed, k)
    if estimator == "ml_scs":
        comb = build_scs(list(sketches.values()))
        size = float(len(comb))
        if agg == "union":
            return ml_union_scs(comb), size, 0
        if agg in ("intersection", "predicate"):
            return ml_subpop_scs(comb, task.pred), size, 0
        u = ml_union_scs(comb)
        i = ml_subpop_scs(comb, task.inter_pred)
        return (i / u if agg == "jaccard" else max(u - i, 0.0)), size, int(u - i < 0)
    if estimator == "ml_known":
        if len(task.sets) != 2 or agg == "predicate":
            raise Inapplicable("ml_known answers two-set union/intersection/jaccard/hamming")
        a, b = task.sets
        comb = build_scs([sketches[a], sketches[b]])
        wa = collection.weight(collection.sets[a])
        wb = collection.weight(collection.sets[b])
        res = ml_intersection_known_weights(comb, wa, wb, a, b)
        value = {"intersection": res.intersection, "union": res.union, "jaccard": res.resemblance,
                 "hamming": res.union - res.intersection}[agg]
        return value, float(len(comb)), int(res.clamped)
    if estimator == "lcs_known":
        if not task.lcs_ok:
            raise Inapplicable("lcs_known answers attribute selections over the union only")
        known = {s: collection.weight(collection.sets[s]) for s in task.sets}
        pred = None if agg == "union" else task.pred
        size = float(len(set().union(*(sk.key_ids() for sk in sketches.values()))))
        return lcs_union_known_weights(sketches, known, pred), size, 0
    if estimator == "ie":
        if agg != "intersection" or len(task.sets) != 2:
            raise Inapplicable("inclusion-exclusion answers two-set intersections only")
        a, b = task.sets
        wa = collection.weight(collection.sets[a])
        wb = collection.weight(collection.sets[b])
        size = float(len(set(sketches[a].key_ids()) | set(sketches[b].key_ids())))
        return inclusion_exclusion_intersection(sketches, a, b, wa, wb), size, 0
    raise ConfigError(f"unknown estimator {estimator!r}")


def _row(label, task, estimator, k, est, sizes, clamped, reps) -> ResultRow:
    est = np.asarray(est, dtype=float)
    truth = task.truth
    if truth and math.isfinite(truth):
        rel = np.abs(est - truth) / abs(truth)
    else:
        rel = np.abs(est - truth)
    var = float(np.var(est, ddof=1)) if len(est) > 1 else 0.0
    se = float(np.std(rel, ddof=1) / math.sqrt(len(rel))) if len(rel) > 1 else 0.0
    return ResultRow(label, task.agg.label(), estimator, k, "ok", float(truth), float(np.mean(est)),
                     float(np.mean(rel)), se, var, float(np.mean(sizes)), reps, int(clamped))


def _inapplicable_row(label, task, estimator, k, reps, note="inapplicable") -> ResultRow:
    nan = math.nan
    return ResultRow(label, task.agg.label(), estimator, k, note, float(task.truth), nan, nan, nan, nan, nan, reps, 0)


def run_experiment(config: ExperimentConfig, collection: Optional[WeightedSetCollection] = None,
                   progress: Optional[Callable[[str], None]] = None) -> list[ResultRow]:
    """Run every (k, estimator, aggregate) of ``config``; rows come back sorted."""
    if collection is None:
        collection = gen_dataset(config.dataset)
    default_sets = list(config.sets) if config.sets else list(collection.sets)
    tasks = [_Task(collection, agg.bind(default_sets)) for agg in config.aggregates]
    seeds = seed_range(config.seed, config.repetitions)
    uniform = _is_uniform(np.array([key.weight for key in collection.ground.values()]))
    rows: list[ResultRow] = []
    label = config.label
    batch = [e for e in config.estimators if e in BATCH_ESTIMATORS]
    scalar = [e for e in config.estimators if e in SCALAR_ESTIMATORS]
    for k in config.ks:
        engines: dict[tuple, BatchEngine] = {}
        for task in tasks:
            if batch:
                ekey = tuple(task.sets)
                if ekey not in engines:
                    engines[ekey] = BatchEngine(collection, config.family, k, sets=task.sets,
                                                poisson=any(e.startswith("poisson") for e in batch))
                engine = engines[ekey]
                masks = task.masks(engine)
                acc = {e: ([], [], 0) for e in batch}
                dead = {}
                for block in engine.blocks(seeds):
                    for e in batch:
                        if e in dead:
                            continue
                        try:
                            est, size, cl = _batch_estimates(task, e, block, masks, uniform)
                        except Inapplicable as exc:
                            dead[e] = str(exc)
                            continue
                        ests, sizes, clamped = acc[e]
                        ests.append(est)
                        sizes.append(size)
                        acc[e] = (ests, sizes, clamped + cl)
                for e in batch:
                    if e in dead:
                        rows.append(_inapplicable_row(label, task, e, k, config.repetitions))
                    else:
                        ests, sizes, cl = acc[e]
                        rows.append(_row(label, task, e, k, np.concatenate(ests), np.concatenate(sizes), cl,
                                         config.repetitions))
            for e in scalar:
                ests, sizes, clamped = [], [], 0
                try:
                    for sd in seeds:
                        est, size, cl = _scalar_estimate(task, e, collection, config.family, int(sd), k)
                        ests.append(est)
                        sizes.append(size)
                        clamped += cl
                except Inapplicable:
                    rows.append(_inapplicable_row(label, task, e, k, config.repetitions))
                    continue
                rows.append(_row(label, task, e, k, ests, sizes, clamped, config.repetitions))
            if progress:
                progress(f"k={k} {task.agg.label()} done")
    return sorted(rows, key=lambda r: (r.dataset, r.aggregate, r.estimator, r.k))


# -- summaries ---------------------------------------------------------------


@dataclass(frozen=True)
class SummaryRow:
    dataset: str
    aggregate: str
    estimator: str
    k: int
    improvement_factor: float
    predicted_factor: float
    factor_ratio: float
    factor_verdict: str
    variance_ratio: float
    variance_verdict: str


def summarize(rows: Sequence[ResultRow], baseline: str = "union", tolerance: float = 0.15) -> list[SummaryRow]:
    """Improvement factors over ``baseline`` with their ``sqrt(l / l_baseline)`` predictions.

    ``factor_verdict`` is ``match`` when the measured factor is within
    ``tolerance`` of the prediction. ``variance_verdict`` is ``le`` when the
    estimator's variance does not exceed the baseline's by more than two
    standard errors (normal approximation), else ``gt``.
    """
    base = {(r.dataset, r.aggregate, r.k): r for r in rows if r.estimator == baseline and r.ok}
    out = []
    for r in rows:
        if r.estimator == baseline or not r.ok:
            continue
        b = base.get((r.dataset, r.aggregate, r.k))
        if b is None:
            raise ValueError(f"no {baseline!r} baseline row for {r.dataset} / {r.aggregate} / k={r.k}")
        factor = b.mean_relative_error / r.mean_relative_error if r.mean_relative_error > 0 else math.inf
        predicted = math.sqrt(r.mean_combination_size / b.mean_combination_size)
        ratio = factor / predicted if predicted > 0 else math.nan
        verdict = "match" if abs(ratio - 1) <= tolerance else "mismatch"
        vr = r.empirical_variance / b.empirical_variance if b.empirical_variance > 0 else math.nan
        slack = 2 * math.sqrt(2.0 / max(b.repetitions - 1, 1))
        vverdict = "le" if r.empirical_variance <= b.empirical_variance * (1 + slack) else "gt"
        out.append(SummaryRow(r.dataset, r.aggregate, r.estimator, r.k, factor, predicted, ratio, verdict, vr, vverdict))
    return sorted(out, key=lambda s: (s.dataset, s.aggregate, s.estimator, s.k))


def write_summary(rows: Iterable[SummaryRow], dst=None):
    buf = _io.StringIO()
    buf.write(f"#schema={SUMMARY_SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f.name for f in fields(SummaryRow)])
    for r in rows:
        w.writerow([_fmt(getattr(r, f.name)) for f in fields(SummaryRow)])
    text = buf.getvalue()
    if dst is None:
        return text
    if isinstance(dst, (str, os.PathLike)):
        with open(dst, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        dst.write(text)
    return None


# -- desk-scale presets (set sizes shrunk 10x, k shrunk with them) -----------

PRESETS = {
    "pair-jaccard": """
        dataset = pair(1000, 20)
        k = 16, 32, 64
        repetitions = 1000
        estimators = union, scs, lcs, kmins
        aggregates = jaccard; union; intersection; hamming
    """,
    "shared-core": """
        dataset = shared_core(5, 100, 500)
        k = 16, 32
        repetitions = 1000
        estimators = union, scs, lcs, poisson_scs, poisson_lcs
        aggregates = union(A1,A2); union(A1,A2,A3); union(A1,A2,A3,A4); union(A1,A2,A3,A4,A5)
    """,
    "disjoint": """
        dataset = disjoint(5, 991)
        k = 32
        repetitions = 1000
        estimators = union, scs, lcs, ml_scs, lcs_known
        aggregates = union
    """,
    "heavy-overlap": """
        dataset = heavy_overlap(5, 2477, 495)
        k = 32
        repetitions = 1000
        estimators = union, scs, lcs, ml_scs, lcs_known
        aggregates = union
    """,
    "heterogeneous": """
        dataset = heterogeneous(45, 30000, 0.3, 93, 1170)
        k = 16, 64, 256
        repetitions = 1000
        estimators = union, scs, lcs
        aggregates = union
    """,
}


def preset(name: str) -> ExperimentConfig:
    try:
        text = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return ExperimentConfig.from_text("\n".join(line.strip() for line in text.strip().splitlines()))
