"""Coordinated bottom-k sketches of weighted sets and multiple-set estimators."""

import sys as _sys

from .combine import Combination, CoordinationError, Kind, Membership, lcs, scs, union_sketch
from .core import (
    INF,
    BottomKSketch,
    Key,
    KMinsSketch,
    RankAssignment,
    RankFamily,
    SketchEntry,
    TableRankAssignment,
    WeightedSetCollection,
    build_bottom_k,
    build_coordinated,
    build_kmins,
    hash_uniform,
    inclusion_prob,
)
from .datasets import gen_dataset, oracle_jaccard, oracle_weight
from .estimate_ml import (
    BracketError,
    lcs_union_known_weights,
    ml_intersection_known_weights,
    ml_subpop_scs,
    ml_union_scs,
)
from .estimate_rc import (
    AdjustedWeightMap,
    Estimate,
    InapplicableEstimator,
    derived_aggregates,
    estimate_function_sum,
    estimate_weight,
    inclusion_exclusion_intersection,
    rc_adjusted_weights,
)
from .estimate_sel import IntractableError, ReplacementSample, Rule, draw_replacement_sample, rho1, rho2, rho_scs_uniform
from .estimator import CoordinatedSketchEstimator
from .poisson import (
    PoissonSample,
    build_poisson,
    build_poisson_coordinated,
    poisson_lcs,
    poisson_lcs_like_weights,
    poisson_scs,
    poisson_scs_like_weights,
    solve_tau_for_expected_size,
)
from .predicate import Predicate, PredicateError, all_of, any_of, at_least, in_set, parse_predicate

__version__ = "0.1.0"

__all__ = sorted(
    name for name, obj in globals().items() if not name.startswith("_") and not isinstance(obj, type(_sys))
)
