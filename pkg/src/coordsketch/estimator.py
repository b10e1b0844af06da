"""Scikit-learn style facade over coordinated sketching and RC estimation."""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_collection, check_family, check_k, check_seed
from .core import build_coordinated
from .estimate_rc import Estimate, estimate_weight
from .predicate import as_predicate


class CoordinatedSketchEstimator(TransformerMixin, BaseEstimator):
    """Sketch every set of a collection, then estimate predicate weights.

    Parameters
    ----------
    k : int
        Bottom-k sketch size per set.
    family : {"WS", "PRI"}
        Rank family.
    seed : int
        Seed of the shared rank assignment.
    combination : {"best", "UNION", "SCS", "LCS"}
        Combination used by :meth:`predict`. ``"best"`` picks the LCS when
        the predicate allows it and the SCS otherwise.
    sets : sequence of str, optional
        Restrict sketching to these set ids.

    Examples
    --------
    >>> est = CoordinatedSketchEstimator(k=4).fit({"A": [1, 2, 3], "B": [3, 4]})
    >>> est.predict(["in(A) | in(B)"])
    array([4.])
    """

    def __init__(self, k: int = 64, family: str = "WS", seed: int = 0, combination: str = "best",
                 sets: Optional[Sequence[str]] = None):
        self.k = k
        self.family = family
        self.seed = seed
        self.combination = combination
        self.sets = sets

    def fit(self, X, y=None):
        """Build coordinated sketches of ``X`` (a collection or mapping of sets)."""
        k = check_k(self.k)
        family = check_family(self.family)
        seed = check_seed(self.seed)
        collection = check_collection(X)
        if self.sets is not None:
            collection = collection.subcollection(list(self.sets))
        self.sketches_ = build_coordinated(collection, family, seed, k)
        self.family_ = family
        self.set_ids_ = list(self.sketches_)
        self.n_features_in_ = len(self.set_ids_)
        return self

    def estimate(self, predicate, combination: Optional[str] = None) -> Estimate:
        """Estimate for one predicate, with the combination kind and size used."""
        check_is_fitted(self, "sketches_")
        return estimate_weight(self.sketches_, as_predicate(predicate), combination or self.combination)

    def predict(self, X: Iterable) -> np.ndarray:
        """Estimated weight of each predicate in ``X``."""
        return np.array([self.estimate(p).value for p in X], dtype=float)

    def transform(self, X: Iterable) -> np.ndarray:
        """``(n, 2)`` array of estimate and combination size per predicate."""
        rows = [self.estimate(p) for p in X]
        return np.array([[r.value, r.size] for r in rows], dtype=float).reshape(len(rows), 2)

    def fit_transform(self, X, y=None, predicates: Iterable = (), **fit_params):
        return self.fit(X).transform(predicates)
