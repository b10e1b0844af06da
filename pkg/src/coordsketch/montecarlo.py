"""Vectorized evaluation of coordinated-sketch estimators over many seeds.

For each seed the engine computes the same sketches, combinations and
adjusted weights as the per-object code in :mod:`combine` and
:mod:`estimate_rc`, but for a whole block of seeds at once as dense
``(seeds, keys)`` arrays. Estimates of a subpopulation are then a matrix
product with its 0/1 indicator, which is valid because every combination
used here decides its predicates exactly on the entries it keeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from .core import RankFamily, WeightedSetCollection, hash_uniform
from .poisson import solve_tau_for_expected_size

KINDS = ("UNION", "SCS", "LCS", "POISSON_SCS", "POISSON_LCS")


@dataclass
class Block:
    """Adjusted weights for one block of seeds; arrays are ``(seeds, keys)``."""

    seeds: np.ndarray
    ids: np.ndarray
    weights: np.ndarray
    adjusted: dict[str, np.ndarray]
    included: dict[str, np.ndarray]

    def sizes(self, kind: str) -> np.ndarray:
        return self.included[kind].sum(axis=1)

    def estimate(self, kind: str, mask: np.ndarray) -> np.ndarray:
        """Estimated weight of the keys selected by ``mask`` (a length-``keys`` 0/1 vector)."""
        return self.adjusted[kind] @ mask.astype(float)

    def count_in(self, kind: str, mask: np.ndarray) -> np.ndarray:
        return self.included[kind] @ mask.astype(float)


class BatchEngine:
    """Dense coordinated-sketch simulator for a fixed collection, family and k.

    ``sets`` restricts the simulation to those set ids (default: all).
    ``poisson_taus`` fixes per-set Poisson thresholds; by default each is
    solved for expected sample size ``k``.
    """

    def __init__(
        self,
        collection: WeightedSetCollection,
        family,
        k: int,
        sets: Optional[Sequence[str]] = None,
        poisson: bool = True,
        poisson_taus: Optional[Mapping[str, float]] = None,
        block_cells: int = 4_000_000,
    ):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.family = RankFamily.parse(family)
        self.k = int(k)
        self.set_ids = list(sets) if sets is not None else list(collection.sets)
        members = set().union(*(collection.sets[s] for s in self.set_ids))
        self.ids = np.array(sorted(members), dtype=np.uint64)
        self.weights = np.array([collection.ground[int(i)].weight for i in self.ids], dtype=float)
        pos = {int(i): j for j, i in enumerate(self.ids)}
        self.membership = np.zeros((len(self.set_ids), len(self.ids)), dtype=bool)
        for a, s in enumerate(self.set_ids):
            self.membership[a, [pos[i] for i in collection.sets[s]]] = True
        self.poisson = poisson
        if poisson:
            if poisson_taus is None:
                taus = []
                for a in range(len(self.set_ids)):
                    w = self.weights[self.membership[a]]
                    taus.append(solve_tau_for_expected_size(w, self.family, min(self.k, len(w))))
                self.poisson_taus = np.array(taus)
            else:
                self.poisson_taus = np.array([float(poisson_taus[s]) for s in self.set_ids])
        self.block_rows = max(1, block_cells // max(1, len(self.ids)))

    def mask(self, key_ids) -> np.ndarray:
        """0/1 indicator over the engine's key order for the given ids."""
        return np.isin(self.ids, np.asarray(list(key_ids), dtype=np.uint64))

    def ranks(self, seeds: np.ndarray) -> np.ndarray:
        u = hash_uniform(np.asarray(seeds, dtype=np.uint64)[:, None], self.ids[None, :])
        return np.asarray(self.family.rank_from_uniform(u, self.weights[None, :]))

    def _kth(self, ranks: np.ndarray, member: np.ndarray, k: int) -> np.ndarray:
        """Per-row (k+1)-st smallest rank among member columns (inf when there are at most k)."""
        cnt = int(member.sum())
        if cnt <= k:
            return np.full(ranks.shape[0], np.inf)
        sub = ranks[:, member]
        return np.partition(sub, k, axis=1)[:, k]

    def run_block(self, seeds: np.ndarray) -> Block:
        seeds = np.asarray(seeds, dtype=np.uint64)
        r = self.ranks(seeds)
        w = self.weights[None, :]
        fam = self.family
        thr = np.stack([self._kth(r, self.membership[a], self.k) for a in range(len(self.set_ids))], axis=1)
        in_sketch = np.stack(
            [self.membership[a][None, :] & (r < thr[:, a:a + 1]) for a in range(len(self.set_ids))], axis=0
        )
        pooled = in_sketch.any(axis=0)
        union_member = self.membership.any(axis=0)
        thr_u = self._kth(r, union_member, self.k)
        adjusted, included = {}, {}

        def put(name, inc, tau):
            # only the kept cells need an inclusion probability
            wk = np.broadcast_to(w, inc.shape)[inc]
            tk = np.broadcast_to(tau, inc.shape)[inc]
            a = np.zeros(inc.shape)
            a[inc] = wk / fam.inclusion_prob(wk, tk)
            adjusted[name] = a
            included[name] = inc

        put("UNION", union_member[None, :] & (r < thr_u[:, None]), thr_u[:, None])
        tau_s = thr.min(axis=1)
        put("SCS", pooled & (r < tau_s[:, None]), tau_s[:, None])
        lcs_tau = np.where(in_sketch, thr.T[:, :, None], -np.inf).max(axis=0)
        put("LCS", pooled, np.where(pooled, lcs_tau, np.inf))
        if self.poisson:
            pt = self.poisson_taus
            in_sample = self.membership[:, None, :] & (r[None, :, :] < pt[:, None, None])
            pooled_p = in_sample.any(axis=0)
            ts = float(pt.min())
            put("POISSON_SCS", pooled_p & (r < ts), ts)
            ptau = np.where(in_sample, pt[:, None, None], -np.inf).max(axis=0)
            put("POISSON_LCS", pooled_p, np.where(pooled_p, ptau, np.inf))
        return Block(seeds, self.ids, self.weights, adjusted, included)

    def blocks(self, seeds: Sequence[int]) -> Iterator[Block]:
        seeds = np.asarray(seeds, dtype=np.uint64)
        for start in range(0, len(seeds), self.block_rows):
            yield self.run_block(seeds[start:start + self.block_rows])


def seed_range(base: int, count: int) -> np.ndarray:
    """Per-repetition seeds ``base, base+1, ...`` as unsigned 64-bit values."""
    return (np.uint64(base) + np.arange(count, dtype=np.uint64)).astype(np.uint64)
