import numpy as np
import pytest

from coordsketch.combine import lcs, scs, union_sketch
from coordsketch.core import build_coordinated
from coordsketch.estimate_rc import rc_adjusted_weights
from coordsketch.montecarlo import BatchEngine, seed_range
from coordsketch.poisson import build_poisson_coordinated, poisson_lcs_like_weights, poisson_scs_like_weights

from .helpers import random_collection


@pytest.mark.parametrize("family", ["WS", "PRI"])
def test_batch_matches_scalar_path(family):
    c = random_collection(5, n=80, num_sets=3)
    eng = BatchEngine(c, family, 7)
    seeds = seed_range(100, 25)
    block = eng.run_block(seeds)
    col = {int(i): j for j, i in enumerate(eng.ids)}
    for r, seed in enumerate(seeds):
        sk = list(build_coordinated(c, family, int(seed), 7).values())
        taus = {s: float(t) for s, t in zip(eng.set_ids, eng.poisson_taus)}
        ps = build_poisson_coordinated(c, family, int(seed), taus=taus)
        scalar = {
            "UNION": rc_adjusted_weights(union_sketch(sk)).weights,
            "SCS": rc_adjusted_weights(scs(sk)).weights,
            "LCS": rc_adjusted_weights(lcs(sk)).weights,
            "POISSON_SCS": poisson_scs_like_weights(ps).weights,
            "POISSON_LCS": poisson_lcs_like_weights(ps).weights,
        }
        for kind, weights in scalar.items():
            dense = np.zeros(len(eng.ids))
            for i, a in weights.items():
                dense[col[i]] = a
            assert np.array_equal(block.adjusted[kind][r], dense), kind
            assert block.sizes(kind)[r] == len(weights)


def test_blocks_cover_all_seeds():
    c = random_collection(1, n=50)
    eng = BatchEngine(c, "WS", 4, block_cells=120)
    got = np.concatenate([b.seeds for b in eng.blocks(seed_range(0, 17))])
    assert got.tolist() == list(range(17))


def test_mask_and_estimate():
    c = random_collection(2, n=40)
    eng = BatchEngine(c, "PRI", 1000)
    b = eng.run_block(seed_range(0, 3))
    m = eng.mask(c.sets["A1"])
    assert np.allclose(b.estimate("LCS", m), c.weight(c.sets["A1"]))


def test_rejects_bad_k():
    with pytest.raises(ValueError):
        BatchEngine(random_collection(2), "WS", 0)
