import math

import numpy as np
import pytest

from coordsketch.core import (
    INF,
    Key,
    RankAssignment,
    RankFamily,
    WeightedSetCollection,
    build_bottom_k,
    build_coordinated,
    build_kmins,
    draw_rank,
    hash_uniform,
    inclusion_prob,
    kmins_union,
)
from coordsketch.datasets import FOUR_SET_RANKS


def test_pri_rank_is_u_over_w():
    assert RankFamily.PRI.rank_from_uniform(0.131, 1.0) == pytest.approx(0.131)
    assert RankFamily.PRI.rank_from_uniform(0.832, 3.0) == pytest.approx(0.27733, abs=1e-5)


def test_ws_rank_near_one_is_near_zero():
    r = RankFamily.WS.rank_from_uniform(1 - 2**-53, 1.0)
    assert 0 < r < 1e-15


def test_draw_rank_deterministic():
    a = RankAssignment(RankFamily.WS, 99)
    key = Key(12345, 2.5)
    assert draw_rank(a, key) == draw_rank(a, key)
    assert draw_rank(a, key) != draw_rank(RankAssignment(RankFamily.WS, 100), key)


def test_hash_uniform_open_interval_and_uniform():
    u = hash_uniform(np.uint64(5), np.arange(200_000, dtype=np.uint64))
    assert u.min() > 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.003
    hist, _ = np.histogram(u, bins=20, range=(0, 1))
    assert hist.min() > 0.95 * len(u) / 20


@pytest.mark.parametrize(
    "family,w,tau,expected",
    [
        ("PRI", 1.0, 0.599, 0.599),
        ("PRI", 3.0, 0.599, 1.0),
        ("WS", 2.0, INF, 1.0),
        ("PRI", 2.0, INF, 1.0),
        ("WS", 2.0, 0.0, 0.0),
        ("WS", 2.0, 0.5, 1 - math.exp(-1.0)),
    ],
)
def test_inclusion_prob(family, w, tau, expected):
    assert inclusion_prob(family, w, tau) == pytest.approx(expected, rel=1e-15)


def test_pri_adjusted_weight_matches_figure_value():
    assert 1.0 / inclusion_prob("PRI", 1.0, 0.599) == pytest.approx(1.67, abs=0.005)


def test_ws_inclusion_prob_small_tau_has_no_cancellation():
    assert inclusion_prob("WS", 1.0, 1e-20) == pytest.approx(1e-20, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan, "x"])
def test_nonpositive_weight_rejected(bad):
    with pytest.raises(ValueError):
        Key(1, bad)


def test_fixture_sketch_rows(fixture4):
    _, _, sk = fixture4
    assert [(e.key_id, e.rank) for e in sk["A3"].entries] == [(7, 0.131), (4, 0.208), (3, 0.3)]
    assert sk["A3"].threshold == 0.599
    assert [(e.key_id, e.rank) for e in sk["A1"].entries] == [(7, 0.131), (3, 0.3), (1, 0.487)]
    assert sk["A1"].threshold == 0.73


def test_small_set_has_infinite_threshold():
    keys = [Key(1, 1.0), Key(2, 2.0)]
    sk = build_bottom_k(keys, RankAssignment(RankFamily.WS, 1), 3)
    assert len(sk.entries) == 2 and sk.threshold == INF and sk.exhausted


def test_empty_set_is_degenerate():
    sk = build_bottom_k([], RankAssignment(RankFamily.WS, 1), 3)
    assert sk.degenerate and sk.threshold == INF and not sk.entries


def test_k_must_be_positive():
    with pytest.raises(ValueError):
        build_bottom_k([Key(1, 1.0)], RankAssignment(RankFamily.WS, 1), 0)


def test_ties_broken_by_ascending_id():
    from coordsketch.core import TableRankAssignment

    table = TableRankAssignment(RankFamily.PRI, {1: 0.5, 2: 0.2, 3: 0.2, 4: 0.9})
    sk = build_bottom_k([Key(i, 1.0) for i in (4, 3, 2, 1)], table, 2)
    assert sk.key_ids() == [2, 3]
    assert sk.threshold == 0.5


def test_coordination_and_copies(small_collection):
    c = small_collection
    dup = WeightedSetCollection(c.ground.values(), {"X": c.sets["A1"], "Y": c.sets["A1"], **c.sets})
    sk = build_coordinated(dup, "WS", 3, 8)
    assert sk["X"].entries == sk["Y"].entries and sk["X"].threshold == sk["Y"].threshold
    ranks = {}
    for s in sk.values():
        for e in s.entries:
            assert ranks.setdefault(e.key_id, e.rank) == e.rank


def test_single_set_matches_build_bottom_k(small_collection):
    c = small_collection
    a = RankAssignment(RankFamily.PRI, 11)
    direct = build_bottom_k(c.keys_of("A2"), a, 5, "A2")
    assert build_coordinated(c, "PRI", 11, 5)["A2"] == direct


def test_sketch_invariants(small_collection):
    c = small_collection
    for seed in range(20):
        for s, sk in build_coordinated(c, "WS", seed, 6).items():
            keys = c.keys_of(s)
            a = RankAssignment(RankFamily.WS, seed)
            ranks = sorted((draw_rank(a, key), key.id) for key in keys)
            assert [e.key_id for e in sk.entries] == [i for _, i in ranks[:6]]
            assert sk.threshold == ranks[6][0]
            assert max(e.rank for e in sk.entries) < sk.threshold


def test_minimum_rank_key_law():
    keys = [Key(1, 1.0), Key(2, 2.0), Key(3, 5.0)]
    hits = np.zeros(3)
    n = 20_000
    for seed in range(n):
        sk = build_bottom_k(keys, RankAssignment(RankFamily.WS, seed), 1)
        hits[sk.entries[0].key_id - 1] += 1
    p = np.array([1, 2, 5]) / 8
    se = np.sqrt(p * (1 - p) / n)
    assert np.all(np.abs(hits / n - p) < 4 * se)


def test_fixture_table_ranks_used():
    assert FOUR_SET_RANKS[4] == 0.208


def test_kmins_singleton_and_union():
    seeds = list(range(32))
    sk = build_kmins([Key(9, 2.0)], "WS", seeds)
    assert sk.k == 32 and all(i == 9 for i, _ in sk.coordinates)
    a = [Key(i, 1.0 + i % 3) for i in range(1, 30)]
    b = [Key(i, 1.0 + i % 3) for i in range(20, 50)]
    both = {k.id: k for k in a + b}
    u = kmins_union([build_kmins(a, "WS", seeds, "A"), build_kmins(b, "WS", seeds, "B")])
    direct = build_kmins(list(both.values()), "WS", seeds)
    assert u.coordinates == direct.coordinates


def test_kmins_uniform_hit_fraction():
    keys = [Key(i, 1.0) for i in range(1, 5)]
    sk = build_kmins(keys, "WS", list(range(8000)))
    frac = sum(1 for i, _ in sk.coordinates if i == 1) / sk.k
    assert abs(frac - 0.25) < 4 * math.sqrt(0.25 * 0.75 / sk.k)


def test_kmins_rejects_duplicate_seeds():
    with pytest.raises(ValueError):
        build_kmins([Key(1, 1.0)], "WS", [1, 1])


def test_collection_rejects_unknown_members():
    with pytest.raises(ValueError):
        WeightedSetCollection([Key(1, 1.0)], {"A": [1, 2]})


def test_unknown_family():
    with pytest.raises(ValueError):
        RankFamily.parse("nope")
