import math

import numpy as np
import pytest

from coordsketch.core import INF, Key, RankAssignment, RankFamily, WeightedSetCollection, inclusion_prob
from coordsketch.poisson import (
    build_poisson,
    build_poisson_coordinated,
    poisson_lcs_like_weights,
    poisson_scs,
    poisson_scs_like_weights,
    solve_tau_for_expected_size,
)

UNIT100 = [Key(i, 1.0) for i in range(1, 101)]


def test_tau_examples():
    assert solve_tau_for_expected_size(UNIT100, "PRI", 10) == pytest.approx(0.1, rel=1e-15)
    assert solve_tau_for_expected_size([1.0, 3.0], "PRI", 1) == pytest.approx(0.25, rel=1e-15)
    assert solve_tau_for_expected_size(UNIT100, "WS", 10) == pytest.approx(-math.log(0.9), rel=1e-12)


def test_tau_saturating_pri():
    # heavy key saturates: min(1, 10 t) + 9 t = 2  ->  t = 1/9
    tau = solve_tau_for_expected_size([10.0] + [1.0] * 9, "PRI", 2)
    assert tau == pytest.approx(1 / 9)


@pytest.mark.parametrize("family", ["WS", "PRI"])
def test_tau_meets_expected_size(family):
    w = 1 + np.random.default_rng(0).pareto(1.2, 300)
    for k in (1, 7.5, 50, 299):
        tau = solve_tau_for_expected_size(w, family, k)
        assert np.sum(inclusion_prob(family, w, tau)) == pytest.approx(k, rel=1e-9)


def test_tau_bounds():
    assert solve_tau_for_expected_size(UNIT100, "WS", 100) == INF
    with pytest.raises(ValueError):
        solve_tau_for_expected_size(UNIT100, "PRI", 101)
    with pytest.raises(ValueError):
        solve_tau_for_expected_size(UNIT100, "WS", 0)


def test_build_poisson_extremes():
    a = RankAssignment(RankFamily.WS, 1)
    assert len(build_poisson(UNIT100, a, INF)) == 100
    assert len(build_poisson(UNIT100, a, 0.0)) == 0


def test_expected_sample_size():
    w = np.array([0.5, 1.0, 2.0, 4.0] * 10)
    keys = [Key(i + 1, x) for i, x in enumerate(w)]
    tau = 0.2
    sizes = np.array([len(build_poisson(keys, RankAssignment(RankFamily.WS, s), tau)) for s in range(10_000)])
    p = inclusion_prob("WS", w, tau)
    assert abs(sizes.mean() - p.sum()) < 4 * math.sqrt((p * (1 - p)).sum() / len(sizes))
    assert sizes.var() == pytest.approx((p * (1 - p)).sum(), rel=0.05)


def collection():
    ids = list(range(1, 121))
    ground = [Key(i, 1.0 + (i % 4)) for i in ids]
    return WeightedSetCollection(ground, {"A": ids[:70], "B": ids[50:], "C": ids[20:40]})


def test_equal_taus_give_equal_weight_rules():
    s = build_poisson_coordinated(collection(), "PRI", 5, taus={"A": 0.1, "B": 0.1, "C": 0.1})
    pooled = set().union(*(set(sm._ids) for sm in s.values()))
    assert set(poisson_scs(s).membership) and {e.key_id for e in poisson_scs(s).entries} == pooled
    assert poisson_scs_like_weights(s).weights == poisson_lcs_like_weights(s).weights


def test_uniform_pri_weight_is_reciprocal_tau():
    ids = list(range(1, 51))
    c = WeightedSetCollection([Key(i, 1.0) for i in ids], {"A": ids})
    s = build_poisson_coordinated(c, "PRI", 2, taus={"A": 0.1})
    assert all(a == pytest.approx(10.0) for a in poisson_scs_like_weights(s).weights.values())


def test_lcs_like_uses_largest_tau_holding_key():
    c = collection()
    taus = {"A": 0.05, "B": 0.2, "C": 0.1}
    s = build_poisson_coordinated(c, "PRI", 9, taus=taus)
    awm = poisson_lcs_like_weights(s)
    for i, a in awm.weights.items():
        tau = max(taus[n] for n, sm in s.items() if i in sm)
        w = c.ground[i].weight
        assert a == pytest.approx(w / min(1.0, w * tau))


def test_scs_like_equals_direct_union_sample():
    c = collection()
    taus = {"A": 0.05, "B": 0.2, "C": 0.1}
    union_keys = [c.ground[i] for i in c.union_ids()]
    for seed in range(20):
        s = build_poisson_coordinated(c, "WS", seed, taus=taus)
        direct = build_poisson(union_keys, RankAssignment(RankFamily.WS, seed), 0.05)
        assert [e.key_id for e in poisson_scs(s).entries] == [e.key_id for e in direct.entries]


def test_expected_size_mode_caps_k():
    s = build_poisson_coordinated(collection(), "WS", 0, k=30)
    assert s["C"].tau == INF and len(s["C"]) == 20
    with pytest.raises(ValueError):
        build_poisson_coordinated(collection(), "WS", 0)


def test_union_unbiased_and_lcs_like_dominates():
    c = collection()
    truth = c.weight(c.union_ids())
    scs_est, lcs_est = [], []
    for seed in range(6000):
        s = build_poisson_coordinated(c, "WS", seed, taus={"A": 0.05, "B": 0.15, "C": 0.3})
        scs_est.append(poisson_scs_like_weights(s).total())
        lcs_est.append(poisson_lcs_like_weights(s).total())
    for est in (scs_est, lcs_est):
        assert abs(np.mean(est) - truth) < 4 * np.std(est) / math.sqrt(len(est))
    assert np.var(lcs_est) <= np.var(scs_est)
