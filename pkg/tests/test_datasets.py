import pytest

from coordsketch.datasets import DatasetSpec, WeightModel, gen_dataset, oracle_jaccard, oracle_weight


def test_pair():
    c = gen_dataset("pair(10000, 2000)")
    assert len(c.union_ids()) == 18000
    assert oracle_weight(c, "in(A1) & in(A2)") == 2000
    assert oracle_jaccard(c, "A1", "A2") == pytest.approx(2000 / 18000)


def test_disjoint_and_shared_core():
    assert len(gen_dataset("disjoint(5, 9906)").ground) == 49530
    assert len(gen_dataset("shared_core(3, 1000, 5000)").ground) == 16000
    c = gen_dataset("heavy_overlap(5, 24765, 4953)")
    assert len(c.ground) == 49530 and oracle_weight(c, "atleast(5, A1, A2, A3, A4, A5)") == 24765


def test_rejections():
    with pytest.raises(ValueError):
        gen_dataset("pair(10, 11)")
    with pytest.raises(ValueError):
        gen_dataset("nope(1)")
    with pytest.raises(ValueError):
        gen_dataset("pair(10, 2)", weights="lognormal")
    with pytest.raises(ValueError):
        gen_dataset("pair(10, 2, 3, 4)")


def test_deterministic_and_seeded():
    a = gen_dataset("pair(100, 10)", "pareto(2)", 1)
    b = gen_dataset("pair(100, 10)", "pareto(2)", 1)
    c = gen_dataset("pair(100, 10)", "pareto(2)", 2)
    assert a.ground == b.ground and a.ground != c.ground
    assert all(k.weight >= 1 for k in a.ground.values())


def test_labels_and_oracle_predicates():
    c = gen_dataset("pair(100, 10)")
    assert all(k.attrs["label"] == k.id % 10 for k in c.ground.values())
    assert oracle_weight(c, "in(A1) & attr(label) < 3") == 30
    assert oracle_weight(c, "in(A1) & !in(A1)") == 0


def test_four_set_fixture_oracle():
    from coordsketch.datasets import four_set_fixture

    c, _ = four_set_fixture()
    assert oracle_weight(c, "atleast(2, A1, A2, A3, A4)") == 11
    assert oracle_weight(c, "in(A1) | in(A2) | in(A3) | in(A4)") == 13


def test_heterogeneous_shape():
    c = gen_dataset("heterogeneous(45, 30000, 0.3, 93, 1170)")
    sizes = [len(m) for m in c.sets.values()]
    assert len(sizes) == 45 and min(sizes) >= 93 and max(sizes) <= 1170
    assert len(c.ground) < sum(sizes)


def test_spec_parsing():
    spec = DatasetSpec.parse("shared_core(num_sets=3, core=10, exclusive=5)")
    assert spec.kwargs == {"num_sets": 3, "core": 10, "exclusive": 5}
    assert str(WeightModel.parse("pareto(1.5)")) == "pareto(1.5)"
