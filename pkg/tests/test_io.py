import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coordsketch import io as fmt
from coordsketch.combine import lcs, scs, union_sketch
from coordsketch.core import build_coordinated
from coordsketch.datasets import gen_dataset
from coordsketch.poisson import build_poisson_coordinated

from .helpers import random_collection


def test_collection_round_trip(tmp_path):
    c = gen_dataset("pair(50, 10)", "pareto(1.5)", seed=4)
    path = tmp_path / "c.txt"
    fmt.write_collection(c, path)
    back = fmt.read_collection(path)
    assert back.ground == c.ground and back.sets == c.sets
    assert fmt.write_collection(back) == path.read_text()


def test_collection_comments_and_attrs():
    text = "# header\nkey 1 2.5 label=3 name=x  # trailing\nkey 2 1\nset A 1 2\nset B\n"
    c = fmt.read_collection(io.StringIO(text))
    assert c.ground[1].attrs == {"label": 3, "name": "x"} and c.sets["B"] == frozenset()


@pytest.mark.parametrize(
    "text",
    ["key 1\n", "key x 1\n", "key 1 -2\n", "set A 9\n", "bogus 1\n", "key 1 1 novalue\n", "key 1 1\nkey 1 2\n", "set A\nset A\n"],
)
def test_collection_errors(text):
    with pytest.raises(fmt.FormatError):
        fmt.read_collection(io.StringIO(text))


def test_error_reports_line():
    with pytest.raises(fmt.FormatError, match=":2:"):
        fmt.read_collection(io.StringIO("key 1 1\nkey 2 zz\n"))


@settings(deadline=None, max_examples=30)
@given(seed=st.integers(0, 2**63), k=st.integers(1, 9), fam=st.sampled_from(["WS", "PRI"]))
def test_sketch_round_trip_bit_exact(seed, k, fam):
    c = random_collection(seed % 97, n=30)
    sk = build_coordinated(c, fam, seed, k)
    text = fmt.write_sketches(sk)
    back = fmt.read_sketches(io.StringIO(text))
    assert back == sk
    assert fmt.write_sketches(back) == text


def test_sketch_errors():
    with pytest.raises(fmt.FormatError):
        fmt.read_sketches(io.StringIO("sketch A 2 inf\n"))
    with pytest.raises(fmt.FormatError):
        fmt.read_sketches(io.StringIO("family WS\nentry 1 0x1p-1 1.0\n"))
    with pytest.raises(fmt.FormatError):
        fmt.read_sketches(io.StringIO("family WS\nsketch A 2 inf\nentry 1 zz 1.0\n"))
    with pytest.raises(fmt.FormatError):
        fmt.read_sketches(io.StringIO("family XX\n"))


def test_combination_round_trip(fixture4):
    _, _, sk = fixture4
    for build in (union_sketch, scs, lcs):
        comb = build(list(sk.values()))
        text = fmt.write_combination(comb)
        back = fmt.read_combination(io.StringIO(text))
        assert back.entries == comb.entries and back.membership == comb.membership
        assert back.per_key_tau == comb.per_key_tau and back.threshold == comb.threshold
        assert fmt.write_combination(back) == text
    assert "member 6 A3 UNKNOWN" in fmt.write_combination(lcs(list(sk.values())))


def test_poisson_round_trip(tmp_path):
    c = random_collection(3)
    s = build_poisson_coordinated(c, "WS", 8, k=5)
    path = tmp_path / "p.txt"
    fmt.write_poisson(s, path)
    back = fmt.read_poisson(path)
    assert {n: (p.tau, p.entries) for n, p in back.items()} == {n: (p.tau, p.entries) for n, p in s.items()}
