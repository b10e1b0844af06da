import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coordsketch.combine import Kind
from coordsketch.core import Key
from coordsketch.predicate import (
    And,
    Attr,
    Const,
    InSet,
    Not,
    Or,
    Predicate,
    PredicateError,
    all_of,
    analyze_predicate,
    any_of,
    at_least,
    evaluate3,
    evaluate_exact,
    is_pure_union,
    parse_predicate,
    relevant_sets,
    to_text,
)

SETS = ["A1", "A2", "A3", "A4"]


def test_precedence_not_and_or():
    p = parse_predicate("in(A) & in(B) | !in(C)")
    assert p.formula == Or((And((InSet("A"), InSet("B"))), Not(InSet("C"))))


def test_parentheses():
    p = parse_predicate("in(A) & (in(B) | in(C))")
    assert p.formula == And((InSet("A"), Or((InSet("B"), InSet("C")))))


def test_attr_leaves():
    p = parse_predicate('attr(label) >= 3 & attr(name) == "x y" & attr(weight) < 2.5')
    a = p.formula.children
    assert a[0] == Attr("label", ">=", 3) and a[1] == Attr("name", "==", "x y") and a[2] == Attr("weight", "<", 2.5)


@pytest.mark.parametrize("text", ["", "in(A", "in(A) &", "foo(A)", "in(A) in(B)", "attr(x) ~ 3", "atleast(5, A, B)"])
def test_bad_text(text):
    with pytest.raises(PredicateError):
        parse_predicate(text)


def test_analyze_fixture_predicates():
    assert analyze_predicate(Predicate(any_of(*SETS))) == (SETS, Kind.LCS)
    assert analyze_predicate(Predicate(all_of("A1", "A2")))[1] is Kind.SCS
    assert analyze_predicate(Predicate(at_least(2, SETS)))[1] is Kind.SCS
    lcs_attr = parse_predicate("(in(A1) | in(A2)) & attr(label) < 5")
    assert analyze_predicate(lcs_attr)[1] is Kind.LCS
    nested = parse_predicate("in(A1) | (in(A2) | in(A3))")
    assert analyze_predicate(nested)[1] is Kind.LCS
    assert analyze_predicate(parse_predicate("in(A1) | !in(A2)"))[1] is Kind.SCS


def test_no_sets_rejected():
    with pytest.raises(PredicateError):
        analyze_predicate(parse_predicate("attr(label) < 3"))


def test_relevant_sets_order():
    assert relevant_sets(parse_predicate("in(B) & in(A) | in(B)")) == ["B", "A"]


def test_at_least_expansion():
    f = at_least(2, ["A", "B", "C"])
    for bits in itertools.product([False, True], repeat=3):
        mem = {s for s, b in zip("ABC", bits) if b}
        assert evaluate3(f, lambda s: s in mem, 1, 1.0, {}) == (sum(bits) >= 2)


def test_kleene_logic():
    unknown = lambda s: None  # noqa: E731
    assert evaluate3(Or((InSet("A"), Const(True))), unknown, 1, 1.0, {}) is True
    assert evaluate3(And((InSet("A"), Const(False))), unknown, 1, 1.0, {}) is False
    assert evaluate3(And((InSet("A"), Const(True))), unknown, 1, 1.0, {}) is None
    assert evaluate3(Not(InSet("A")), unknown, 1, 1.0, {}) is None


def test_attribute_filter_callable():
    p = Predicate(InSet("A"), attribute_filter=lambda i, w, a: w > 1)
    assert evaluate_exact(p, Key(1, 2.0), {"A"})
    assert not evaluate_exact(p, Key(1, 0.5), {"A"})


def test_pure_union():
    assert is_pure_union(parse_predicate("in(A) | in(B)"))
    assert is_pure_union(parse_predicate("in(A)"))
    assert not is_pure_union(parse_predicate("in(A) & in(B)"))
    assert not is_pure_union(parse_predicate("(in(A) | in(B)) & attr(label) < 2"))


def formulas():
    leaf = st.one_of(
        st.sampled_from(SETS).map(InSet),
        st.builds(Attr, st.just("label"), st.sampled_from(["<", "<=", ">", ">=", "==", "!="]), st.integers(0, 9)),
        st.booleans().map(Const),
    )
    return st.recursive(
        leaf,
        lambda ch: st.one_of(
            ch.map(Not),
            st.lists(ch, min_size=2, max_size=3).map(lambda c: And(tuple(c))),
            st.lists(ch, min_size=2, max_size=3).map(lambda c: Or(tuple(c))),
        ),
        max_leaves=8,
    )


@settings(deadline=None, max_examples=200)
@given(f=formulas(), bits=st.lists(st.booleans(), min_size=4, max_size=4), label=st.integers(0, 9))
def test_text_round_trip_preserves_meaning(f, bits, label):
    mem = {s for s, b in zip(SETS, bits) if b}
    back = parse_predicate(to_text(f))
    key = Key(label, 1.0, {"label": label})
    assert evaluate_exact(back, key, mem) == evaluate_exact(Predicate(f), key, mem)
