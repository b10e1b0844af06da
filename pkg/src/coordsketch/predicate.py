"""Selection predicates over key attributes and set memberships.

Text syntax::

    in(A) & in(B) | !in(C)
    (in(A) | in(B)) & attr(label) < 8
    atleast(2, A1, A2, A3)

Precedence is ``!`` > ``&`` > ``|``; parentheses group. ``attr(name)``
compares a key attribute (``id`` and ``weight`` resolve to the key's own
fields when not present as attributes) against a number or a bare/quoted
string using one of ``< <= > >= == !=``. ``atleast(n, S1, ..., Sm)`` expands
to the OR of all n-wise ANDs.
"""

from __future__ import annotations

import itertools
import operator
import re
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Mapping, Optional, Union

from .combine import Kind, Membership


class PredicateError(ValueError):
    """Malformed predicate text or a predicate with no relevant sets."""


@dataclass(frozen=True)
class InSet:
    set_id: str


@dataclass(frozen=True)
class Attr:
    name: str
    op: str
    value: Any


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    child: "Node"


@dataclass(frozen=True)
class And:
    children: tuple["Node", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Node", ...]


Node = Union[InSet, Attr, Const, Not, And, Or]

AttributeFilter = Callable[[int, float, Mapping[str, Any]], bool]

_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}


def in_set(set_id: str) -> InSet:
    return InSet(str(set_id))


def any_of(*set_ids: str) -> Node:
    return Or(tuple(InSet(str(s)) for s in set_ids)) if len(set_ids) > 1 else InSet(str(set_ids[0]))


def all_of(*set_ids: str) -> Node:
    return And(tuple(InSet(str(s)) for s in set_ids)) if len(set_ids) > 1 else InSet(str(set_ids[0]))


def at_least(n: int, set_ids) -> Node:
    """Key is a member of at least ``n`` of ``set_ids`` (OR of n-wise ANDs)."""
    set_ids = [str(s) for s in set_ids]
    if not 1 <= n <= len(set_ids):
        raise PredicateError(f"atleast needs 1 <= n <= {len(set_ids)}, got {n}")
    terms = tuple(all_of(*combo) for combo in itertools.combinations(set_ids, n))
    return terms[0] if len(terms) == 1 else Or(terms)


@dataclass(frozen=True)
class Predicate:
    """A boolean formula plus an optional opaque attribute filter.

    The filter, when given, is ANDed with the formula and receives
    ``(key_id, weight, attrs)``.
    """

    formula: Node
    attribute_filter: Optional[AttributeFilter] = None
    text: str = ""

    def __str__(self):
        return self.text or to_text(self.formula)


def atoms(node: Node) -> Iterator[str]:
    if isinstance(node, InSet):
        yield node.set_id
    elif isinstance(node, Not):
        yield from atoms(node.child)
    elif isinstance(node, (And, Or)):
        for c in node.children:
            yield from atoms(c)


def relevant_sets(pred: Predicate) -> list[str]:
    """Set ids appearing in the formula, in order of first appearance."""
    return list(dict.fromkeys(atoms(pred.formula)))


def _flatten(node: Node, cls) -> list[Node]:
    if isinstance(node, cls):
        out: list[Node] = []
        for c in node.children:
            out.extend(_flatten(c, cls))
        return out
    return [node]


def _has_membership(node: Node) -> bool:
    return next(atoms(node), None) is not None


def analyze_predicate(pred: Predicate) -> tuple[list[str], Kind]:
    """Relevant sets and the most inclusive applicable combination.

    The LCS is chosen only when the membership part of the formula is syntactically
    a disjunction of positive ``in(...)`` atoms over all relevant sets, ANDed with
    attribute-only conditions.
    """
    sets = relevant_sets(pred)
    if not sets:
        raise PredicateError("predicate mentions no sets")
    conjuncts = _flatten(pred.formula, And)
    membership_parts = [c for c in conjuncts if _has_membership(c)]
    if len(membership_parts) == 1:
        disjuncts = _flatten(membership_parts[0], Or)
        if all(isinstance(d, InSet) for d in disjuncts) and set(d.set_id for d in disjuncts) == set(sets):
            return sets, Kind.LCS
    return sets, Kind.SCS


def is_pure_union(pred: Predicate) -> bool:
    """True when the predicate is exactly the union of its relevant sets."""
    if pred.attribute_filter is not None:
        return False
    disjuncts = _flatten(pred.formula, Or)
    return all(isinstance(d, InSet) for d in disjuncts)


def _attr_value(name: str, key_id: int, weight: float, attrs: Mapping[str, Any]):
    if name in attrs:
        return attrs[name]
    if name == "id":
        return key_id
    if name == "weight":
        return weight
    return None


def _compare(node: Attr, key_id, weight, attrs) -> bool:
    value = _attr_value(node.name, key_id, weight, attrs)
    if value is None:
        return False
    try:
        return bool(_OPS[node.op](value, node.value))
    except TypeError:
        return bool(_OPS[node.op](str(value), str(node.value)))


def evaluate3(node: Node, member: Callable[[str], Optional[bool]], key_id: int, weight: float, attrs) -> Optional[bool]:
    """Kleene three-valued evaluation; ``member`` returns None for unknown membership."""
    if isinstance(node, InSet):
        return member(node.set_id)
    if isinstance(node, Attr):
        return _compare(node, key_id, weight, attrs)
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Not):
        v = evaluate3(node.child, member, key_id, weight, attrs)
        return None if v is None else not v
    if isinstance(node, And):
        unknown = False
        for c in node.children:
            v = evaluate3(c, member, key_id, weight, attrs)
            if v is False:
                return False
            unknown |= v is None
        return None if unknown else True
    if isinstance(node, Or):
        unknown = False
        for c in node.children:
            v = evaluate3(c, member, key_id, weight, attrs)
            if v is True:
                return True
            unknown |= v is None
        return None if unknown else False
    raise TypeError(f"not a predicate node: {node!r}")


_MEMBERSHIP_TRUTH = {Membership.IN: True, Membership.OUT: False, Membership.UNKNOWN: None}


def evaluate_on_entry(pred: Predicate, combination, entry) -> Optional[bool]:
    """Evaluate ``pred`` on a combination entry using the combination's membership knowledge."""

    def member(set_id):
        return _MEMBERSHIP_TRUTH[combination.membership[(entry.key_id, set_id)]]

    v = evaluate3(pred.formula, member, entry.key_id, entry.weight, entry.attrs)
    if v is not False and pred.attribute_filter is not None:
        if not pred.attribute_filter(entry.key_id, entry.weight, entry.attrs):
            return False
    return v


def evaluate_exact(pred: Predicate, key, memberships: frozenset | set) -> bool:
    """Evaluate ``pred`` on a ground-set key given the full set of sets it belongs to."""
    v = evaluate3(pred.formula, lambda s: s in memberships, key.id, key.weight, key.attrs)
    if v and pred.attribute_filter is not None:
        v = bool(pred.attribute_filter(key.id, key.weight, key.attrs))
    return bool(v)


# -- text syntax -------------------------------------------------------------

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<op><=|>=|==|!=|<|>)
      | (?P<punct>[()!&|,])
      | (?P<str>"[^"]*"|'[^']*')
      | (?P<num>[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?(?![\w.]))
      | (?P<name>[A-Za-z_][\w.\-:]*)
    )""",
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PredicateError(f"cannot parse predicate at {text[pos:pos + 20]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, value=None, kind=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value or kind
            raise PredicateError(f"expected {want!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> Node:
        node = self.disjunction()
        if self.peek()[0] is not None:
            raise PredicateError(f"unexpected token {self.peek()[1]!r}")
        return node

    def disjunction(self) -> Node:
        parts = [self.conjunction()]
        while self.peek()[1] == "|":
            self.take("|")
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Node:
        parts = [self.unary()]
        while self.peek()[1] == "&":
            self.take("&")
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Node:
        if self.peek()[1] == "!":
            self.take("!")
            return Not(self.unary())
        return self.atom()

    def _name(self) -> str:
        kind, value = self.peek()
        if kind in ("name", "num"):
            self.i += 1
            return value
        if kind == "str":
            self.i += 1
            return value[1:-1]
        raise PredicateError(f"expected a name, found {value!r}")

    def atom(self) -> Node:
        kind, value = self.peek()
        if value == "(":
            self.take("(")
            node = self.disjunction()
            self.take(")")
            return node
        if kind != "name":
            raise PredicateError(f"unexpected token {value!r}")
        word = value.lower()
        self.i += 1
        if word in ("true", "false"):
            return Const(word == "true")
        if word == "in":
            self.take("(")
            set_id = self._name()
            self.take(")")
            return InSet(set_id)
        if word == "attr":
            self.take("(")
            name = self._name()
            self.take(")")
            op = self.take(kind="op")[1]
            return Attr(name, op, self._literal())
        if word == "atleast":
            self.take("(")
            n = int(self.take(kind="num")[1])
            sets = []
            while self.peek()[1] == ",":
                self.take(",")
                sets.append(self._name())
            self.take(")")
            return at_least(n, sets)
        raise PredicateError(f"unknown predicate function {value!r}")

    def _literal(self):
        kind, value = self.peek()
        self.i += 1
        if kind == "num":
            f = float(value)
            return int(f) if f.is_integer() and re.fullmatch(r"[-+]?\d+", value) else f
        if kind == "str":
            return value[1:-1]
        if kind == "name":
            return value
        raise PredicateError(f"expected a literal, found {value!r}")


def parse_predicate(text: str) -> Predicate:
    """Parse predicate text into a :class:`Predicate`."""
    if not text or not text.strip():
        raise PredicateError("empty predicate")
    return Predicate(_Parser(text).parse(), text=text.strip())


def to_text(node: Node) -> str:
    if isinstance(node, InSet):
        return f"in({node.set_id})"
    if isinstance(node, Attr):
        v = f'"{node.value}"' if isinstance(node.value, str) else repr(node.value)
        return f"attr({node.name}) {node.op} {v}"
    if isinstance(node, Const):
        return "true" if node.value else "false"
    if isinstance(node, Not):
        return f"!{_wrap(node.child)}"
    if isinstance(node, And):
        return " & ".join(_wrap(c, Or) for c in node.children)
    if isinstance(node, Or):
        return " | ".join(to_text(c) for c in node.children)
    raise TypeError(node)


def _wrap(node: Node, *override) -> str:
    loose = override or (And, Or)
    text = to_text(node)
    return f"({text})" if isinstance(node, loose) else text


def as_predicate(pred: "Predicate | Node | str") -> Predicate:
    if isinstance(pred, Predicate):
        return pred
    if isinstance(pred, str):
        return parse_predicate(pred)
    return Predicate(pred)
