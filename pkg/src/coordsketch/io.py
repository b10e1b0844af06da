"""Line-oriented text formats for collections, sketches, combinations and Poisson samples.

All formats are UTF-8, whitespace separated, with ``#`` starting a comment.
Ranks and thresholds are written as hexadecimal floats so that a round trip
is bit-exact; weights use the shortest ``repr`` that round-trips.

Collection::

    key <id> <weight> [name=value ...]
    set <set_id> <id> <id> ...

Sketch file (a ``family`` line, then one block per set)::

    family WS
    sketch <set_id> <k> <threshold>
    entry <id> <rank> <weight> [name=value ...]

Poisson samples use ``poisson <set_id> <tau>`` block headers instead.
"""

from __future__ import annotations

import io as _io
import os
from typing import Any, Iterable, Mapping, TextIO

from .combine import Combination, Kind, Membership
from .core import BottomKSketch, Key, RankFamily, SketchEntry, WeightedSetCollection
from .poisson import PoissonSample


class FormatError(ValueError):
    """Malformed input file."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = f"{source or '<input>'}:{line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


def _open_read(src) -> tuple[TextIO, str, bool]:
    if isinstance(src, (str, os.PathLike)):
        return open(src, encoding="utf-8"), str(src), True
    return src, getattr(src, "name", "<stream>"), False


def _lines(src):
    fh, name, close = _open_read(src)
    try:
        for n, raw in enumerate(fh, 1):
            text = raw.split("#", 1)[0].strip()
            if text:
                yield n, name, text.split()
    finally:
        if close:
            fh.close()


def _parse_value(text: str) -> Any:
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _parse_attrs(tokens, n, name) -> dict[str, Any]:
    attrs = {}
    for tok in tokens:
        if "=" not in tok:
            raise FormatError(f"expected name=value, got {tok!r}", n, name)
        k, v = tok.split("=", 1)
        if not k:
            raise FormatError(f"empty attribute name in {tok!r}", n, name)
        attrs[k] = _parse_value(v)
    return attrs


def _format_attrs(attrs: Mapping[str, Any]) -> str:
    parts = []
    for k in sorted(attrs):
        v = attrs[k]
        text = repr(v) if isinstance(v, float) else str(v)
        if any(c.isspace() for c in str(k) + text) or "#" in text or "=" in str(k):
            raise ValueError(f"attribute {k}={v!r} cannot be written in the text format")
        parts.append(f"{k}={text}")
    return (" " + " ".join(parts)) if parts else ""


def _int(tok, n, name, what="integer") -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"bad {what} {tok!r}", n, name) from None


def _float(tok, n, name, what="number") -> float:
    try:
        return float(tok)
    except ValueError:
        raise FormatError(f"bad {what} {tok!r}", n, name) from None


def _hex(tok, n, name, what="rank") -> float:
    try:
        return float.fromhex(tok)
    except ValueError:
        try:
            return float(tok)
        except ValueError:
            raise FormatError(f"bad {what} {tok!r}", n, name) from None


def _emit(dst, text: str):
    if isinstance(dst, (str, os.PathLike)):
        with open(dst, "w", encoding="utf-8") as fh:
            fh.write(text)
        return None
    if dst is None:
        return text
    dst.write(text)
    return None


# -- collections -------------------------------------------------------------


def read_collection(src) -> WeightedSetCollection:
    keys: list[Key] = []
    sets: dict[str, list[int]] = {}
    for n, name, tok in _lines(src):
        try:
            if tok[0] == "key":
                if len(tok) < 3:
                    raise FormatError("key line needs an id and a weight", n, name)
                keys.append(Key(_int(tok[1], n, name, "key id"), _float(tok[2], n, name, "weight"), _parse_attrs(tok[3:], n, name)))
            elif tok[0] == "set":
                if len(tok) < 2:
                    raise FormatError("set line needs a set id", n, name)
                if tok[1] in sets:
                    raise FormatError(f"duplicate set {tok[1]!r}", n, name)
                sets[tok[1]] = [_int(t, n, name, "key id") for t in tok[2:]]
            else:
                raise FormatError(f"unknown record {tok[0]!r}", n, name)
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError(str(exc), n, name) from None
    try:
        return WeightedSetCollection(keys, sets)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def write_collection(collection: WeightedSetCollection, dst=None):
    out = _io.StringIO()
    for i in sorted(collection.ground):
        key = collection.ground[i]
        out.write(f"key {key.id} {key.weight!r}{_format_attrs(key.attrs)}\n")
    for s, members in collection.sets.items():
        out.write(" ".join(["set", s] + [str(i) for i in sorted(members)]) + "\n")
    return _emit(dst, out.getvalue())


# -- sketches ----------------------------------------------------------------


def _entry_line(e: SketchEntry) -> str:
    return f"entry {e.key_id} {float(e.rank).hex()} {float(e.weight)!r}{_format_attrs(e.attrs)}\n"


def _parse_entry(tok, n, name) -> SketchEntry:
    if len(tok) < 4:
        raise FormatError("entry line needs id, rank and weight", n, name)
    weight = _float(tok[3], n, name, "weight")
    if not weight > 0:
        raise FormatError(f"nonpositive weight {weight}", n, name)
    return SketchEntry(_int(tok[1], n, name, "key id"), _hex(tok[2], n, name), weight, _parse_attrs(tok[4:], n, name))


def write_sketches(sketches: Mapping[str, BottomKSketch] | Iterable[BottomKSketch], dst=None):
    items = list(sketches.values()) if isinstance(sketches, Mapping) else list(sketches)
    if not items:
        raise ValueError("no sketches to write")
    families = {sk.family for sk in items}
    if len(families) != 1:
        raise ValueError("sketches in one file must share a rank family")
    out = _io.StringIO()
    out.write(f"family {items[0].family.value}\n")
    for sk in items:
        out.write(f"sketch {sk.set_id} {sk.k} {float(sk.threshold).hex()}\n")
        for e in sk.entries:
            out.write(_entry_line(e))
    return _emit(dst, out.getvalue())


def read_sketches(src) -> dict[str, BottomKSketch]:
    family = None
    blocks: list[list] = []
    for n, name, tok in _lines(src):
        head = tok[0]
        if head == "family":
            if len(tok) != 2:
                raise FormatError("family line takes one value", n, name)
            try:
                family = RankFamily.parse(tok[1])
            except ValueError as exc:
                raise FormatError(str(exc), n, name) from None
        elif head == "sketch":
            if len(tok) != 4:
                raise FormatError("sketch line needs set id, k and threshold", n, name)
            blocks.append([tok[1], _int(tok[2], n, name, "k"), _hex(tok[3], n, name, "threshold"), [], n, name])
        elif head == "entry":
            if not blocks:
                raise FormatError("entry before any sketch header", n, name)
            blocks[-1][3].append(_parse_entry(tok, n, name))
        else:
            raise FormatError(f"unknown record {head!r}", n, name)
    if family is None:
        raise FormatError("missing family line")
    out: dict[str, BottomKSketch] = {}
    for set_id, k, thr, entries, n, name in blocks:
        if set_id in out:
            raise FormatError(f"duplicate sketch {set_id!r}", n, name)
        entries.sort(key=lambda e: (e.rank, e.key_id))
        try:
            out[set_id] = BottomKSketch(set_id, k, family, tuple(entries), thr)
        except ValueError as exc:
            raise FormatError(str(exc), n, name) from None
    return out


# -- combinations ------------------------------------------------------------


def write_combination(comb: Combination, dst=None):
    out = _io.StringIO()
    out.write(f"family {comb.family.value}\n")
    out.write(f"combination {comb.kind.value} {comb.k} {float(comb.threshold).hex()} {' '.join(comb.source_set_ids)}\n")
    for s in comb.source_set_ids:
        out.write(f"threshold {s} {float(comb.set_thresholds[s]).hex()}\n")
    for e in comb.entries:
        out.write(_entry_line(e))
        if comb.kind is Kind.LCS:
            out.write(f"tau {e.key_id} {float(comb.per_key_tau[e.key_id]).hex()}\n")
        for s in comb.source_set_ids:
            out.write(f"member {e.key_id} {s} {comb.membership[(e.key_id, s)].value}\n")
    return _emit(dst, out.getvalue())


def read_combination(src) -> Combination:
    family = None
    header = None
    thresholds: dict[str, float] = {}
    entries: list[SketchEntry] = []
    taus: dict[int, float] = {}
    membership: dict[tuple[int, str], Membership] = {}
    for n, name, tok in _lines(src):
        head = tok[0]
        try:
            if head == "family":
                family = RankFamily.parse(tok[1])
            elif head == "combination":
                header = (Kind.parse(tok[1]), _int(tok[2], n, name, "k"), _hex(tok[3], n, name, "threshold"), tuple(tok[4:]))
            elif head == "threshold":
                thresholds[tok[1]] = _hex(tok[2], n, name, "threshold")
            elif head == "entry":
                entries.append(_parse_entry(tok, n, name))
            elif head == "tau":
                taus[_int(tok[1], n, name, "key id")] = _hex(tok[2], n, name, "tau")
            elif head == "member":
                membership[(_int(tok[1], n, name, "key id"), tok[2])] = Membership(tok[3])
            else:
                raise FormatError(f"unknown record {head!r}", n, name)
        except IndexError:
            raise FormatError(f"truncated {head} line", n, name) from None
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError(str(exc), n, name) from None
    if family is None or header is None:
        raise FormatError("missing family or combination line")
    kind, k, threshold, sources = header
    return Combination(
        kind=kind,
        k=k,
        family=family,
        source_set_ids=sources,
        entries=tuple(entries),
        threshold=threshold,
        set_thresholds=thresholds,
        membership=membership,
        per_key_tau=taus,
    )


# -- Poisson samples ---------------------------------------------------------


def write_poisson(samples: Mapping[str, PoissonSample] | Iterable[PoissonSample], dst=None):
    items = list(samples.values()) if isinstance(samples, Mapping) else list(samples)
    if not items:
        raise ValueError("no samples to write")
    if len({sm.family for sm in items}) != 1:
        raise ValueError("samples in one file must share a rank family")
    out = _io.StringIO()
    out.write(f"family {items[0].family.value}\n")
    for sm in items:
        out.write(f"poisson {sm.set_id} {float(sm.tau).hex()}\n")
        for e in sm.entries:
            out.write(_entry_line(e))
    return _emit(dst, out.getvalue())


def read_poisson(src) -> dict[str, PoissonSample]:
    family = None
    blocks: list[list] = []
    for n, name, tok in _lines(src):
        head = tok[0]
        if head == "family":
            try:
                family = RankFamily.parse(tok[1])
            except (ValueError, IndexError) as exc:
                raise FormatError(str(exc), n, name) from None
        elif head == "poisson":
            if len(tok) != 3:
                raise FormatError("poisson line needs set id and tau", n, name)
            blocks.append([tok[1], _hex(tok[2], n, name, "tau"), []])
        elif head == "entry":
            if not blocks:
                raise FormatError("entry before any poisson header", n, name)
            blocks[-1][2].append(_parse_entry(tok, n, name))
        else:
            raise FormatError(f"unknown record {head!r}", n, name)
    if family is None:
        raise FormatError("missing family line")
    out = {}
    for set_id, tau, entries in blocks:
        entries.sort(key=lambda e: (e.rank, e.key_id))
        out[set_id] = PoissonSample(set_id, family, tau, tuple(entries))
    return out
