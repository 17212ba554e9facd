"""Sorted types and hyperconfigurations.

Types are built over a finite signature of sorted atoms together with two
units: I (sort 0, the unit of continuous product) and J (sort 1, the unit of
wrapping).  Every connective has a sort law and the constructors reject
operand combinations that would produce a negative sort or an out-of-range
wrap index.

A hyperconfiguration is a sequence of items: sort-0 type leaves, separators
(written ``[]``), and occurrences of types of sort >= 1, where an occurrence
of a type with sort a carries exactly a gap subconfigurations.  The flat
serialization interleaves the a+1 segments of an occurrence (written
``k:A``) with its gap material; ``flatten`` / ``parse_flat`` convert between
the two views and are mutually inverse.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Union


class SortError(ValueError):
    """An ill-sorted type, configuration or term construction."""


class ParseError(ValueError):
    """Malformed textual input."""


# ---------------------------------------------------------------------------
# signature


_ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*$")


class Signature:
    """Finite map from atom names to sorts (non-negative integers)."""

    def __init__(self, atoms: Optional[dict] = None):
        self.atoms = dict(atoms or {})
        for name, sort in self.atoms.items():
            if not _ATOM_RE.match(name):
                raise ParseError("bad atom name %r" % (name,))
            if not isinstance(sort, int) or sort < 0:
                raise ParseError("bad sort for atom %r" % (name,))

    def sort(self, name: str) -> int:
        if name not in self.atoms:
            raise ParseError("atom %r not declared in signature" % (name,))
        return self.atoms[name]

    def __contains__(self, name: str) -> bool:
        return name in self.atoms

    @classmethod
    def from_text(cls, text: str) -> "Signature":
        atoms = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("signature line %d: expected 'name<TAB>sort'" % lineno)
            name, sort = parts
            if not _ATOM_RE.match(name):
                raise ParseError("signature line %d: bad atom name %r" % (lineno, name))
            if not sort.isdigit():
                raise ParseError("signature line %d: bad sort %r" % (lineno, sort))
            if name in atoms:
                raise ParseError("signature line %d: duplicate atom %r" % (lineno, name))
            atoms[name] = int(sort)
        return cls(atoms)

    @classmethod
    def from_file(cls, path: str) -> "Signature":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_text(handle.read())


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class Atom:
    name: str
    sort: int

    def __post_init__(self):
        if self.sort < 0:
            raise SortError("atom %s with negative sort" % self.name)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class UnitI:
    def __str__(self):
        return "I"


@dataclass(frozen=True)
class UnitJ:
    def __str__(self):
        return "J"


@dataclass(frozen=True)
class Prod:
    left: "Type"
    right: "Type"

    def __post_init__(self):
        sort_of_type(self)

    def __str__(self):
        return _binop_str(self.left, ".", self.right)


@dataclass(frozen=True)
class Under:
    """left \\ right: consumes left on its left, yields right."""

    left: "Type"
    right: "Type"

    def __post_init__(self):
        sort_of_type(self)

    def __str__(self):
        return _binop_str(self.left, "\\", self.right)


@dataclass(frozen=True)
class Over:
    """left / right: yields left given right on its right."""

    left: "Type"
    right: "Type"

    def __post_init__(self):
        sort_of_type(self)

    def __str__(self):
        return _binop_str(self.left, "/", self.right)


@dataclass(frozen=True)
class DProd:
    """left @k right: wrap left around right at gap k."""

    k: int
    left: "Type"
    right: "Type"

    def __post_init__(self):
        sort_of_type(self)

    def __str__(self):
        return _binop_str(self.left, "@%d" % self.k, self.right)


@dataclass(frozen=True)
class DDown:
    """left !k right: infix that wraps at gap k of left to yield right."""

    k: int
    left: "Type"
    right: "Type"

    def __post_init__(self):
        sort_of_type(self)

    def __str__(self):
        return _binop_str(self.left, "!%d" % self.k, self.right)


@dataclass(frozen=True)
class DUp:
    """left ^k right: circumfix that yields left when wrapped around right."""

    k: int
    left: "Type"
    right: "Type"

    def __post_init__(self):
        sort_of_type(self)

    def __str__(self):
        return _binop_str(self.left, "^%d" % self.k, self.right)


Type = Union[Atom, UnitI, UnitJ, Prod, Under, Over, DProd, DDown, DUp]


@lru_cache(maxsize=None)
def sort_of_type(t: Type) -> int:
    """Sort of a type; raises SortError on ill-sorted constructions."""
    if isinstance(t, Atom):
        return t.sort
    if isinstance(t, UnitI):
        return 0
    if isinstance(t, UnitJ):
        return 1
    if isinstance(t, Prod):
        return sort_of_type(t.left) + sort_of_type(t.right)
    if isinstance(t, Under):
        s = sort_of_type(t.right) - sort_of_type(t.left)
        if s < 0:
            raise SortError("negative sort in %s\\%s" % (t.left, t.right))
        return s
    if isinstance(t, Over):
        s = sort_of_type(t.left) - sort_of_type(t.right)
        if s < 0:
            raise SortError("negative sort in %s/%s" % (t.left, t.right))
        return s
    if isinstance(t, DProd):
        a = sort_of_type(t.left)
        if a < 1:
            raise SortError("@%d on sort-0 left operand" % t.k)
        if not 1 <= t.k <= a:
            raise SortError("wrap index %d out of range 1..%d" % (t.k, a))
        return a + sort_of_type(t.right) - 1
    if isinstance(t, DDown):
        a = sort_of_type(t.left)
        if a < 1:
            raise SortError("!%d on sort-0 left operand" % t.k)
        if not 1 <= t.k <= a:
            raise SortError("wrap index %d out of range 1..%d" % (t.k, a))
        s = sort_of_type(t.right) + 1 - a
        if s < 0:
            raise SortError("negative sort in %s" % (t,))
        return s
    if isinstance(t, DUp):
        s = sort_of_type(t.left) + 1 - sort_of_type(t.right)
        if s < 1:
            raise SortError("non-positive sort in %s" % (t,))
        if not 1 <= t.k <= s:
            raise SortError("wrap index %d out of range 1..%d" % (t.k, s))
        return s
    raise TypeError("not a type: %r" % (t,))


def _binop_str(left: Type, op: str, right: Type) -> str:
    ls = str(left)
    rs = str(right)
    if not isinstance(left, (Atom, UnitI, UnitJ)):
        ls = "(" + ls + ")"
    if not isinstance(right, (Atom, UnitI, UnitJ)):
        rs = "(" + rs + ")"
    return ls + op + rs


def type_str(t: Type) -> str:
    return str(t)


# ---------------------------------------------------------------------------
# hyperconfigurations


@dataclass(frozen=True)
class Separator:
    def __str__(self):
        return "[]"


SEP = Separator()


@dataclass(frozen=True)
class Leaf0:
    type: Type

    def __post_init__(self):
        if sort_of_type(self.type) != 0:
            raise SortError("leaf item of nonzero sort: %s" % (self.type,))

    def __str__(self):
        return str(self.type)


@dataclass(frozen=True)
class Occurrence:
    type: Type
    gaps: tuple

    def __post_init__(self):
        a = sort_of_type(self.type)
        if a < 1:
            raise SortError("occurrence of sort-0 type %s" % (self.type,))
        if len(self.gaps) != a:
            raise SortError(
                "occurrence of %s needs %d gaps, got %d" % (self.type, a, len(self.gaps))
            )


Item = Union[Leaf0, Separator, Occurrence]


@dataclass(frozen=True)
class HyperConfig:
    items: tuple = ()

    def __str__(self):
        return config_str(self)


EMPTY = HyperConfig(())


@dataclass(frozen=True)
class SegTok:
    """Flat-form segment token ``idx:type`` of an occurrence."""

    type: Type
    idx: int

    def __str__(self):
        return "%d:%s" % (self.idx, self.type)


@lru_cache(maxsize=None)
def sort_of_config(cfg: HyperConfig) -> int:
    total = 0
    for item in cfg.items:
        if isinstance(item, Separator):
            total += 1
        elif isinstance(item, Occurrence):
            total += sum(sort_of_config(g) for g in item.gaps)
    return total


def figure(t: Type) -> HyperConfig:
    """The figure of a type: the canonical single-occurrence configuration."""
    a = sort_of_type(t)
    if a == 0:
        return HyperConfig((Leaf0(t),))
    return HyperConfig((Occurrence(t, tuple(HyperConfig((SEP,)) for _ in range(a))),))


def figure_items(t: Type, gaps: tuple) -> tuple:
    """Items for one occurrence of t carrying the given gap fillers."""
    if sort_of_type(t) == 0:
        if gaps:
            raise SortError("sort-0 occurrence cannot carry gaps")
        return (Leaf0(t),)
    return (Occurrence(t, tuple(gaps)),)


def is_figure_item(item: Item) -> bool:
    """True when the item alone is the figure of its type."""
    if isinstance(item, Leaf0):
        return True
    if isinstance(item, Occurrence):
        return all(g.items == (SEP,) for g in item.gaps)
    return False


def flatten(cfg: HyperConfig) -> tuple:
    """Flat token sequence: Leaf0 and Separator items plus SegTok markers."""
    out = []
    for item in cfg.items:
        if isinstance(item, Occurrence):
            out.append(SegTok(item.type, 0))
            for i, gap in enumerate(item.gaps, 1):
                out.extend(flatten(gap))
                out.append(SegTok(item.type, i))
        else:
            out.append(item)
    return tuple(out)


def parse_flat(tokens) -> HyperConfig:
    """Rebuild the tree form from a flat token sequence (inverse of flatten)."""
    items, pos = _reassemble(tuple(tokens), 0, None)
    if pos != len(tokens):
        raise ParseError("unmatched segment token at position %d" % pos)
    return HyperConfig(tuple(items))


def _reassemble(tokens, pos, stop):
    items = []
    while pos < len(tokens):
        tok = tokens[pos]
        if isinstance(tok, SegTok):
            if stop is not None and tok.type == stop[0] and tok.idx == stop[1]:
                return items, pos
            if tok.idx != 0:
                raise ParseError("segment %s out of order" % tok)
            a = sort_of_type(tok.type)
            gaps = []
            pos += 1
            for g in range(1, a + 1):
                sub, pos = _reassemble(tokens, pos, (tok.type, g))
                if pos >= len(tokens):
                    raise ParseError("missing segment %d:%s" % (g, tok.type))
                gaps.append(HyperConfig(tuple(sub)))
                pos += 1
            items.append(Occurrence(tok.type, tuple(gaps)))
        elif isinstance(tok, (Leaf0, Separator, Occurrence)):
            items.append(tok)
            pos += 1
        else:
            raise ParseError("bad flat token %r" % (tok,))
    if stop is not None:
        raise ParseError("missing segment %d:%s" % (stop[1], stop[0]))
    return items, pos


def config_str(cfg: HyperConfig) -> str:
    """Canonical flat serialization; the empty configuration prints Lambda."""
    toks = flatten(cfg)
    if not toks:
        return "Lambda"
    return ",".join(str(tok) for tok in toks)


# ---------------------------------------------------------------------------
# wrapping


def wrap_at(cfg: HyperConfig, k: int, filler: HyperConfig) -> HyperConfig:
    """Replace the k-th separator (1-based, flat order) with filler's items."""
    total = sort_of_config(cfg)
    if not 1 <= k <= total:
        raise SortError("wrap index %d out of range 1..%d" % (k, total))
    count = [0]

    def walk(items):
        out = []
        for item in items:
            if isinstance(item, Separator):
                count[0] += 1
                if count[0] == k:
                    out.extend(filler.items)
                else:
                    out.append(item)
            elif isinstance(item, Occurrence):
                out.append(
                    Occurrence(item.type, tuple(HyperConfig(tuple(walk(g.items))) for g in item.gaps))
                )
            else:
                out.append(item)
        return out

    return HyperConfig(tuple(walk(cfg.items)))


def generalized_wrap(cfg: HyperConfig, fillers) -> HyperConfig:
    """Simultaneously fill all separators of cfg, left to right."""
    fillers = tuple(fillers)
    if len(fillers) != sort_of_config(cfg):
        raise SortError(
            "generalized wrap needs %d fillers, got %d" % (sort_of_config(cfg), len(fillers))
        )
    out = cfg
    for k in range(len(fillers), 0, -1):
        out = wrap_at(out, k, fillers[k - 1])
    return out


# ---------------------------------------------------------------------------
# addressing
#
# An item address alternates item indices and gap indices, ending on an item
# index: (i0, g0, i1, g1, ..., iN).  The even-length prefix is the "level"
# address of the configuration that directly contains the item.


def iter_items(cfg: HyperConfig, prefix: tuple = ()) -> Iterator:
    """Yield (address, item) pairs in flat (left-to-right) order."""
    for i, item in enumerate(cfg.items):
        yield prefix + (i,), item
        if isinstance(item, Occurrence):
            for g, gap in enumerate(item.gaps):
                yield from iter_items(gap, prefix + (i, g))


def config_at(cfg: HyperConfig, level: tuple) -> HyperConfig:
    """The subconfiguration at an even-length level address."""
    if not level:
        return cfg
    item = cfg.items[level[0]]
    if not isinstance(item, Occurrence):
        raise IndexError("level address descends through a non-occurrence")
    return config_at(item.gaps[level[1]], level[2:])


def item_at(cfg: HyperConfig, addr: tuple) -> Item:
    return config_at(cfg, addr[:-1]).items[addr[-1]]


def replace_range(cfg: HyperConfig, level: tuple, start: int, end: int, new_items) -> HyperConfig:
    """Replace items[start:end] of the configuration at `level` by new_items."""
    if not level:
        items = cfg.items
        if not 0 <= start <= end <= len(items):
            raise IndexError("bad range %d:%d" % (start, end))
        return HyperConfig(items[:start] + tuple(new_items) + items[end:])
    i, g = level[0], level[1]
    item = cfg.items[i]
    if not isinstance(item, Occurrence):
        raise IndexError("level address descends through a non-occurrence")
    new_gap = replace_range(item.gaps[g], level[2:], start, end, new_items)
    gaps = item.gaps[:g] + (new_gap,) + item.gaps[g + 1 :]
    return HyperConfig(cfg.items[:i] + (Occurrence(item.type, gaps),) + cfg.items[i + 1 :])


def splice_item(cfg: HyperConfig, addr: tuple, new_items) -> HyperConfig:
    """Replace the single item at addr by a sequence of items."""
    return replace_range(cfg, addr[:-1], addr[-1], addr[-1] + 1, new_items)


def sub_slice(cfg: HyperConfig, level: tuple, start: int, end: int) -> HyperConfig:
    items = config_at(cfg, level).items
    if not 0 <= start <= end <= len(items):
        raise IndexError("bad range %d:%d" % (start, end))
    return HyperConfig(items[start:end])


def sep_index_at(cfg: HyperConfig, addr: tuple) -> int:
    """1-based flat index of the separator item at addr."""
    n = 0
    for a, item in iter_items(cfg):
        if isinstance(item, Separator):
            n += 1
            if a == addr:
                return n
    raise IndexError("no separator at %r" % (addr,))


# ---------------------------------------------------------------------------
# text: scanner


_TOKEN_SPEC = [
    ("WS", re.compile(r"[ \t]+")),
    ("ARROW", re.compile(r"->")),
    ("DARROW", re.compile(r"=>")),
    ("SEPTOK", re.compile(r"\[\]")),
    ("NAME", re.compile(r"[A-Za-z][A-Za-z0-9_]*")),
    ("INT", re.compile(r"[0-9]+")),
    ("KOP", re.compile(r"[@!^][0-9]+")),
    ("PLUS", re.compile(r"\+[0-9]*")),
    ("PUNCT", re.compile(r"[\\/.(),;:{}]")),
]


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        for kind, rx in _TOKEN_SPEC:
            m = rx.match(text, pos)
            if m:
                if kind != "WS":
                    tokens.append((kind, m.group(), pos))
                pos = m.end()
                break
        else:
            raise ParseError("unexpected character %r at %d" % (text[pos], pos))
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        if tok[0] != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, value: Optional[str] = None):
        tok = self.next()
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise ParseError(
                "expected %s at position %d, found %r" % (value or kind, tok[2], tok[1] or "end")
            )
        return tok

    def at_end(self):
        return self.peek()[0] == "EOF"

    def error(self, msg: str):
        tok = self.peek()
        raise ParseError("%s at position %d (near %r)" % (msg, tok[2], tok[1] or "end"))


# ---------------------------------------------------------------------------
# text: types


def _parse_type_operand(sc: _Scanner, sig: Signature) -> Type:
    kind, value, _ = sc.peek()
    if kind == "PUNCT" and value == "(":
        sc.next()
        t = _parse_type_expr(sc, sig)
        sc.expect("PUNCT", ")")
        return t
    if kind == "NAME":
        sc.next()
        if value == "I":
            return UnitI()
        if value == "J":
            return UnitJ()
        if not _ATOM_RE.match(value):
            raise ParseError("bad atom name %r" % (value,))
        return Atom(value, sig.sort(value))
    sc.error("expected a type")


def _peek_binop(sc: _Scanner):
    kind, value, _ = sc.peek()
    if kind == "PUNCT" and value in ("\\", "/", "."):
        return value
    if kind == "KOP":
        return value
    return None


def _parse_type_expr(sc: _Scanner, sig: Signature) -> Type:
    left = _parse_type_operand(sc, sig)
    op = _peek_binop(sc)
    if op is None:
        return left
    sc.next()
    right = _parse_type_operand(sc, sig)
    if _peek_binop(sc) is not None:
        sc.error("operator chains must be parenthesized")
    try:
        if op == "\\":
            return Under(left, right)
        if op == "/":
            return Over(left, right)
        if op == ".":
            return Prod(left, right)
        k = int(op[1:])
        if op[0] == "@":
            return DProd(k, left, right)
        if op[0] == "!":
            return DDown(k, left, right)
        return DUp(k, left, right)
    except SortError as exc:
        raise ParseError(str(exc)) from exc


def parse_type(text: str, sig: Signature) -> Type:
    sc = _Scanner(text)
    t = _parse_type_expr(sc, sig)
    if not sc.at_end():
        sc.error("trailing input after type")
    return t


# ---------------------------------------------------------------------------
# text: configurations


def _parse_config_entry(sc: _Scanner, sig: Signature):
    kind, value, _ = sc.peek()
    if kind == "SEPTOK":
        sc.next()
        return SEP
    if kind == "INT":
        sc.next()
        sc.expect("PUNCT", ":")
        t = _parse_type_expr(sc, sig)
        return SegTok(t, int(value))
    if kind == "PUNCT" and value == "{":
        sc.next()
        t = _parse_type_expr(sc, sig)
        a = sort_of_type(t)
        if a < 1:
            sc.error("braced occurrence needs a type of sort >= 1")
        sc.expect("PUNCT", ":")
        gaps = [_parse_config_body(sc, sig, stops=(";", "}"))]
        while sc.peek()[:2] == ("PUNCT", ";"):
            sc.next()
            gaps.append(_parse_config_body(sc, sig, stops=(";", "}")))
        sc.expect("PUNCT", "}")
        if len(gaps) != a:
            raise ParseError("occurrence of %s needs %d gaps, got %d" % (t, a, len(gaps)))
        return Occurrence(t, tuple(gaps))
    t = _parse_type_expr(sc, sig)
    if sort_of_type(t) != 0:
        raise ParseError(
            "bare item %s has sort %d; use segments or { } form" % (t, sort_of_type(t))
        )
    return Leaf0(t)


def _parse_config_body(sc: _Scanner, sig: Signature, stops=()) -> HyperConfig:
    kind, value, _ = sc.peek()
    if kind == "EOF" or (kind == "PUNCT" and value in stops):
        return EMPTY
    if kind == "NAME" and value == "Lambda":
        sc.next()
        return EMPTY
    raw = [_parse_config_entry(sc, sig)]
    while sc.peek()[:2] == ("PUNCT", ","):
        sc.next()
        raw.append(_parse_config_entry(sc, sig))
    items, pos = _reassemble(tuple(raw), 0, None)
    if pos != len(raw):
        raise ParseError("unmatched segment token in configuration")
    return HyperConfig(tuple(items))


def parse_config(text: str, sig: Signature) -> HyperConfig:
    sc = _Scanner(text)
    cfg = _parse_config_body(sc, sig)
    if not sc.at_end():
        sc.error("trailing input after configuration")
    return cfg
