"""Structural terms and the sorted rewrite system over them.

A structural term is built from type leaves, the constants II (empty string)
and JJ (single separator), continuous concatenation ``(s + t)`` and wrapping
``(s +k t)`` which plugs t into the k-th separator position of s.  The
``sharp`` map sends every term to the hyperconfiguration it denotes; the
twenty rewrite rules (unit laws, associativities, split-wrap and mixed
permutation) all preserve sharp, and two terms are equivalent exactly when
their sharp images coincide.

``normalize`` produces an explicit step-by-step trace from a term to the
canonical term of its sharp image (the cons-list built by term_of_config),
and ``extract`` pulls a designated leaf occurrence out of a term as a final
wrap, again with a full trace.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Tuple

from .syntax import (
    EMPTY,
    Atom,
    HyperConfig,
    Leaf0,
    Occurrence,
    ParseError,
    SEP,
    Separator,
    SortError,
    Signature,
    Type,
    _parse_type_expr,
    _Scanner,
    figure,
    flatten,
    iter_items,
    sort_of_config,
    sort_of_type,
    wrap_at,
)


class RuleError(ValueError):
    """A rewrite rule applied to a subterm of the wrong shape."""


class BudgetError(RuntimeError):
    """A rewrite trace exceeded the step budget."""


class ExtractionError(ValueError):
    """Extraction attempted at a position that is not visible."""


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class ConstI:
    def __str__(self):
        return "II"


@dataclass(frozen=True)
class ConstJ:
    def __str__(self):
        return "JJ"


@dataclass(frozen=True)
class Leaf:
    type: Type

    def __str__(self):
        return str(self.type)


@dataclass(frozen=True)
class Cat:
    left: "StructTerm"
    right: "StructTerm"

    def __str__(self):
        return "(%s + %s)" % (self.left, self.right)


@dataclass(frozen=True)
class WrapT:
    i: int
    left: "StructTerm"
    right: "StructTerm"

    def __post_init__(self):
        s = sort_of_term(self.left)
        if s < 1:
            raise SortError("wrap on a sort-0 term %s" % (self.left,))
        if not 1 <= self.i <= s:
            raise SortError("wrap index %d out of range 1..%d" % (self.i, s))

    def __str__(self):
        return "(%s +%d %s)" % (self.left, self.i, self.right)


StructTerm = object  # union of the five node classes above


@lru_cache(maxsize=None)
def sort_of_term(t) -> int:
    if isinstance(t, ConstI):
        return 0
    if isinstance(t, ConstJ):
        return 1
    if isinstance(t, Leaf):
        return sort_of_type(t.type)
    if isinstance(t, Cat):
        return sort_of_term(t.left) + sort_of_term(t.right)
    if isinstance(t, WrapT):
        return sort_of_term(t.left) + sort_of_term(t.right) - 1
    raise TypeError("not a structural term: %r" % (t,))


@lru_cache(maxsize=None)
def term_size(t) -> int:
    if isinstance(t, (Cat, WrapT)):
        return 1 + term_size(t.left) + term_size(t.right)
    return 1


def term_str(t) -> str:
    return str(t)


def parse_term(text: str, sig: Signature):
    sc = _Scanner(text)
    t = _parse_term(sc, sig)
    if not sc.at_end():
        sc.error("trailing input after term")
    return t


def _parse_term(sc: _Scanner, sig: Signature):
    kind, value, _ = sc.peek()
    if kind == "NAME" and value == "II":
        sc.next()
        return ConstI()
    if kind == "NAME" and value == "JJ":
        sc.next()
        return ConstJ()
    if kind == "PUNCT" and value == "(":
        save = sc.pos
        sc.next()
        try:
            left = _parse_term(sc, sig)
            tok = sc.next()
            if tok[0] != "PLUS":
                raise ParseError("expected + at position %d" % tok[2])
            right = _parse_term(sc, sig)
            sc.expect("PUNCT", ")")
        except ParseError:
            sc.pos = save
        else:
            if len(tok[1]) > 1:
                return WrapT(int(tok[1][1:]), left, right)
            return Cat(left, right)
    t = _parse_type_expr(sc, sig)
    return Leaf(t)


# ---------------------------------------------------------------------------
# paths


def subterm_at(t, path: tuple):
    for d in path:
        if not isinstance(t, (Cat, WrapT)):
            raise IndexError("path descends below a leaf")
        t = t.left if d == 0 else t.right
    return t


def replace_at(t, path: tuple, new):
    if not path:
        return new
    if not isinstance(t, (Cat, WrapT)):
        raise IndexError("path descends below a leaf")
    d, rest = path[0], path[1:]
    left = replace_at(t.left, rest, new) if d == 0 else t.left
    right = replace_at(t.right, rest, new) if d == 1 else t.right
    if isinstance(t, Cat):
        return Cat(left, right)
    return WrapT(t.i, left, right)


def iter_subterms(t, prefix: tuple = ()) -> Iterator:
    yield prefix, t
    if isinstance(t, (Cat, WrapT)):
        yield from iter_subterms(t.left, prefix + (0,))
        yield from iter_subterms(t.right, prefix + (1,))


# ---------------------------------------------------------------------------
# the rewrite rules


RULE_NAMES = (
    "UnitI-L-add",
    "UnitI-L-drop",
    "UnitI-R-add",
    "UnitI-R-drop",
    "UnitJ-L-add",
    "UnitJ-L-drop",
    "UnitJ-i-add",
    "UnitJ-i-drop",
    "AsscC-fwd",
    "AsscC-bwd",
    "SW-left-fwd",
    "SW-left-bwd",
    "SW-right-fwd",
    "SW-right-bwd",
    "AsscD1",
    "AsscD2",
    "MixPerm1-fwd",
    "MixPerm1-bwd",
    "MixPerm2-fwd",
    "MixPerm2-bwd",
)

INVERSE_RULE = {
    "UnitI-L-add": "UnitI-L-drop",
    "UnitI-L-drop": "UnitI-L-add",
    "UnitI-R-add": "UnitI-R-drop",
    "UnitI-R-drop": "UnitI-R-add",
    "UnitJ-L-add": "UnitJ-L-drop",
    "UnitJ-L-drop": "UnitJ-L-add",
    "UnitJ-i-add": "UnitJ-i-drop",
    "UnitJ-i-drop": "UnitJ-i-add",
    "AsscC-fwd": "AsscC-bwd",
    "AsscC-bwd": "AsscC-fwd",
    "SW-left-fwd": "SW-left-bwd",
    "SW-left-bwd": "SW-left-fwd",
    "SW-right-fwd": "SW-right-bwd",
    "SW-right-bwd": "SW-right-fwd",
    "AsscD1": "AsscD2",
    "AsscD2": "AsscD1",
    "MixPerm1-fwd": "MixPerm1-bwd",
    "MixPerm1-bwd": "MixPerm1-fwd",
    "MixPerm2-fwd": "MixPerm2-bwd",
    "MixPerm2-bwd": "MixPerm2-fwd",
}


@dataclass(frozen=True)
class RuleApp:
    """One rewrite step: a rule name, a subterm path, and its indices."""

    rule: str
    at: tuple = ()
    params: tuple = ()

    def params_dict(self) -> dict:
        return dict(self.params)

    def __str__(self):
        ps = ",".join("%s=%d" % kv for kv in self.params)
        loc = "".join("LR"[d] for d in self.at) or "root"
        return "%s@%s%s" % (self.rule, loc, " [%s]" % ps if ps else "")


def rule_app(rule: str, at: tuple = (), **params) -> RuleApp:
    return RuleApp(rule, tuple(at), tuple(sorted(params.items())))


def classify(i: int, sort2: int, j: int) -> str:
    """Position of the outer wrap j relative to the inner wrap (i, sort2).

    For a redex (t1 +i t2) +j t3: P1 when t3 goes strictly right of t2,
    P2 when strictly left, O when j falls among t2's own separator positions.
    """
    if i + sort2 - 1 < j:
        return "P1"
    if j < i:
        return "P2"
    return "O"


def _shape2(s, rule):
    if not (isinstance(s, WrapT) and isinstance(s.left, WrapT)):
        raise RuleError("%s needs a ((_ +i _) +j _) shape" % rule)
    return s.left.left, s.left.i, s.left.right, s.i, s.right


def _apply(s, rule: str, params: dict):
    """Apply one rule at the root of s; returns (result, filled params)."""
    if rule == "UnitI-L-add":
        return Cat(ConstI(), s), {}
    if rule == "UnitI-L-drop":
        if not (isinstance(s, Cat) and isinstance(s.left, ConstI)):
            raise RuleError("UnitI-L-drop needs (II + _)")
        return s.right, {}
    if rule == "UnitI-R-add":
        return Cat(s, ConstI()), {}
    if rule == "UnitI-R-drop":
        if not (isinstance(s, Cat) and isinstance(s.right, ConstI)):
            raise RuleError("UnitI-R-drop needs (_ + II)")
        return s.left, {}
    if rule == "UnitJ-L-add":
        return WrapT(1, ConstJ(), s), {}
    if rule == "UnitJ-L-drop":
        if not (isinstance(s, WrapT) and s.i == 1 and isinstance(s.left, ConstJ)):
            raise RuleError("UnitJ-L-drop needs (JJ +1 _)")
        return s.right, {}
    if rule == "UnitJ-i-add":
        i = params.get("i")
        if i is None:
            raise RuleError("UnitJ-i-add needs the index i")
        if not 1 <= i <= sort_of_term(s):
            raise RuleError("UnitJ-i-add index %d out of range" % i)
        return WrapT(i, s, ConstJ()), {"i": i}
    if rule == "UnitJ-i-drop":
        if not (isinstance(s, WrapT) and isinstance(s.right, ConstJ)):
            raise RuleError("UnitJ-i-drop needs (_ +i JJ)")
        return s.left, {"i": s.i}
    if rule == "AsscC-fwd":
        if not (isinstance(s, Cat) and isinstance(s.left, Cat)):
            raise RuleError("AsscC-fwd needs ((_ + _) + _)")
        return Cat(s.left.left, Cat(s.left.right, s.right)), {}
    if rule == "AsscC-bwd":
        if not (isinstance(s, Cat) and isinstance(s.right, Cat)):
            raise RuleError("AsscC-bwd needs (_ + (_ + _))")
        return Cat(Cat(s.left, s.right.left), s.right.right), {}
    if rule == "SW-left-fwd":
        if not isinstance(s, Cat):
            raise RuleError("SW-left-fwd needs (_ + _)")
        return WrapT(1, Cat(ConstJ(), s.right), s.left), {}
    if rule == "SW-left-bwd":
        ok = (
            isinstance(s, WrapT)
            and s.i == 1
            and isinstance(s.left, Cat)
            and isinstance(s.left.left, ConstJ)
        )
        if not ok:
            raise RuleError("SW-left-bwd needs ((JJ + _) +1 _)")
        return Cat(s.right, s.left.right), {}
    if rule == "SW-right-fwd":
        if not isinstance(s, Cat):
            raise RuleError("SW-right-fwd needs (_ + _)")
        i = sort_of_term(s.left) + 1
        return WrapT(i, Cat(s.left, ConstJ()), s.right), {"i": i}
    if rule == "SW-right-bwd":
        ok = (
            isinstance(s, WrapT)
            and isinstance(s.left, Cat)
            and isinstance(s.left.right, ConstJ)
            and s.i == sort_of_term(s.left.left) + 1
        )
        if not ok:
            raise RuleError("SW-right-bwd needs ((_ + JJ) +i _) with i past the left sort")
        return Cat(s.left.left, s.right), {"i": s.i}
    if rule == "AsscD1":
        if not (isinstance(s, WrapT) and isinstance(s.right, WrapT)):
            raise RuleError("AsscD1 needs (_ +i (_ +j _))")
        i, j = s.i, s.right.i
        return WrapT(i + j - 1, WrapT(i, s.left, s.right.left), s.right.right), {"i": i, "j": j}
    if rule == "AsscD2":
        t1, i, t2, j, t3 = _shape2(s, rule)
        if classify(i, sort_of_term(t2), j) != "O":
            raise RuleError("AsscD2 needs the outer index within the inner operand")
        return WrapT(i, t1, WrapT(j - i + 1, t2, t3)), {"i": i, "j": j}
    if rule in ("MixPerm1-fwd", "MixPerm2-bwd"):
        t1, i, t2, j, t3 = _shape2(s, rule)
        if classify(i, sort_of_term(t2), j) != "P1":
            raise RuleError("%s needs the outer index strictly right of the inner operand" % rule)
        s2 = sort_of_term(t2)
        return WrapT(i, WrapT(j - s2 + 1, t1, t3), t2), {"i": i, "j": j}
    if rule in ("MixPerm1-bwd", "MixPerm2-fwd"):
        t1, i, t2, j, t3 = _shape2(s, rule)
        if classify(i, sort_of_term(t2), j) != "P2":
            raise RuleError("%s needs the outer index strictly left of the inner operand" % rule)
        s3 = sort_of_term(t3)
        return WrapT(i + s3 - 1, WrapT(j, t1, t3), t2), {"i": i, "j": j}
    raise RuleError("unknown rule %r" % (rule,))


def apply_rule(t, app: RuleApp):
    """Apply one rewrite step to the whole term; validates shape and indices."""
    sub = subterm_at(t, app.at)
    new_sub, filled = _apply(sub, app.rule, app.params_dict())
    given = app.params_dict()
    for key, val in given.items():
        if key in filled and filled[key] != val:
            raise RuleError(
                "%s at %r: parameter %s=%d does not match the redex (%d)"
                % (app.rule, app.at, key, val, filled[key])
            )
    return replace_at(t, app.at, new_sub)


def enumerate_rule_apps(t) -> list:
    """All single rewrite steps applicable anywhere in t, in a fixed order."""
    out = []
    for path, sub in iter_subterms(t):
        for rule in RULE_NAMES:
            if rule == "UnitJ-i-add":
                for i in range(1, sort_of_term(sub) + 1):
                    out.append(rule_app(rule, path, i=i))
                continue
            try:
                _apply(sub, rule, {})
            except RuleError:
                continue
            out.append(rule_app(rule, path))
    return out


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class TraceStep:
    app: RuleApp
    result: object  # whole term after the step


@dataclass(frozen=True)
class RewriteTrace:
    start: object
    steps: tuple = ()

    def end(self):
        return self.steps[-1].result if self.steps else self.start

    def validate(self) -> bool:
        cur = self.start
        for step in self.steps:
            cur = apply_rule(cur, step.app)
            if cur != step.result:
                return False
        return True

    def __len__(self):
        return len(self.steps)


class Tracer:
    """Accumulates rewrite steps applied to one evolving term."""

    def __init__(self, start, budget: Optional[int] = None):
        self.start = start
        self.term = start
        self.steps = []
        self.budget = budget

    def at(self, path: tuple):
        return subterm_at(self.term, path)

    def emit(self, rule: str, at: tuple = (), **params):
        sub = subterm_at(self.term, at)
        new_sub, filled = _apply(sub, rule, params)
        self.term = replace_at(self.term, at, new_sub)
        app = RuleApp(rule, tuple(at), tuple(sorted(filled.items())))
        self.steps.append(TraceStep(app, self.term))
        if self.budget is not None and len(self.steps) > self.budget:
            raise BudgetError("rewrite trace exceeded budget of %d steps" % self.budget)

    def trace(self) -> RewriteTrace:
        return RewriteTrace(self.start, tuple(self.steps))


def invert_trace(trace: RewriteTrace) -> RewriteTrace:
    """The reverse trace: same paths, each rule replaced by its inverse."""
    tr = Tracer(trace.end())
    for step in reversed(trace.steps):
        tr.emit(INVERSE_RULE[step.app.rule], step.app.at, **step.app.params_dict())
    out = tr.trace()
    assert out.end() == trace.start
    return out


# ---------------------------------------------------------------------------
# sharp and equivalence


@lru_cache(maxsize=None)
def sharp(t) -> HyperConfig:
    """The hyperconfiguration a structural term denotes."""
    if isinstance(t, ConstI):
        return EMPTY
    if isinstance(t, ConstJ):
        return HyperConfig((SEP,))
    if isinstance(t, Leaf):
        return figure(t.type)
    if isinstance(t, Cat):
        return HyperConfig(sharp(t.left).items + sharp(t.right).items)
    if isinstance(t, WrapT):
        return wrap_at(sharp(t.left), t.i, sharp(t.right))
    raise TypeError("not a structural term: %r" % (t,))


def equiv(t, s) -> bool:
    """Interconvertibility under the rewrite rules (decided via sharp)."""
    return flatten(sharp(t)) == flatten(sharp(s))


def bounded_equiv_oracle(
    t,
    s,
    depth: int = 12,
    size_slack: int = 8,
    max_expansions: int = 200000,
) -> bool:
    """Breadth-first search for a rewrite path from t to s of length <= depth.

    Independent of sharp: explores single steps only.  States larger than
    max(|t|, |s|) + size_slack nodes are pruned and a deterministic expansion
    budget bounds the search, so a True answer always exhibits a real path
    while False means no path was found within those bounds.
    """
    if t == s:
        return True
    cap = max(term_size(t), term_size(s)) + size_slack
    frontier = [t]
    seen = {t}
    expansions = 0
    for _ in range(depth):
        nxt = []
        for cur in frontier:
            expansions += 1
            if expansions > max_expansions:
                return False
            for app in enumerate_rule_apps(cur):
                try:
                    new = apply_rule(cur, app)
                except (RuleError, SortError):
                    continue
                if new in seen or term_size(new) > cap:
                    continue
                if new == s:
                    return True
                seen.add(new)
                nxt.append(new)
        if not nxt:
            return False
        frontier = nxt
    return False


# ---------------------------------------------------------------------------
# canonical terms


def _build_term(items: tuple, addr):
    """Cons-list term of an item sequence; tracks the leaf path of addr."""
    if not items:
        if addr is not None:
            raise IndexError("address beyond the item list")
        return ConstI(), None
    head = items[0]
    head_addr = addr if addr is not None and addr[0] == 0 else None
    tail_addr = (addr[0] - 1,) + addr[1:] if addr is not None and addr[0] > 0 else None
    tail, tail_path = _build_term(items[1:], tail_addr)
    path = ((1,) + tail_path) if tail_path is not None else None
    if isinstance(head, Leaf0):
        if head_addr is not None:
            if len(head_addr) != 1:
                raise IndexError("address descends into a leaf item")
            path = (0,)
        return Cat(Leaf(head.type), tail), path
    if isinstance(head, Separator):
        if head_addr is not None:
            if len(head_addr) != 1:
                raise IndexError("address descends into a separator")
            path = (0,)
        return Cat(ConstJ(), tail), path
    # occurrence: wrap the gap fillers around the head leaf, gap 1 innermost
    a = len(head.gaps)
    chain = Leaf(head.type)
    chain_path = None
    if head_addr is not None and len(head_addr) == 1:
        chain_path = ()
    pos = 1
    for g, gap in enumerate(head.gaps):
        gap_addr = None
        if head_addr is not None and len(head_addr) > 1 and head_addr[1] == g:
            gap_addr = head_addr[2:]
        filler, filler_path = _build_term(gap.items, gap_addr)
        chain = WrapT(pos, chain, filler)
        pos += sort_of_config(gap)
        if chain_path is not None:
            chain_path = (0,) + chain_path
        elif filler_path is not None:
            chain_path = (1,) + filler_path
    if chain_path is not None:
        path = (0,) + chain_path
    return Cat(chain, tail), path


@lru_cache(maxsize=None)
def term_of_config(cfg: HyperConfig):
    """The canonical structural term denoting cfg (sharp is its inverse)."""
    term, _ = _build_term(cfg.items, None)
    return term


def term_of_config_with_addr(cfg: HyperConfig, addr: tuple):
    """Canonical term plus the path of the leaf for the item at addr."""
    term, path = _build_term(cfg.items, tuple(addr))
    if path is None:
        raise IndexError("item address %r not found" % (addr,))
    return term, path


def is_canonical(t) -> bool:
    return t == term_of_config(sharp(t))


# ---------------------------------------------------------------------------
# normalization


def normalize(t, budget: int = 10000) -> RewriteTrace:
    """Explicit rewrite trace from t to term_of_config(sharp(t))."""
    tr = Tracer(t, budget=budget)
    _canon(tr, ())
    assert tr.term == term_of_config(sharp(t))
    return tr.trace()


def _canon(tr: Tracer, path: tuple):
    sub = tr.at(path)
    if sub == term_of_config(sharp(sub)):
        return
    if isinstance(sub, ConstJ):
        tr.emit("UnitI-R-add", path)
        return
    if isinstance(sub, Leaf):
        if sort_of_type(sub.type) == 0:
            tr.emit("UnitI-R-add", path)
        else:
            _pad_leaf_gaps(tr, path)
            tr.emit("UnitI-R-add", path)
        return
    if isinstance(sub, Cat):
        _canon(tr, path + (1,))
        _cons(tr, path)
        return
    if isinstance(sub, WrapT):
        _canon(tr, path + (1,))
        _canon(tr, path + (0,))
        _merge_wrap(tr, path)
        return
    raise AssertionError("unreachable: %r" % (sub,))


def _pad_leaf_gaps(tr: Tracer, path: tuple):
    """Leaf of sort a >= 1 --> its gap-padded wrap chain ((A +1 (JJ+II)) ...)."""
    a = sort_of_type(tr.at(path).type)
    for m in range(1, a + 1):
        tr.emit("UnitJ-i-add", path, i=m)
    for m in range(1, a + 1):
        tr.emit("UnitI-R-add", path + (0,) * (a - m) + (1,))


def _cons(tr: Tracer, path: tuple):
    """Cat node whose right child is canonical --> canonical cons-list."""
    sub = tr.at(path)
    x = sub.left
    if isinstance(x, ConstI):
        tr.emit("UnitI-L-drop", path)
        return
    if isinstance(x, ConstJ):
        return
    if isinstance(x, Leaf):
        if sort_of_type(x.type) > 0:
            _pad_leaf_gaps(tr, path + (0,))
        return
    if isinstance(x, Cat):
        tr.emit("AsscC-fwd", path)
        _cons(tr, path + (1,))
        _cons(tr, path)
        return
    # wrap: canonicalize it standalone, then merge the two cons-lists
    _canon(tr, path + (0,))
    _merge_cat(tr, path)


def _merge_cat(tr: Tracer, path: tuple):
    """Cat of two canonical cons-lists --> one canonical cons-list."""
    while True:
        sub = tr.at(path)
        if isinstance(sub.left, ConstI):
            tr.emit("UnitI-L-drop", path)
            return
        tr.emit("AsscC-fwd", path)
        path = path + (1,)


def _merge_wrap(tr: Tracer, path: tuple):
    """Wrap of two canonical terms --> canonical cons-list."""
    sub = tr.at(path)
    i, cu = sub.i, sub.left
    head = cu.left
    w = sort_of_term(head)
    if isinstance(head, ConstJ) and i == 1:
        tr.emit("SW-left-bwd", path)
        _merge_cat(tr, path)
        return
    if i > w:
        tr.emit("SW-right-fwd", path + (0,))
        tr.emit("AsscD2", path)
        tr.emit("SW-right-bwd", path)
        _merge_wrap(tr, path + (1,))
        return
    # the filler lands inside the head occurrence's wrap chain
    tr.emit("SW-left-fwd", path + (0,))
    tr.emit("AsscD2", path)
    tr.emit("SW-left-bwd", path)
    _merge_chain(tr, path + (0,))


def _merge_chain(tr: Tracer, path: tuple):
    """Push the filler of (chain +i v) down to the gap that holds index i."""
    sub = tr.at(path)
    i, chain = sub.i, sub.left
    p = chain.i
    if i >= p:
        tr.emit("AsscD2", path)
        _merge_wrap(tr, path + (1,))
        return
    tr.emit("MixPerm2-fwd", path)
    _merge_chain(tr, path + (0,))


# ---------------------------------------------------------------------------
# extraction


def _extract_info(t, at: tuple):
    """(index i, item address in sharp(t)) when the leaf at `at` is visible."""
    sub = subterm_at(t, at)
    if not isinstance(sub, Leaf):
        raise ExtractionError("path %r does not address a type leaf" % (at,))
    marker = Atom("\x00extract", sort_of_type(sub.type))
    marked = sharp(replace_at(t, at, Leaf(marker)))
    hit = None
    seps_before = 0
    for addr, item in iter_items(marked):
        if isinstance(item, Separator) and hit is None:
            seps_before += 1
        if isinstance(item, Leaf0) and item.type == marker:
            hit = addr
            break
        if isinstance(item, Occurrence) and item.type == marker:
            if any(g.items != (SEP,) for g in item.gaps):
                return None
            hit = addr
            break
    if hit is None:  # the leaf's material was erased by a sort-collapsing wrap
        return None
    return seps_before + 1, hit


def extractable(t, at: tuple) -> Optional[int]:
    """The separator index the leaf at `at` occupies, when it is visible.

    Visible means: in sharp(t) the leaf's occurrence appears as exactly the
    figure of its type (each gap a single separator).  Sort-0 leaves whose
    material survives are always visible.
    """
    info = _extract_info(t, at)
    return info[0] if info else None


class _Degenerate(Exception):
    pass


def _pull(tr: Tracer, gpath: tuple, at: tuple, rng) -> int:
    """Bubble the leaf at gpath+at up to a final wrap at gpath; returns its index."""
    node = tr.at(gpath)
    if at == ():
        tr.emit("UnitJ-L-add", gpath)
        return 1
    if isinstance(node, WrapT) and at == (1,):
        return node.i
    if rng is not None and rng.random() < 0.3:
        _canon(tr, gpath + (1 - at[0],))
    d, rest = at[0], at[1:]
    if isinstance(node, Cat) and d == 0:
        k = _pull(tr, gpath + (0,), rest, rng)
        tr.emit("SW-left-fwd", gpath)
        tr.emit("AsscD1", gpath)
        tr.emit("SW-left-bwd", gpath + (0,))
        return k
    if isinstance(node, Cat) and d == 1:
        s = sort_of_term(node.left)
        k = _pull(tr, gpath + (1,), rest, rng)
        tr.emit("SW-right-fwd", gpath)
        tr.emit("AsscD1", gpath)
        tr.emit("SW-right-bwd", gpath + (0,))
        return s + k
    if isinstance(node, WrapT) and d == 1:
        k = _pull(tr, gpath + (1,), rest, rng)
        i = tr.at(gpath).i
        tr.emit("AsscD1", gpath)
        return i + k - 1
    if isinstance(node, WrapT) and d == 0:
        k = _pull(tr, gpath + (0,), rest, rng)
        cur = tr.at(gpath)
        i, inner, right = cur.i, cur.left, cur.right
        a = sort_of_term(inner.right)
        if isinstance(right, ConstJ):
            tr.emit("UnitJ-i-drop", gpath)
            return k
        cls = classify(k, a, i)
        if cls == "P1":
            tr.emit("MixPerm1-fwd", gpath)
            return k
        if cls == "P2":
            r = sort_of_term(right)
            tr.emit("MixPerm2-fwd", gpath)
            return k + r - 1
        # overlap: only legal when the wrapped material is a bare separator
        if flatten(sharp(right)) != (SEP,):
            raise _Degenerate()
        _canon(tr, gpath + (1,))
        tr.emit("UnitI-R-drop", gpath + (1,))
        tr.emit("UnitJ-i-drop", gpath)
        return k
    raise IndexError("path %r does not address a leaf" % (at,))


def extract(t, at: tuple, rng: Optional[random.Random] = None):
    """Pull the leaf at `at` out of t as a final wrap.

    Returns (rest, i, trace) with trace: t ~* (rest +i leaf) where the leaf
    fills separator slot i of sharp(rest).  Raises ExtractionError when the
    occurrence is not visible in sharp(t).
    """
    info = _extract_info(t, at)
    if info is None:
        raise ExtractionError("occurrence at %r is not visible for extraction" % (at,))
    want_i, item_addr = info
    leaf = subterm_at(t, at)
    tr = Tracer(t)
    try:
        got = _pull(tr, (), at, rng)
    except _Degenerate:
        tr = Tracer(t)
        _canon(tr, ())
        canon, leaf_path = term_of_config_with_addr(sharp(t), item_addr)
        assert tr.term == canon
        got = _pull(tr, (), leaf_path, rng)
    final = tr.term
    assert isinstance(final, WrapT) and final.right == leaf and final.i == got
    assert got == want_i, "extraction index %d disagrees with sharp (%d)" % (got, want_i)
    return final.left, got, tr.trace()


def uniqueness_check(t, at: tuple, trials: int = 8, seed: int = 0) -> bool:
    """Re-run extraction along varied rewrite routes; the index and the
    sharp image of the remainder must come out the same every time."""
    rest0, i0, trace0 = extract(t, at)
    if not trace0.validate():
        return False
    base = flatten(sharp(rest0))
    for trial in range(trials):
        rng = random.Random(seed + trial)
        rest, i, trace = extract(t, at, rng=rng)
        if i != i0 or flatten(sharp(rest)) != base or not trace.validate():
            return False
    return True


# ---------------------------------------------------------------------------
# serialization


def trace_to_obj(trace: RewriteTrace) -> dict:
    return {
        "start": term_str(trace.start),
        "steps": [
            {
                "rule": step.app.rule,
                "path": list(step.app.at),
                "params": step.app.params_dict(),
                "result": term_str(step.result),
            }
            for step in trace.steps
        ],
    }


def trace_from_obj(obj: dict, sig: Signature) -> RewriteTrace:
    start = parse_term(obj["start"], sig)
    tr = Tracer(start)
    for step in obj["steps"]:
        tr.emit(step["rule"], tuple(step["path"]), **{k: v for k, v in step.get("params", {}).items()})
        if parse_term(step["result"], sig) != tr.term:
            raise RuleError("trace step result does not match")
    return tr.trace()
