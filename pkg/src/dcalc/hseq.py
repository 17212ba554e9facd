"""Hypersequent calculus over configurations, without structural rules.

A sequent pairs a hyperconfiguration with a succedent type of equal sort.
Every connective has a left and a right rule; the left rules for the
implications abstract a region of the antecedent into the gaps of the
premise ("chunks"), which is where all the combinatorics of discontinuity
lives.  ``instance_premises`` is the single source of truth for what the
premises of a rule instance are; enumeration, proof search and checking all
go through it.  Cut is supported by the checker but never used in search.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .syntax import (
    EMPTY,
    DDown,
    DProd,
    DUp,
    HyperConfig,
    Leaf0,
    Occurrence,
    Over,
    ParseError,
    Prod,
    SEP,
    Separator,
    Signature,
    SortError,
    Type,
    Under,
    UnitI,
    UnitJ,
    _parse_config_body,
    _parse_type_expr,
    _Scanner,
    config_at,
    config_str,
    figure,
    figure_items,
    flatten,
    generalized_wrap,
    item_at,
    iter_items,
    replace_range,
    sep_index_at,
    sort_of_config,
    sort_of_type,
    splice_item,
    sub_slice,
    type_str,
    wrap_at,
)


class InstanceError(ValueError):
    """A rule instance whose parameters do not fit the sequent."""


RULE_ORDER = (
    "Id",
    "IR",
    "JR",
    "UnderR",
    "OverR",
    "DownR",
    "UpR",
    "ProdR",
    "DProdR",
    "ProdL",
    "DProdL",
    "IL",
    "JL",
    "UnderL",
    "OverL",
    "UpL",
    "DownL",
)


@dataclass(frozen=True)
class HSequent:
    antecedent: HyperConfig
    succedent: Type

    def __post_init__(self):
        a = sort_of_config(self.antecedent)
        b = sort_of_type(self.succedent)
        if a != b:
            raise SortError(
                "antecedent sort %d does not match succedent sort %d" % (a, b)
            )

    def __str__(self):
        return "%s => %s" % (config_str(self.antecedent), type_str(self.succedent))


@dataclass(frozen=True)
class HDerivation:
    rule: str
    conclusion: HSequent
    premises: tuple = ()
    params: tuple = ()

    def params_dict(self) -> dict:
        return dict(self.params)


def _freeze(params: dict) -> tuple:
    return tuple(sorted(params.items()))


def sequent_str(seq: HSequent) -> str:
    return str(seq)


def parse_hsequent(text: str, sig: Signature) -> HSequent:
    sc = _Scanner(text)
    cfg = _parse_config_body(sc, sig)
    sc.expect("DARROW")
    t = _parse_type_expr(sc, sig)
    if not sc.at_end():
        sc.error("trailing input after sequent")
    try:
        return HSequent(cfg, t)
    except SortError as exc:
        raise ParseError(str(exc)) from exc


# ---------------------------------------------------------------------------
# region abstraction
#
# A chunk spec is (level, start, end) relative to the abstracted region:
# the items [start:end) of the subconfiguration at the even-length `level`
# address become one gap filler and are replaced by a separator.  Specs are
# listed in flat (left-to-right, depth-first) order.


def apply_chunks(region: HyperConfig, specs):
    """Replace each chunk of the region by a separator.

    Returns (abstracted region, tuple of chunk contents in flat order).
    """
    specs = tuple(specs)
    by_level = {}
    for idx, spec in enumerate(specs):
        lvl, start, end = spec
        lvl = tuple(lvl)
        if len(lvl) % 2 or start > end or start < 0:
            raise InstanceError("bad chunk spec %r" % (spec,))
        by_level.setdefault(lvl, []).append((start, end, idx))
    collected = {}
    order = []

    def walk(items, lvl):
        ranges = sorted(by_level.pop(lvl, ()))
        out = []
        i = 0
        ridx = 0
        while True:
            while ridx < len(ranges) and ranges[ridx][0] == i:
                start, end, idx = ranges[ridx]
                if end > len(items):
                    raise InstanceError("chunk %d:%d beyond the region" % (start, end))
                collected[idx] = HyperConfig(items[start:end])
                order.append(idx)
                out.append(SEP)
                i = end
                ridx += 1
            if ridx < len(ranges) and ranges[ridx][0] < i:
                raise InstanceError("overlapping chunks")
            if i >= len(items):
                if ridx != len(ranges):
                    raise InstanceError("chunk beyond the region")
                break
            item = items[i]
            if isinstance(item, Occurrence):
                gaps = tuple(
                    HyperConfig(tuple(walk(gap.items, lvl + (i, g))))
                    for g, gap in enumerate(item.gaps)
                )
                out.append(Occurrence(item.type, gaps))
            else:
                out.append(item)
            i += 1
        return out

    new_items = walk(region.items, ())
    if by_level:
        raise InstanceError("chunk level inside another chunk or outside the region")
    if order != list(range(len(specs))):
        raise InstanceError("chunks not in flat order")
    contents = tuple(collected[i] for i in range(len(specs)))
    return HyperConfig(tuple(new_items)), contents


def enum_chunkings(region: HyperConfig, count: int):
    """All ways to abstract the region into `count` gaps.

    Every separator of the region must fall inside a chunk; chunks are
    contiguous item ranges at any depth, zero-width ranges allowed.
    """

    def gen(items, lvl, i, r):
        if i == len(items):
            yield (), r
        if r >= 1:
            for e in range(i, len(items) + 1):
                for rest, rr in gen(items, lvl, e, r - 1):
                    yield ((lvl, i, e),) + rest, rr
        if i < len(items):
            item = items[i]
            if isinstance(item, Leaf0):
                yield from gen(items, lvl, i + 1, r)
            elif isinstance(item, Occurrence):
                for inner, r1 in gen_gaps(item, lvl + (i,), 0, r):
                    for rest, r2 in gen(items, lvl, i + 1, r1):
                        yield inner + rest, r2
            # a bare separator can only be consumed by a chunk

    def gen_gaps(occ, base, g, r):
        if g == len(occ.gaps):
            yield (), r
            return
        for first, r1 in gen(occ.gaps[g].items, base + (g,), 0, r):
            for rest, r2 in gen_gaps(occ, base, g + 1, r1):
                yield first + rest, r2

    for specs, left in gen(region.items, (), 0, count):
        if left == 0:
            yield specs


def _shift_specs(specs, offset: int):
    out = []
    for lvl, start, end in specs:
        if lvl == ():
            out.append(((), start + offset, end + offset))
        else:
            out.append(((lvl[0] + offset,) + lvl[1:], start, end))
    return tuple(out)


def _split_specs(specs, sep_pos: int):
    """Split chunk specs of a combined region at the principal separator."""
    left, right = [], []
    for spec in specs:
        lvl, start, end = spec
        if lvl == ():
            if end <= sep_pos:
                left.append(spec)
            elif start >= sep_pos + 1:
                right.append(((), start - sep_pos - 1, end - sep_pos - 1))
            else:
                raise InstanceError("chunk overlaps the principal item")
        elif lvl[0] < sep_pos:
            left.append(spec)
        elif lvl[0] > sep_pos:
            right.append(((lvl[0] - sep_pos - 1,) + lvl[1:], start, end))
        else:
            raise InstanceError("chunk descends into the principal item")
    return tuple(left), tuple(right)


# ---------------------------------------------------------------------------
# rule instances


def _item_gaps(item) -> tuple:
    return item.gaps if isinstance(item, Occurrence) else ()


def instance_premises(seq: HSequent, rule: str, params: dict) -> tuple:
    """Premise sequents of one rule instance; raises InstanceError if the
    parameters do not fit the conclusion."""
    try:
        return _instance_premises(seq, rule, dict(params))
    except (SortError, IndexError, KeyError) as exc:
        raise InstanceError(str(exc)) from exc


def _instance_premises(seq: HSequent, rule: str, params: dict) -> tuple:
    ant, succ = seq.antecedent, seq.succedent
    if rule == "Id":
        if ant != figure(succ):
            raise InstanceError("Id needs the figure of the succedent")
        return ()
    if rule == "IR":
        if not isinstance(succ, UnitI) or ant != EMPTY:
            raise InstanceError("IR is Lambda => I")
        return ()
    if rule == "JR":
        if not isinstance(succ, UnitJ) or ant.items != (SEP,):
            raise InstanceError("JR is [] => J")
        return ()
    if rule == "UnderR":
        if not isinstance(succ, Under):
            raise InstanceError("UnderR needs a \\ succedent")
        return (HSequent(HyperConfig(figure(succ.left).items + ant.items), succ.right),)
    if rule == "OverR":
        if not isinstance(succ, Over):
            raise InstanceError("OverR needs a / succedent")
        return (HSequent(HyperConfig(ant.items + figure(succ.right).items), succ.left),)
    if rule == "DownR":
        if not isinstance(succ, DDown):
            raise InstanceError("DownR needs a ! succedent")
        if params.get("k", succ.k) != succ.k:
            raise InstanceError("DownR index must match the succedent")
        return (HSequent(wrap_at(figure(succ.left), succ.k, ant), succ.right),)
    if rule == "UpR":
        if not isinstance(succ, DUp):
            raise InstanceError("UpR needs a ^ succedent")
        if params.get("k", succ.k) != succ.k:
            raise InstanceError("UpR index must match the succedent")
        return (HSequent(wrap_at(ant, succ.k, figure(succ.right)), succ.left),)
    if rule == "ProdR":
        if not isinstance(succ, Prod):
            raise InstanceError("ProdR needs a . succedent")
        split = params["split"]
        if not 0 <= split <= len(ant.items):
            raise InstanceError("bad split %r" % (split,))
        return (
            HSequent(HyperConfig(ant.items[:split]), succ.left),
            HSequent(HyperConfig(ant.items[split:]), succ.right),
        )
    if rule == "DProdR":
        if not isinstance(succ, DProd):
            raise InstanceError("DProdR needs an @ succedent")
        level, start, end = params["excise"]
        level = tuple(level)
        slice_cfg = sub_slice(ant, level, start, end)
        main = replace_range(ant, level, start, end, (SEP,))
        if sep_index_at(main, level + (start,)) != succ.k:
            raise InstanceError("excised slice is not at gap %d" % succ.k)
        return (HSequent(main, succ.left), HSequent(slice_cfg, succ.right))
    if rule == "Cut":
        raise InstanceError("Cut instances are validated from their premises")

    # left rules: the principal item
    addr = tuple(params["at"])
    item = item_at(ant, addr)
    if isinstance(item, Separator):
        raise InstanceError("principal item is a separator")
    t = item.type
    if rule == "IL":
        if not isinstance(t, UnitI):
            raise InstanceError("IL needs an I item")
        return (HSequent(splice_item(ant, addr, ()), succ),)
    if rule == "JL":
        if not (isinstance(t, UnitJ) and isinstance(item, Occurrence)):
            raise InstanceError("JL needs a J occurrence")
        return (HSequent(splice_item(ant, addr, item.gaps[0].items), succ),)
    if rule == "ProdL":
        if not isinstance(t, Prod):
            raise InstanceError("ProdL needs a . item")
        a = sort_of_type(t.left)
        gaps = _item_gaps(item)
        new = figure_items(t.left, gaps[:a]) + figure_items(t.right, gaps[a:])
        return (HSequent(splice_item(ant, addr, new), succ),)
    if rule == "DProdL":
        if not isinstance(t, DProd):
            raise InstanceError("DProdL needs an @ item")
        b = sort_of_type(t.right)
        gaps = _item_gaps(item)
        k = t.k
        inner = HyperConfig(figure_items(t.right, gaps[k - 1 : k - 1 + b]))
        new_gaps = gaps[: k - 1] + (inner,) + gaps[k - 1 + b :]
        return (HSequent(splice_item(ant, addr, figure_items(t.left, new_gaps)), succ),)

    level, p = addr[:-1], addr[-1]
    if rule == "UnderL":
        if not isinstance(t, Under):
            raise InstanceError("UnderL needs a \\ item")
        q = params["mstart"]
        if not 0 <= q <= p:
            raise InstanceError("bad region start %r" % (q,))
        region = sub_slice(ant, level, q, p)
        abstracted, contents = apply_chunks(region, params["chunks"])
        a = sort_of_type(t.left)
        if len(contents) != a or sort_of_config(abstracted) != a:
            raise InstanceError("abstraction does not fit the argument sort")
        new = figure_items(t.right, contents + _item_gaps(item))
        return (
            HSequent(abstracted, t.left),
            HSequent(replace_range(ant, level, q, p + 1, new), succ),
        )
    if rule == "OverL":
        if not isinstance(t, Over):
            raise InstanceError("OverL needs a / item")
        r = params["mend"]
        n = len(config_at(ant, level).items)
        if not p + 1 <= r <= n:
            raise InstanceError("bad region end %r" % (r,))
        region = sub_slice(ant, level, p + 1, r)
        abstracted, contents = apply_chunks(region, params["chunks"])
        b = sort_of_type(t.right)
        if len(contents) != b or sort_of_config(abstracted) != b:
            raise InstanceError("abstraction does not fit the argument sort")
        new = figure_items(t.left, _item_gaps(item) + contents)
        return (
            HSequent(abstracted, t.right),
            HSequent(replace_range(ant, level, p, r, new), succ),
        )
    if rule == "UpL":
        if not isinstance(t, DUp):
            raise InstanceError("UpL needs a ^ item")
        region = item.gaps[t.k - 1]
        abstracted, contents = apply_chunks(region, params["chunks"])
        b = sort_of_type(t.right)
        if len(contents) != b or sort_of_config(abstracted) != b:
            raise InstanceError("abstraction does not fit the argument sort")
        new_gaps = item.gaps[: t.k - 1] + contents + item.gaps[t.k :]
        return (
            HSequent(abstracted, t.right),
            HSequent(splice_item(ant, addr, figure_items(t.left, new_gaps)), succ),
        )
    if rule == "DownL":
        if not isinstance(t, DDown):
            raise InstanceError("DownL needs a ! item")
        q, r = params["mstart"], params["mend"]
        n = len(config_at(ant, level).items)
        if not (0 <= q <= p and p + 1 <= r <= n):
            raise InstanceError("bad region %r:%r" % (q, r))
        lspecs, rspecs = _split_specs(params["chunks"], p - q)
        absl, contl = apply_chunks(sub_slice(ant, level, q, p), lspecs)
        absr, contr = apply_chunks(sub_slice(ant, level, p + 1, r), rspecs)
        a = sort_of_type(t.left)
        gamma = HyperConfig(absl.items + (SEP,) + absr.items)
        ok = (
            len(contl) + len(contr) == a - 1
            and sort_of_config(gamma) == a
            and sort_of_config(absl) == t.k - 1
        )
        if not ok:
            raise InstanceError("abstraction does not fit the infix sort")
        new = figure_items(t.right, contl + _item_gaps(item) + contr)
        return (
            HSequent(gamma, t.left),
            HSequent(replace_range(ant, level, q, r, new), succ),
        )
    raise InstanceError("unknown rule %r" % (rule,))


# ---------------------------------------------------------------------------
# enumeration


def _levels(cfg: HyperConfig):
    yield ()
    for addr, item in iter_items(cfg):
        if isinstance(item, Occurrence):
            for g in range(len(item.gaps)):
                yield addr + (g,)


def enumerate_rule_instances(seq: HSequent, only_rule=None):
    """Yield (rule, params, premises) for every instance concluding seq."""
    rules = (only_rule,) if only_rule is not None else RULE_ORDER
    for rule in rules:
        for params in _candidate_params(seq, rule):
            try:
                premises = instance_premises(seq, rule, params)
            except InstanceError:
                continue
            yield rule, _freeze(params), premises


def _candidate_params(seq: HSequent, rule: str):
    ant, succ = seq.antecedent, seq.succedent
    if rule == "Id":
        if ant == figure(succ):
            yield {}
        return
    if rule == "IR":
        if isinstance(succ, UnitI) and ant == EMPTY:
            yield {}
        return
    if rule == "JR":
        if isinstance(succ, UnitJ) and ant.items == (SEP,):
            yield {}
        return
    if rule == "UnderR":
        if isinstance(succ, Under):
            yield {}
        return
    if rule == "OverR":
        if isinstance(succ, Over):
            yield {}
        return
    if rule == "DownR":
        if isinstance(succ, DDown):
            yield {"k": succ.k}
        return
    if rule == "UpR":
        if isinstance(succ, DUp):
            yield {"k": succ.k}
        return
    if rule == "ProdR":
        if isinstance(succ, Prod):
            want = sort_of_type(succ.left)
            total = 0
            for split in range(len(ant.items) + 1):
                if total == want:
                    yield {"split": split}
                if split < len(ant.items):
                    item = ant.items[split]
                    if isinstance(item, Separator):
                        total += 1
                    elif isinstance(item, Occurrence):
                        total += sum(sort_of_config(g) for g in item.gaps)
        return
    if rule == "DProdR":
        if isinstance(succ, DProd):
            want = sort_of_type(succ.right)
            for level in _levels(ant):
                items = config_at(ant, level).items
                for start in range(len(items) + 1):
                    for end in range(start, len(items) + 1):
                        if sort_of_config(HyperConfig(items[start:end])) == want:
                            yield {"excise": (level, start, end)}
        return
    if rule == "Cut":
        return

    for addr, item in iter_items(ant):
        if isinstance(item, Separator):
            continue
        t = item.type
        level, p = addr[:-1], addr[-1]
        if rule == "IL" and isinstance(t, UnitI):
            yield {"at": addr}
        elif rule == "JL" and isinstance(t, UnitJ) and isinstance(item, Occurrence):
            yield {"at": addr}
        elif rule == "ProdL" and isinstance(t, Prod):
            yield {"at": addr}
        elif rule == "DProdL" and isinstance(t, DProd):
            yield {"at": addr}
        elif rule == "UnderL" and isinstance(t, Under):
            count = sort_of_type(t.left)
            for q in range(p, -1, -1):
                region = sub_slice(ant, level, q, p)
                for specs in enum_chunkings(region, count):
                    yield {"at": addr, "mstart": q, "chunks": specs}
        elif rule == "OverL" and isinstance(t, Over):
            count = sort_of_type(t.right)
            n = len(config_at(ant, level).items)
            for r in range(p + 1, n + 1):
                region = sub_slice(ant, level, p + 1, r)
                for specs in enum_chunkings(region, count):
                    yield {"at": addr, "mend": r, "chunks": specs}
        elif rule == "UpL" and isinstance(t, DUp):
            count = sort_of_type(t.right)
            for specs in enum_chunkings(item.gaps[t.k - 1], count):
                yield {"at": addr, "chunks": specs}
        elif rule == "DownL" and isinstance(t, DDown):
            a = sort_of_type(t.left)
            n = len(config_at(ant, level).items)
            for q in range(p, -1, -1):
                left = sub_slice(ant, level, q, p)
                for lspecs in enum_chunkings(left, t.k - 1):
                    for r in range(p + 1, n + 1):
                        right = sub_slice(ant, level, p + 1, r)
                        for rspecs in enum_chunkings(right, a - t.k):
                            chunks = lspecs + _shift_specs(rspecs, p - q + 1)
                            yield {"at": addr, "mstart": q, "mend": r, "chunks": chunks}


# ---------------------------------------------------------------------------
# checking and search


def check(d: HDerivation) -> bool:
    """Recursively validate a derivation against the rule definitions."""
    try:
        return _check(d)
    except (InstanceError, SortError, ValueError, IndexError, KeyError):
        return False


def _check(d: HDerivation) -> bool:
    if d.rule == "Cut":
        if len(d.premises) != 2:
            return False
        p1, p2 = d.premises[0].conclusion, d.premises[1].conclusion
        addr = tuple(d.params_dict()["at"])
        item = item_at(p2.antecedent, addr)
        if isinstance(item, Separator) or item.type != p1.succedent:
            return False
        plugged = generalized_wrap(p1.antecedent, _item_gaps(item))
        want = splice_item(p2.antecedent, addr, plugged.items)
        ok = d.conclusion.antecedent == want and d.conclusion.succedent == p2.succedent
        return ok and all(_check(p) for p in d.premises)
    want = instance_premises(d.conclusion, d.rule, d.params_dict())
    if tuple(p.conclusion for p in d.premises) != want:
        return False
    return all(_check(p) for p in d.premises)


def _seq_key(seq: HSequent):
    return (flatten(seq.antecedent), seq.succedent)


def prove(seq: HSequent):
    """Depth-first cut-free proof search; returns a derivation or None."""
    failed = set()

    def go(s):
        key = _seq_key(s)
        if key in failed:
            return None
        for rule, params, premises in enumerate_rule_instances(s):
            subs = []
            for p in premises:
                sub = go(p)
                if sub is None:
                    break
                subs.append(sub)
            else:
                return HDerivation(rule, s, tuple(subs), params)
        failed.add(key)
        return None

    return go(seq)


def prove_all(seq: HSequent, limit: int = 16):
    """All cut-free derivations of seq, up to `limit` per subgoal."""
    memo = {}

    def go(s):
        key = _seq_key(s)
        if key in memo:
            return memo[key]
        out = []
        for rule, params, premises in enumerate_rule_instances(s):
            lists = [go(p) for p in premises]
            if any(not l for l in lists):
                continue
            for combo in product(*lists):
                out.append(HDerivation(rule, s, combo, params))
                if len(out) >= limit:
                    break
            if len(out) >= limit:
                break
        out = list(dict.fromkeys(out))
        memo[key] = out
        return out

    return go(seq)


# ---------------------------------------------------------------------------
# serialization


def _to_jsonable(v):
    if isinstance(v, (tuple, list)):
        return [_to_jsonable(x) for x in v]
    return v


def _from_jsonable(v):
    if isinstance(v, list):
        return tuple(_from_jsonable(x) for x in v)
    return v


def params_to_obj(params: tuple) -> dict:
    return {k: _to_jsonable(v) for k, v in params}


def params_from_obj(obj: dict) -> tuple:
    return tuple(sorted((k, _from_jsonable(v)) for k, v in obj.items()))


def derivation_to_obj(d: HDerivation) -> dict:
    return {
        "rule": d.rule,
        "sequent": sequent_str(d.conclusion),
        "params": params_to_obj(d.params),
        "premises": [derivation_to_obj(p) for p in d.premises],
    }


def derivation_from_obj(obj: dict, sig: Signature) -> HDerivation:
    seq = parse_hsequent(obj["sequent"], sig)
    premises = tuple(derivation_from_obj(p, sig) for p in obj.get("premises", ()))
    return HDerivation(obj["rule"], seq, premises, params_from_obj(obj.get("params", {})))


def derivation_text(d: HDerivation) -> str:
    lines = []

    def go(node, depth):
        ps = ", ".join("%s=%s" % (k, v) for k, v in node.params)
        tag = node.rule + (" " + ps if ps else "")
        lines.append("%s[%s] %s" % ("  " * depth, tag, node.conclusion))
        for p in node.premises:
            go(p, depth + 1)

    go(d, 0)
    return "\n".join(lines)


_LATEX_MAP = {
    "\\": "\\textbackslash ",
    "{": "\\{",
    "}": "\\}",
    "^": "\\^{}",
    "_": "\\_",
    "&": "\\&",
    "%": "\\%",
    "#": "\\#",
    "~": "\\~{}",
}


def latex_escape(s: str) -> str:
    return "".join(_LATEX_MAP.get(c, c) for c in s)


def derivation_latex(d: HDerivation) -> str:
    """A proof.sty \\infer tree with sequents set verbatim."""

    def go(node):
        concl = "\\texttt{%s}" % latex_escape(str(node.conclusion))
        prems = " & ".join(go(p) for p in node.premises)
        return "\\infer[\\mathrm{%s}]{%s}{%s}" % (latex_escape(node.rule), concl, prems)

    return go(d)
