"""Sequent calculus over structural terms, with explicit rewrite steps.

Antecedents here are structural terms rather than configurations; the
logical rules mirror the configuration calculus one-for-one, acting on a
designated subterm, and a separate Structural rule applies one rewrite step
to the whole antecedent.  ``prove_m`` searches by translating the sharp
image to the configuration calculus and lifting the proof found there.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    DDown,
    DProd,
    DUp,
    Over,
    ParseError,
    Prod,
    Signature,
    SortError,
    Type,
    Under,
    UnitI,
    UnitJ,
    _parse_type_expr,
    _Scanner,
    sort_of_type,
    type_str,
)
from .terms import (
    Cat,
    ConstI,
    ConstJ,
    Leaf,
    RuleApp,
    WrapT,
    _parse_term,
    apply_rule,
    replace_at,
    sort_of_term,
    subterm_at,
    term_str,
)
from .hseq import InstanceError, _freeze, _from_jsonable, _to_jsonable


@dataclass(frozen=True)
class MSequent:
    antecedent: object  # structural term
    succedent: Type

    def __post_init__(self):
        a = sort_of_term(self.antecedent)
        b = sort_of_type(self.succedent)
        if a != b:
            raise SortError(
                "antecedent sort %d does not match succedent sort %d" % (a, b)
            )

    def __str__(self):
        return "%s -> %s" % (term_str(self.antecedent), type_str(self.succedent))


@dataclass(frozen=True)
class MDerivation:
    rule: str
    conclusion: MSequent
    premises: tuple = ()
    params: tuple = ()

    def params_dict(self) -> dict:
        return dict(self.params)


def msequent_str(seq: MSequent) -> str:
    return str(seq)


def parse_msequent(text: str, sig: Signature) -> MSequent:
    sc = _Scanner(text)
    t = _parse_term(sc, sig)
    sc.expect("ARROW")
    ty = _parse_type_expr(sc, sig)
    if not sc.at_end():
        sc.error("trailing input after sequent")
    try:
        return MSequent(t, ty)
    except SortError as exc:
        raise ParseError(str(exc)) from exc


# ---------------------------------------------------------------------------
# rule instances


def m_instance_premises(seq: MSequent, rule: str, params: dict) -> tuple:
    """Premise sequents of a logical rule instance (Cut and Structural are
    validated from their premises in check_m instead)."""
    try:
        return _m_instance_premises(seq, rule, dict(params))
    except (SortError, IndexError, KeyError) as exc:
        raise InstanceError(str(exc)) from exc


def _m_instance_premises(seq: MSequent, rule: str, params: dict) -> tuple:
    ant, succ = seq.antecedent, seq.succedent
    if rule == "Id":
        if ant != Leaf(succ):
            raise InstanceError("Id needs a type leaf antecedent")
        return ()
    if rule == "IR":
        if not (isinstance(succ, UnitI) and isinstance(ant, ConstI)):
            raise InstanceError("IR is II -> I")
        return ()
    if rule == "JR":
        if not (isinstance(succ, UnitJ) and isinstance(ant, ConstJ)):
            raise InstanceError("JR is JJ -> J")
        return ()
    if rule == "UnderR":
        if not isinstance(succ, Under):
            raise InstanceError("UnderR needs a \\ succedent")
        return (MSequent(Cat(Leaf(succ.left), ant), succ.right),)
    if rule == "OverR":
        if not isinstance(succ, Over):
            raise InstanceError("OverR needs a / succedent")
        return (MSequent(Cat(ant, Leaf(succ.right)), succ.left),)
    if rule == "DownR":
        if not isinstance(succ, DDown):
            raise InstanceError("DownR needs a ! succedent")
        return (MSequent(WrapT(succ.k, Leaf(succ.left), ant), succ.right),)
    if rule == "UpR":
        if not isinstance(succ, DUp):
            raise InstanceError("UpR needs a ^ succedent")
        return (MSequent(WrapT(succ.k, ant, Leaf(succ.right)), succ.left),)
    if rule == "ProdR":
        if not (isinstance(succ, Prod) and isinstance(ant, Cat)):
            raise InstanceError("ProdR needs a . succedent and a + antecedent")
        return (MSequent(ant.left, succ.left), MSequent(ant.right, succ.right))
    if rule == "DProdR":
        if not (isinstance(succ, DProd) and isinstance(ant, WrapT) and ant.i == succ.k):
            raise InstanceError("DProdR needs an @k succedent and a +k antecedent")
        return (MSequent(ant.left, succ.left), MSequent(ant.right, succ.right))

    at = tuple(params["at"])
    sub = subterm_at(ant, at)
    if rule == "IL":
        if sub != Leaf(UnitI()):
            raise InstanceError("IL needs an I leaf")
        return (MSequent(replace_at(ant, at, ConstI()), succ),)
    if rule == "JL":
        if sub != Leaf(UnitJ()):
            raise InstanceError("JL needs a J leaf")
        return (MSequent(replace_at(ant, at, ConstJ()), succ),)
    if rule == "ProdL":
        ok = isinstance(sub, Leaf) and isinstance(sub.type, Prod)
        if not ok:
            raise InstanceError("ProdL needs a . leaf")
        t = sub.type
        return (MSequent(replace_at(ant, at, Cat(Leaf(t.left), Leaf(t.right))), succ),)
    if rule == "DProdL":
        ok = isinstance(sub, Leaf) and isinstance(sub.type, DProd)
        if not ok:
            raise InstanceError("DProdL needs an @ leaf")
        t = sub.type
        return (
            MSequent(replace_at(ant, at, WrapT(t.k, Leaf(t.left), Leaf(t.right))), succ),
        )
    if rule == "UnderL":
        ok = (
            isinstance(sub, Cat)
            and isinstance(sub.right, Leaf)
            and isinstance(sub.right.type, Under)
        )
        if not ok:
            raise InstanceError("UnderL needs a (_ + A\\B leaf) subterm")
        t = sub.right.type
        return (
            MSequent(sub.left, t.left),
            MSequent(replace_at(ant, at, Leaf(t.right)), succ),
        )
    if rule == "OverL":
        ok = (
            isinstance(sub, Cat)
            and isinstance(sub.left, Leaf)
            and isinstance(sub.left.type, Over)
        )
        if not ok:
            raise InstanceError("OverL needs a (B/A leaf + _) subterm")
        t = sub.left.type
        return (
            MSequent(sub.right, t.right),
            MSequent(replace_at(ant, at, Leaf(t.left)), succ),
        )
    if rule == "UpL":
        ok = (
            isinstance(sub, WrapT)
            and isinstance(sub.left, Leaf)
            and isinstance(sub.left.type, DUp)
            and sub.left.type.k == sub.i
        )
        if not ok:
            raise InstanceError("UpL needs a (C^k(B) leaf +k _) subterm")
        t = sub.left.type
        return (
            MSequent(sub.right, t.right),
            MSequent(replace_at(ant, at, Leaf(t.left)), succ),
        )
    if rule == "DownL":
        ok = (
            isinstance(sub, WrapT)
            and isinstance(sub.right, Leaf)
            and isinstance(sub.right.type, DDown)
            and sub.right.type.k == sub.i
        )
        if not ok:
            raise InstanceError("DownL needs a (_ +k A!kC leaf) subterm")
        t = sub.right.type
        return (
            MSequent(sub.left, t.left),
            MSequent(replace_at(ant, at, Leaf(t.right)), succ),
        )
    raise InstanceError("unknown rule %r" % (rule,))


def structural_step(premise: MDerivation, app: RuleApp) -> MDerivation:
    """Extend a derivation with one antecedent rewrite step."""
    seq = premise.conclusion
    new_ant = apply_rule(seq.antecedent, app)
    params = (("at", app.at), ("indices", app.params), ("srule", app.rule))
    return MDerivation(
        "Structural", MSequent(new_ant, seq.succedent), (premise,), params
    )


# ---------------------------------------------------------------------------
# checking


def check_m(d: MDerivation) -> bool:
    """Recursively validate a derivation, including its rewrite steps."""
    try:
        return _check_m(d)
    except (InstanceError, SortError, ValueError, IndexError, KeyError):
        return False


def _check_m(d: MDerivation) -> bool:
    if d.rule == "Structural":
        if len(d.premises) != 1:
            return False
        p = d.premises[0].conclusion
        ps = d.params_dict()
        app = RuleApp(ps["srule"], tuple(ps["at"]), tuple(ps["indices"]))
        ok = (
            apply_rule(p.antecedent, app) == d.conclusion.antecedent
            and p.succedent == d.conclusion.succedent
        )
        return ok and _check_m(d.premises[0])
    if d.rule == "Cut":
        if len(d.premises) != 2:
            return False
        p1, p2 = d.premises[0].conclusion, d.premises[1].conclusion
        at = tuple(d.params_dict()["at"])
        ok = (
            subterm_at(p2.antecedent, at) == Leaf(p1.succedent)
            and d.conclusion.antecedent == replace_at(p2.antecedent, at, p1.antecedent)
            and d.conclusion.succedent == p2.succedent
        )
        return ok and all(_check_m(p) for p in d.premises)
    want = m_instance_premises(d.conclusion, d.rule, d.params_dict())
    if tuple(p.conclusion for p in d.premises) != want:
        return False
    return all(_check_m(p) for p in d.premises)


def prove_m(seq: MSequent):
    """Search via the configuration calculus and lift the result."""
    from .bridge import lift
    from .hseq import HSequent, prove
    from .terms import sharp

    found = prove(HSequent(sharp(seq.antecedent), seq.succedent))
    if found is None:
        return None
    return lift(found, target=seq.antecedent)


# ---------------------------------------------------------------------------
# serialization


def m_params_to_obj(params: tuple) -> dict:
    out = {}
    for k, v in params:
        if k == "indices":
            out[k] = {name: val for name, val in v}
        else:
            out[k] = _to_jsonable(v)
    return out


def m_params_from_obj(obj: dict) -> tuple:
    items = []
    for k, v in obj.items():
        if k == "indices":
            items.append((k, tuple(sorted(v.items()))))
        else:
            items.append((k, _from_jsonable(v)))
    return tuple(sorted(items))


def m_derivation_to_obj(d: MDerivation) -> dict:
    return {
        "rule": d.rule,
        "sequent": msequent_str(d.conclusion),
        "params": m_params_to_obj(d.params),
        "premises": [m_derivation_to_obj(p) for p in d.premises],
    }


def m_derivation_from_obj(obj: dict, sig: Signature) -> MDerivation:
    seq = parse_msequent(obj["sequent"], sig)
    premises = tuple(m_derivation_from_obj(p, sig) for p in obj.get("premises", ()))
    return MDerivation(
        obj["rule"], seq, premises, m_params_from_obj(obj.get("params", {}))
    )


def m_derivation_text(d: MDerivation) -> str:
    lines = []

    def go(node, depth):
        ps = ", ".join("%s=%s" % (k, v) for k, v in node.params)
        tag = node.rule + (" " + ps if ps else "")
        lines.append("%s[%s] %s" % ("  " * depth, tag, node.conclusion))
        for p in node.premises:
            go(p, depth + 1)

    go(d, 0)
    return "\n".join(lines)


def m_derivation_latex(d: MDerivation) -> str:
    from .hseq import latex_escape

    def go(node):
        concl = "\\texttt{%s}" % latex_escape(str(node.conclusion))
        prems = " & ".join(go(p) for p in node.premises)
        return "\\infer[\\mathrm{%s}]{%s}{%s}" % (latex_escape(node.rule), concl, prems)

    return go(d)
