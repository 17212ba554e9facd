"""Structural terms: rewriting, translation to configurations, extraction."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcalc.syntax import Atom, Signature, SortError, config_str, flatten, parse_config
from dcalc.terms import (
    BudgetError,
    Cat,
    ConstI,
    ConstJ,
    ExtractionError,
    Leaf,
    RuleApp,
    RuleError,
    WrapT,
    apply_rule,
    bounded_equiv_oracle,
    enumerate_rule_apps,
    equiv,
    extract,
    extractable,
    invert_trace,
    normalize,
    parse_term,
    sharp,
    sort_of_term,
    subterm_at,
    term_of_config,
    term_of_config_with_addr,
    term_str,
    trace_from_obj,
    trace_to_obj,
    uniqueness_check,
)

from helpers import random_config, random_term

SIG = Signature.from_text("a 0\nb 2\nc 0\nd 2\ne 1\n")
ATOMS = (("a", 0), ("c", 0), ("e", 1), ("b", 2))

A = Leaf(Atom("a", 0))
C = Leaf(Atom("c", 0))
E = Leaf(Atom("e", 1))
B = Leaf(Atom("b", 2))


def run(trace):
    """Replay a trace step by step; returns the final term."""
    cur = trace.start
    for step in trace.steps:
        cur = apply_rule(cur, step.app)
        assert cur == step.result
    return cur


# ---------------------------------------------------------------------------
# the term grammar


def test_parse_term_examples():
    assert parse_term("II", SIG) == ConstI()
    assert parse_term("JJ", SIG) == ConstJ()
    assert parse_term("a", SIG) == A
    assert parse_term("(a + c)", SIG) == Cat(A, C)
    assert parse_term("(e +1 c)", SIG) == WrapT(1, E, C)
    assert parse_term("((JJ + a) +1 c)", SIG) == WrapT(1, Cat(ConstJ(), A), C)


def test_parse_term_rejects_bad_wraps():
    with pytest.raises(SortError):
        parse_term("(a +1 c)", SIG)
    with pytest.raises(SortError):
        parse_term("(b +3 c)", SIG)


@settings(max_examples=200)
@given(st.integers(0, 10**9))
def test_term_print_parse_round_trip(seed):
    rng = random.Random(seed)
    t = random_term(rng, ATOMS, 4)
    assert parse_term(term_str(t), SIG) == t


# ---------------------------------------------------------------------------
# sharp and the canonical term of a configuration


def test_sharp_examples():
    assert config_str(sharp(ConstI())) == "Lambda"
    assert config_str(sharp(ConstJ())) == "[]"
    assert config_str(sharp(Cat(ConstI(), A))) == "a"
    assert config_str(sharp(WrapT(1, E, A))) == "0:e,a,1:e"
    assert config_str(sharp(WrapT(2, B, Cat(A, C)))) == "0:b,[],1:b,a,c,2:b"


def test_term_of_config_is_cons_shaped():
    assert term_str(term_of_config(parse_config("Lambda", SIG))) == "II"
    assert term_str(term_of_config(parse_config("a,c", SIG))) == "(a + (c + II))"
    assert (
        term_str(term_of_config(parse_config("0:e,[],1:e", SIG)))
        == "((e +1 (JJ + II)) + II)"
    )


def test_term_of_config_with_addr_returns_leaf_path():
    cfg = parse_config("a,0:e,c,1:e", SIG)
    t, path = term_of_config_with_addr(cfg, (1,))
    assert subterm_at(t, path) == E
    assert flatten(sharp(t)) == flatten(cfg)


@settings(max_examples=200)
@given(st.integers(0, 10**9))
def test_sharp_splits_term_of_config(seed):
    rng = random.Random(seed)
    cfg = random_config(rng, ATOMS)
    assert sharp(term_of_config(cfg)) == cfg


# ---------------------------------------------------------------------------
# the rewrite rules


def test_unit_rules():
    assert apply_rule(A, RuleApp("UnitI-L-add", ())) == Cat(ConstI(), A)
    assert apply_rule(Cat(ConstI(), A), RuleApp("UnitI-L-drop", ())) == A
    assert apply_rule(A, RuleApp("UnitI-R-add", ())) == Cat(A, ConstI())
    assert apply_rule(A, RuleApp("UnitJ-L-add", ())) == WrapT(1, ConstJ(), A)
    got = apply_rule(B, RuleApp("UnitJ-i-add", (), (("i", 2),)))
    assert got == WrapT(2, B, ConstJ())
    assert apply_rule(got, RuleApp("UnitJ-i-drop", ())) == B


def test_unit_rule_shape_errors():
    with pytest.raises(RuleError):
        apply_rule(A, RuleApp("UnitI-L-drop", ()))
    with pytest.raises(RuleError):
        apply_rule(A, RuleApp("UnitJ-i-add", ()))  # the index is required
    with pytest.raises(RuleError):
        apply_rule(E, RuleApp("UnitJ-i-add", (), (("i", 2),)))


def test_continuous_associativity():
    t = Cat(Cat(A, C), E)
    fwd = apply_rule(t, RuleApp("AsscC-fwd", ()))
    assert fwd == Cat(A, Cat(C, E))
    assert apply_rule(fwd, RuleApp("AsscC-bwd", ())) == t


def test_split_wrap():
    t = Cat(E, A)
    left = apply_rule(t, RuleApp("SW-left-fwd", ()))
    assert left == WrapT(1, Cat(ConstJ(), A), E)
    assert apply_rule(left, RuleApp("SW-left-bwd", ())) == t
    right = apply_rule(t, RuleApp("SW-right-fwd", ()))
    assert right == WrapT(2, Cat(E, ConstJ()), A)
    assert apply_rule(right, RuleApp("SW-right-bwd", ())) == t


def test_discontinuous_associativity():
    t = WrapT(2, B, WrapT(1, E, A))
    fwd = apply_rule(t, RuleApp("AsscD1", ()))
    assert fwd == WrapT(2, WrapT(2, B, E), A)
    assert apply_rule(fwd, RuleApp("AsscD2", ())) == t


def test_mixed_permutation_disjoint_right():
    # outer wrap point strictly right of the inner operand's span
    t = WrapT(1, WrapT(1, B, A), E)
    got = apply_rule(t, RuleApp("MixPerm1-fwd", ()))
    assert got == WrapT(1, WrapT(2, B, E), A)
    assert apply_rule(got, RuleApp("MixPerm1-bwd", ())) == t


def test_mixed_permutation_disjoint_left():
    t = WrapT(1, WrapT(2, B, A), E)
    got = apply_rule(t, RuleApp("MixPerm2-fwd", ()))
    assert got == WrapT(2, WrapT(1, B, E), A)
    assert apply_rule(got, RuleApp("MixPerm2-bwd", ())) == t


def test_mixed_permutation_guards():
    overlapping = WrapT(1, WrapT(1, B, E), A)  # the wrap point falls inside
    with pytest.raises(RuleError):
        apply_rule(overlapping, RuleApp("MixPerm1-fwd", ()))
    with pytest.raises(RuleError):
        apply_rule(overlapping, RuleApp("MixPerm2-fwd", ()))
    assert apply_rule(overlapping, RuleApp("AsscD2", ())) == WrapT(1, B, WrapT(1, E, A))


def test_apply_rule_at_path_and_param_mismatch():
    t = Cat(Cat(ConstI(), A), C)
    got = apply_rule(t, RuleApp("UnitI-L-drop", (0,)))
    assert got == Cat(A, C)
    with pytest.raises(RuleError):
        apply_rule(B, RuleApp("UnitJ-i-add", (), (("i", 9),)))


def test_enumerated_apps_apply_and_invert():
    rng = random.Random(5)
    for _ in range(60):
        t = random_term(rng, ATOMS, 4)
        for app in enumerate_rule_apps(t):
            s = apply_rule(t, app)
            assert flatten(sharp(s)) == flatten(sharp(t))


# ---------------------------------------------------------------------------
# normalisation and traces


def test_normalize_reaches_canonical_form():
    t = WrapT(1, Cat(ConstJ(), A), C)
    tr = normalize(t)
    assert tr.start == t
    end = run(tr)
    assert end == term_of_config(sharp(t))


def test_normalize_budget():
    t = Cat(Cat(A, C), Cat(A, C))
    with pytest.raises(BudgetError):
        normalize(t, budget=1)


def test_invert_trace_replays_backwards():
    rng = random.Random(11)
    for _ in range(40):
        t = random_term(rng, ATOMS, 4)
        tr = normalize(t)
        back = invert_trace(tr)
        assert back.start == run(tr)
        assert run(back) == t


def test_trace_serialization_round_trip():
    tr = normalize(WrapT(1, Cat(ConstJ(), A), C))
    obj = trace_to_obj(tr)
    assert trace_from_obj(obj, SIG) == tr
    text = json.dumps(obj, indent=2, sort_keys=True)
    assert json.loads(text) == obj


# ---------------------------------------------------------------------------
# equivalence


def test_equiv_examples():
    assert equiv(Cat(ConstI(), A), A)
    assert equiv(WrapT(1, ConstJ(), A), A)
    assert equiv(Cat(Cat(A, C), E), Cat(A, Cat(C, E)))
    assert not equiv(A, C)
    assert not equiv(Cat(A, C), Cat(C, A))


def test_bounded_oracle_small_cases():
    assert bounded_equiv_oracle(Cat(ConstI(), A), A, depth=2)
    assert bounded_equiv_oracle(A, Cat(ConstI(), A), depth=2)
    assert not bounded_equiv_oracle(A, C, depth=3, max_expansions=2000)
    # one step is not enough to both add and drop a unit
    assert not bounded_equiv_oracle(Cat(ConstI(), A), Cat(A, ConstI()), depth=1)


# ---------------------------------------------------------------------------
# extraction


def test_extract_identity_case():
    t = WrapT(1, E, A)
    rest, i, tr = extract(t, (1,))
    assert rest == E and i == 1 and tr.steps == ()


def test_extract_through_rewrites():
    t = Cat(A, WrapT(1, E, C))
    rest, i, tr = extract(t, (1, 1))
    assert tr.start == t
    end = run(tr)
    assert end == WrapT(i, rest, C)
    assert flatten(sharp(end)) == flatten(sharp(t))


def test_extractable_matches_extract():
    t = Cat(A, WrapT(1, E, C))
    assert extractable(t, (1, 1)) == 1
    assert extractable(t, (1, 0)) is None
    with pytest.raises(ExtractionError):
        extract(t, (1, 0))


def test_uniqueness_check_on_extractable_pair():
    t = Cat(A, WrapT(1, E, C))
    assert uniqueness_check(t, (1, 1), trials=5, seed=3)
