"""Command-line front end.

One command per process: prove / check / sharp / termof / equiv / extract /
normalize / parse.  Exit codes: 0 for provable, valid or true; 1 for the
negative outcome; 2 for malformed input; 3 when an extraction precondition
fails.  JSON output is deterministic (sorted keys, two-space indent).
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys

from .hseq import (
    HSequent,
    check,
    derivation_from_obj,
    derivation_latex,
    derivation_text,
    derivation_to_obj,
    latex_escape,
    parse_hsequent,
    prove,
    prove_all,
)
from .mseq import (
    check_m,
    m_derivation_from_obj,
    m_derivation_latex,
    m_derivation_text,
    m_derivation_to_obj,
    parse_msequent,
    prove_m,
)
from .syntax import (
    HyperConfig,
    ParseError,
    Signature,
    SortError,
    config_str,
    figure,
    parse_config,
    parse_type,
)
from .terms import (
    BudgetError,
    ExtractionError,
    equiv,
    extract,
    normalize,
    parse_term,
    sharp,
    term_of_config,
    term_str,
    trace_to_obj,
)


class _OpenSignature(Signature):
    """Signature used when no --sig file is given: unknown atoms get sort 0."""

    def sort(self, name: str) -> int:
        return self.atoms.get(name, 0)

    def __contains__(self, name: str) -> bool:
        return True


def _load_sig(args) -> Signature:
    if args.sig:
        return Signature.from_file(args.sig)
    return _OpenSignature()


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _emit_scalar(args, key: str, value) -> None:
    if args.out == "json":
        _emit_json({key: value})
    elif args.out == "latex":
        print("\\texttt{%s}" % latex_escape(str(value)))
    else:
        print(value)


def _parse_path(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ParseError("bad path %r; expected comma-separated integers" % text)


def trace_text(trace) -> str:
    lines = ["start %s" % term_str(trace.start)]
    for step in trace.steps:
        lines.append("=> [%s] %s" % (step.app, term_str(step.result)))
    return "\n".join(lines)


def _emit_trace(args, trace) -> None:
    if args.out == "json":
        _emit_json(trace_to_obj(trace))
    elif args.out == "latex":
        body = "\\\\\n".join(latex_escape(line) for line in trace_text(trace).splitlines())
        print("\\begin{tabular}{l}\n%s\n\\end{tabular}" % body)
    else:
        print(trace_text(trace))


# ---------------------------------------------------------------------------
# commands


def cmd_prove(args) -> int:
    sig = _load_sig(args)
    if args.calculus == "hd":
        seq = parse_hsequent(args.sequent, sig)
        d = prove(seq)
        render = (derivation_text, derivation_to_obj, derivation_latex)
    else:
        seq = parse_msequent(args.sequent, sig)
        d = prove_m(seq)
        render = (m_derivation_text, m_derivation_to_obj, m_derivation_latex)
    if d is None:
        print("unprovable: %s" % args.sequent, file=sys.stderr)
        return 1
    if args.out == "json":
        _emit_json(render[1](d))
    elif args.out == "latex":
        print(render[2](d))
    else:
        print(render[0](d))
    return 0


def _first_violation(d, ok):
    """Deepest node whose premise subtrees pass but whose own inference fails."""
    for p in d.premises:
        bad = _first_violation(p, ok)
        if bad is not None:
            return bad
    return None if ok(d) else d


def cmd_check(args) -> int:
    sig = _load_sig(args)
    with open(args.file, "r", encoding="utf-8") as handle:
        obj = json.load(handle)
    if args.calculus == "hd":
        d = derivation_from_obj(obj, sig)
        ok = check
    else:
        d = m_derivation_from_obj(obj, sig)
        ok = check_m
    if ok(d):
        _emit_scalar(args, "valid", "ok")
        return 0
    bad = _first_violation(d, ok)
    print("violation at [%s] %s" % (bad.rule, bad.conclusion), file=sys.stderr)
    return 1


def cmd_sharp(args) -> int:
    sig = _load_sig(args)
    t = parse_term(args.term, sig)
    _emit_scalar(args, "config", config_str(sharp(t)))
    return 0


def cmd_termof(args) -> int:
    sig = _load_sig(args)
    cfg = parse_config(args.config, sig)
    _emit_scalar(args, "term", term_str(term_of_config(cfg)))
    return 0


def cmd_equiv(args) -> int:
    sig = _load_sig(args)
    t1 = parse_term(args.term1, sig)
    t2 = parse_term(args.term2, sig)
    same = equiv(t1, t2)
    if args.out == "json":
        _emit_json({"equiv": same})
    else:
        _emit_scalar(args, "equiv", "true" if same else "false")
    return 0 if same else 1


def cmd_extract(args) -> int:
    sig = _load_sig(args)
    t = parse_term(args.term, sig)
    at = _parse_path(args.at)
    rng = random.Random(args.seed) if args.seed is not None else None
    rest, index, trace = extract(t, at, rng)
    if args.out == "json":
        _emit_json(
            {"index": index, "rest": term_str(rest), "trace": trace_to_obj(trace)}
        )
    else:
        print("index %d" % index)
        print("rest %s" % term_str(rest))
        _emit_trace(args, trace)
    return 0


def cmd_normalize(args) -> int:
    sig = _load_sig(args)
    t = parse_term(args.term, sig)
    trace = normalize(t, budget=args.budget)
    _emit_trace(args, trace)
    return 0


def load_lexicon(path: str):
    """Read a lexicon file: a %% signature section and a %% lexicon section."""
    sig_lines = []
    entry_lines = []
    section = None
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("%%"):
                name = line[2:].strip().lower()
                if name not in ("signature", "lexicon"):
                    raise ParseError("line %d: unknown section %r" % (lineno, name))
                section = name
                continue
            if section == "signature":
                sig_lines.append(line)
            elif section == "lexicon":
                entry_lines.append((lineno, line))
            else:
                raise ParseError("line %d: text before any %%%% section" % lineno)
    sig = Signature.from_text("\n".join(sig_lines))
    entries = {}
    for lineno, line in entry_lines:
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise ParseError("line %d: expected 'word<TAB>type'" % lineno)
        word, type_text = parts
        entries.setdefault(word, []).append(parse_type(type_text, sig))
    return sig, entries


def cmd_parse(args) -> int:
    sig, entries = load_lexicon(args.lexicon)
    goal = parse_type(args.type, sig)
    words = args.sentence.split()
    for word in words:
        if word not in entries:
            raise ParseError("word %r not in lexicon" % word)
    if args.config is not None:
        antecedents = [parse_config(args.config, sig)]
    else:
        antecedents = []
        for assignment in itertools.product(*(entries[w] for w in words)):
            items = ()
            for t in assignment:
                items = items + figure(t).items
            antecedents.append(HyperConfig(items))
    derivations = []
    for ant in antecedents:
        derivations.extend(prove_all(HSequent(ant, goal), limit=args.limit))
    if args.out == "json":
        _emit_json(
            {
                "readings": len(derivations),
                "derivations": [derivation_to_obj(d) for d in derivations],
            }
        )
    else:
        print("%d reading(s)" % len(derivations))
        for d in derivations:
            if args.out == "latex":
                print(derivation_latex(d))
            else:
                print(derivation_text(d))
    return 0 if derivations else 1


# ---------------------------------------------------------------------------
# argument wiring


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sig", metavar="FILE", help="signature file: 'name sort' lines")
    common.add_argument(
        "--out", choices=("text", "json", "latex"), default="text", help="output format"
    )

    ap = argparse.ArgumentParser(
        prog="dcalc",
        description="workbench for a sorted discontinuous type calculus",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", parents=[common], help="search for a derivation")
    p.add_argument("calculus", choices=("hd", "md"))
    p.add_argument("sequent", help="'config => type' for hd, 'term -> type' for md")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", parents=[common], help="validate a derivation file")
    p.add_argument("calculus", choices=("hd", "md"))
    p.add_argument("file", help="derivation in the JSON schema emitted by prove")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sharp", parents=[common], help="configuration denoted by a term")
    p.add_argument("term")
    p.set_defaults(func=cmd_sharp)

    p = sub.add_parser("termof", parents=[common], help="canonical term of a configuration")
    p.add_argument("config")
    p.set_defaults(func=cmd_termof)

    p = sub.add_parser("equiv", parents=[common], help="do two terms denote the same configuration")
    p.add_argument("term1")
    p.add_argument("term2")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("extract", parents=[common], help="pull a leaf to the top as a wrap")
    p.add_argument("term")
    p.add_argument("--at", default="", help="leaf path, e.g. 0,1 (0 = left, 1 = right)")
    p.add_argument("--seed", type=int, default=None, help="randomize the rewrite route")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("normalize", parents=[common], help="rewrite a term to canonical form")
    p.add_argument("term")
    p.add_argument("--budget", type=int, default=10000, help="max rewrite steps")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("parse", parents=[common], help="parse a sentence with a lexicon")
    p.add_argument("lexicon", help="file with %%%% signature and %%%% lexicon sections")
    p.add_argument("sentence", help="whitespace-separated words; may be empty")
    p.add_argument("type", help="target type")
    p.add_argument("--limit", type=int, default=16, help="max readings per subgoal")
    p.add_argument(
        "--config",
        default=None,
        help="explicit antecedent configuration (overrides figure concatenation)",
    )
    p.set_defaults(func=cmd_parse)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ExtractionError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    except (ParseError, SortError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except BudgetError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (OSError, KeyError, TypeError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
