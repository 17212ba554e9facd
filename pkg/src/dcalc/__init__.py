"""Workbench for a sorted discontinuous type calculus.

Two presentations of the same logic: sequents over hyperconfigurations with
no structural rules (`hseq`), and sequents over structural terms with an
explicit rewrite system (`mseq` / `terms`).  `bridge` translates derivations
between the two; `cli` is the command-line surface.
"""

from .syntax import (
    Atom,
    DDown,
    DProd,
    DUp,
    HyperConfig,
    Occurrence,
    Over,
    ParseError,
    Prod,
    Separator,
    Signature,
    SortError,
    Under,
    UnitI,
    UnitJ,
    config_str,
    figure,
    flatten,
    parse_config,
    parse_flat,
    parse_type,
    sort_of_config,
    sort_of_type,
    type_str,
    wrap_at,
)
from .terms import (
    BudgetError,
    Cat,
    ConstI,
    ConstJ,
    ExtractionError,
    Leaf,
    RewriteTrace,
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
    term_of_config,
    term_str,
    uniqueness_check,
)
from .hseq import (
    HDerivation,
    HSequent,
    check,
    enumerate_rule_instances,
    parse_hsequent,
    prove,
    prove_all,
)
from .mseq import (
    MDerivation,
    MSequent,
    check_m,
    parse_msequent,
    prove_m,
)
from .bridge import BridgeError, correspondence_check, lift, lower

__all__ = [
    "Atom",
    "BridgeError",
    "BudgetError",
    "Cat",
    "ConstI",
    "ConstJ",
    "DDown",
    "DProd",
    "DUp",
    "ExtractionError",
    "HDerivation",
    "HSequent",
    "HyperConfig",
    "Leaf",
    "MDerivation",
    "MSequent",
    "Occurrence",
    "Over",
    "ParseError",
    "Prod",
    "RewriteTrace",
    "RuleApp",
    "RuleError",
    "Separator",
    "Signature",
    "SortError",
    "Under",
    "UnitI",
    "UnitJ",
    "WrapT",
    "apply_rule",
    "bounded_equiv_oracle",
    "check",
    "check_m",
    "config_str",
    "correspondence_check",
    "enumerate_rule_apps",
    "enumerate_rule_instances",
    "equiv",
    "extract",
    "extractable",
    "figure",
    "flatten",
    "invert_trace",
    "lift",
    "lower",
    "normalize",
    "parse_config",
    "parse_flat",
    "parse_hsequent",
    "parse_msequent",
    "parse_term",
    "parse_type",
    "prove",
    "prove_all",
    "prove_m",
    "sharp",
    "sort_of_config",
    "sort_of_term",
    "sort_of_type",
    "term_of_config",
    "term_str",
    "type_str",
    "uniqueness_check",
    "wrap_at",
]
