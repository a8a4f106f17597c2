"""SAT-based completion of partial LTL specifications from examples."""

from .formulas import (
    Node,
    Sample,
    SatisfactionTable,
    Substitution,
    SyntaxDag,
    apply_substitution,
    build_table,
    check_consistency,
    dag_equal,
    dag_size,
    evaluate,
)
from .sketching import (
    Limits,
    SketchResult,
    complete_incremental,
    complete_via_learning,
    decide_existence,
    generic_consistent_formula,
    learn_minimal,
)
from .textio import format_formula, parse_formula, read_sample, write_sample
from .words import LassoWord, canonicalize, suffix, suffix_equal, symbol, symbol_at

__all__ = [
    "LassoWord",
    "Limits",
    "Node",
    "Sample",
    "SatisfactionTable",
    "SketchResult",
    "Substitution",
    "SyntaxDag",
    "apply_substitution",
    "build_table",
    "canonicalize",
    "check_consistency",
    "complete_incremental",
    "complete_via_learning",
    "dag_equal",
    "dag_size",
    "decide_existence",
    "evaluate",
    "format_formula",
    "generic_consistent_formula",
    "learn_minimal",
    "parse_formula",
    "read_sample",
    "suffix",
    "suffix_equal",
    "symbol",
    "symbol_at",
    "write_sample",
]
