"""
Approximate computational relational logic: assertions, judgments and
derivation checking.
"""

from divlog.acrl.assertions import (
    Assertion,
    AssertionBuilder,
    Lift,
    basic_assertion,
    bottom,
    build_assertion,
    equality,
    exponential,
    includes,
    lifted,
    top,
)
from divlog.acrl.derivation import RULES, DerivationReport, DerivationScript, Step, derive
from divlog.acrl.judgments import (
    Judgment,
    JudgmentVerdict,
    axiom_effectful,
    judge_semantic,
    make_judgment,
    sup_over,
)

__all__ = [
    "RULES",
    "Assertion",
    "AssertionBuilder",
    "DerivationReport",
    "DerivationScript",
    "Judgment",
    "JudgmentVerdict",
    "Lift",
    "Step",
    "axiom_effectful",
    "basic_assertion",
    "bottom",
    "build_assertion",
    "derive",
    "equality",
    "exponential",
    "includes",
    "judge_semantic",
    "lifted",
    "make_judgment",
    "sup_over",
    "top",
]
