"""
Divergences on monads: specifications, the shipped catalogue and axiom checkers.

Only the base types are re-exported here; catalogue entries live in
``divlog.divergences.catalogue`` and the per-family modules.
"""

from divlog.divergences.base import (
    EQ,
    TOP,
    AxiomReport,
    BasicEndorelation,
    CompositionCase,
    DivergenceSpec,
    custom_endorelation,
    eval_divergence,
    parse_endorelation,
)

__all__ = [
    "EQ",
    "TOP",
    "AxiomReport",
    "BasicEndorelation",
    "CompositionCase",
    "DivergenceSpec",
    "custom_endorelation",
    "eval_divergence",
    "parse_endorelation",
]
