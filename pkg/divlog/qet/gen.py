"""
Gen and (−)_X: from a CS-EPMet on T_Ω X to an X-generated divergence on T_Ω and back.

    Gen d_I(c₁, c₂) = sup_{k : I → T_Ω X} d(k♯c₁, k♯c₂)

The sup ranges over maps into terms of depth ≤ ``gen_depth``, so every value
is a lower bound of the unbounded sup. It is exact whenever substitutivity
makes k = η_X (or any injective renaming) a maximiser, which covers the
shipped metrics.
"""

from __future__ import annotations

import logging
from collections.abc import Hashable, Sequence

from divlog.core.carriers import Carrier, atom_carriers
from divlog.core.domains import RPLUS, TRIVIAL_GRADING
from divlog.core.search import SearchBudget, bounded_product
from divlog.core.values import ExtendedValue
from divlog.divergences.base import EQ, AxiomReport, DivergenceSpec
from divlog.monads.terms import OmegaTerm, TermMonad, depth, format_term, substitute
from divlog.monads.terms import variables as term_variables
from divlog.qet.metrics import CSEPMet, pulled_back

logger = logging.getLogger(__name__)


def gen(d: CSEPMet, carrier: Carrier, t1: OmegaTerm, t2: OmegaTerm, budget: SearchBudget,
        gen_depth: int = 1) -> ExtendedValue:
    """
    Gen d at the carrier I, for two terms over I.

    Only the variables that occur in ``t1`` or ``t2`` matter, so the maps k are
    enumerated on those alone.
    """
    for t in (t1, t2):
        for x in term_variables(t):
            carrier.require(x)
    occurring = [x for x in carrier.elements if x in term_variables(t1) | term_variables(t2)]
    images = d.terms(gen_depth)
    maps = bounded_product([images] * len(occurring), budget, f"gen-{d.name}")
    best = RPLUS.bottom
    for choice in maps.cases:
        k = dict(zip(occurring, choice, strict=True))
        best = RPLUS.join(best, d(substitute(t1, k), substitute(t2, k)))
    return best


def gen_divergence(d: CSEPMet, budget: SearchBudget, gen_depth: int = 1) -> DivergenceSpec:
    """Gen d as a catalogue entry on T_Ω, generated by the carrier X."""
    return DivergenceSpec(
        name=f"Gen({d.name})",
        monad=TermMonad(d.signature, max_depth=budget.depth),
        grading=TRIVIAL_GRADING,
        domain=RPLUS,
        endorelation=EQ,
        evaluator=lambda m, carrier, c1, c2: gen(d, carrier, c1, c2, budget, gen_depth),
        exact=False,
        omega=d.carrier,
        description=f"the X-generated divergence of the term metric {d.name}",
    )


def _instances(spec: DivergenceSpec, budget: SearchBudget, max_depth: int) -> list[tuple[Carrier, OmegaTerm, OmegaTerm]]:
    found = []
    monad = spec.monad
    for carrier in atom_carriers(budget.max_carrier):
        terms = [t for t in monad.elements(carrier, budget) if depth(t) <= max_depth]
        found.extend((carrier, t, u) for t in terms for u in terms)
    return found


def round_trip(spec: DivergenceSpec, names: Sequence[Hashable], budget: SearchBudget,
               max_depth: int = 2, gen_depth: int = 1) -> AxiomReport:
    """
    Compare Gen((Δ)_X) with Δ on every pair of terms of depth ≤ ``max_depth`` over
    the atom carriers up to ``budget.max_carrier``.
    """
    report = AxiomReport(axiom="gen-round-trip")
    rebuilt = pulled_back(spec, names)
    instances = _instances(spec, budget, max_depth)
    stream = bounded_product([instances], budget, "gen-round-trip")
    report.exhaustive = stream.exhaustive
    unit = spec.grading.unit
    for (carrier, t, u), in stream.cases:
        report.cases += 1
        expected = spec.evaluate(unit, carrier, t, u)
        actual = gen(rebuilt, carrier, t, u, budget, gen_depth)
        if not (RPLUS.leq(actual, expected, budget.tolerance) and RPLUS.leq(expected, actual, budget.tolerance)):
            witness = {"carrier": carrier.name, "t": format_term(t), "u": format_term(u)}
            logger.info("Round trip of %s differs at %s", spec.name, witness)
            return report.refute(witness, actual, expected, detail="Gen((Δ)_X) differs from Δ")
    logger.info("Round trip of %s holds on %d instances", spec.name, report.cases)
    return report


__all__ = ["gen", "gen_divergence", "round_trip"]
