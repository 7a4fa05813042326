"""
Congruent substitutive extended pseudometrics (CS-EPMet) on Ω-terms.

A CS-EPMet d on T_Ω X is an extended pseudometric that is

    substitutive   d(σ♯t, σ♯u) ≤ d(t, u)                    for σ : X → T_Ω X
    congruent      d(f(t₁…tₙ), f(u₁…uₙ)) ≤ max_i d(tᵢ, uᵢ)  for f ∈ Ω of arity n

``check_csepmet`` verifies all of this on depth-bounded terms, exhaustively
when the instance product fits the search budget and by seeded sampling
otherwise.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Hashable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from divlog.core.carriers import Carrier
from divlog.core.domains import RPLUS
from divlog.core.search import SearchBudget, bounded_product
from divlog.core.values import ExtendedValue, format_value
from divlog.divergences.base import AxiomReport, DivergenceSpec
from divlog.errors import PreconditionFailed
from divlog.monads.terms import (
    Op,
    OmegaSignature,
    OmegaTerm,
    TermMonad,
    depth,
    enumerate_terms,
    format_term,
    substitute,
)

logger = logging.getLogger(__name__)

Distance = Callable[[OmegaTerm, OmegaTerm], ExtendedValue]

# Substitutions range over terms of at most this depth
SUBSTITUTION_DEPTH = 1


@dataclass(frozen=True)
class CSEPMet:
    """An Rplus-valued distance on the Ω-terms over ``variables``."""

    name: str
    signature: OmegaSignature
    variables: tuple[Hashable, ...]
    distance: Distance

    def __call__(self, t: OmegaTerm, u: OmegaTerm) -> ExtendedValue:
        return RPLUS.require(self.distance(t, u))

    @property
    def carrier(self) -> Carrier:
        return Carrier.of("X", self.variables)

    def terms(self, max_depth: int) -> list[OmegaTerm]:
        return enumerate_terms(self.signature, self.variables, max_depth)


# ── Shipped metrics ───────────────────────────────────────────────────────


def discrete_metric(signature: OmegaSignature, variables: Sequence[Hashable]) -> CSEPMet:
    """0 on syntactically equal terms, 1 elsewhere."""
    return CSEPMet("discrete", signature, tuple(variables),
                   lambda t, u: Fraction(0) if t == u else Fraction(1))


def _agreement(t: OmegaTerm, u: OmegaTerm) -> Fraction:
    if t == u:
        return Fraction(0)
    if isinstance(t, Op) and isinstance(u, Op) and t.symbol == u.symbol and len(t.args) == len(u.args):
        return max(_agreement(a, b) for a, b in zip(t.args, u.args, strict=True)) / 2
    return Fraction(1)


def agreement_ultrametric(signature: OmegaSignature, variables: Sequence[Hashable]) -> CSEPMet:
    """2⁻ⁿ where n is the depth of the shallowest position at which the terms differ."""
    return CSEPMet("agreement", signature, tuple(variables), _agreement)


def depth_weighted(signature: OmegaSignature, variables: Sequence[Hashable]) -> CSEPMet:
    """1 + the larger depth on distinct terms. A pseudometric that is neither substitutive nor congruent."""

    def distance(t: OmegaTerm, u: OmegaTerm) -> Fraction:
        return Fraction(0) if t == u else Fraction(1 + max(depth(t), depth(u)))

    return CSEPMet("depth-weighted", signature, tuple(variables), distance)


METRICS: dict[str, Callable[[OmegaSignature, Sequence[Hashable]], CSEPMet]] = {
    "discrete": discrete_metric,
    "agreement": agreement_ultrametric,
    "depth-weighted": depth_weighted,
}


def get_metric(name: str, signature: OmegaSignature, variables: Sequence[Hashable]) -> CSEPMet:
    try:
        factory = METRICS[name]
    except KeyError as exc:
        raise PreconditionFailed(f"unknown term metric {name!r} (known: {', '.join(METRICS)})") from exc
    return factory(signature, variables)


def pulled_back(spec: DivergenceSpec, variables: Sequence[Hashable]) -> CSEPMet:
    """
    (Δ)_X: the component of a term-monad divergence at the carrier X, at the unit grade.

    Raises:
        PreconditionFailed: ``spec`` is not a divergence on a term monad.
    """
    if not isinstance(spec.monad, TermMonad):
        raise PreconditionFailed(f"{spec.name} is a divergence on {spec.monad.name}, not on a term monad")
    carrier = Carrier.of("X", variables)
    unit = spec.grading.unit
    return CSEPMet(f"({spec.name})_X", spec.monad.signature, tuple(variables),
                   lambda t, u: spec.evaluate(unit, carrier, t, u))


# ── Axiom check ───────────────────────────────────────────────────────────


def _substitutions(d: CSEPMet, budget: SearchBudget) -> list[dict[Hashable, OmegaTerm]]:
    images = d.terms(SUBSTITUTION_DEPTH)
    stream = bounded_product([images] * len(d.variables), budget, "substitutions")
    return [dict(zip(d.variables, choice, strict=True)) for choice in stream.cases]


def check_csepmet(d: CSEPMet, budget: SearchBudget) -> AxiomReport:
    """
    Pseudometric laws, substitutivity and congruence on terms of depth ≤ ``budget.depth``.

    The first violated clause is reported with its witness; ``extras["clause"]`` names it.
    """
    report = AxiomReport(axiom="csepmet")
    terms = d.terms(budget.depth)
    tol = budget.tolerance

    def fail(clause: str, witness: dict, lhs: ExtendedValue, rhs: ExtendedValue) -> AxiomReport:
        report.extras["clause"] = clause
        logger.info("CS-EPMet %s refuted (%s): %s > %s", d.name, clause, format_value(lhs), format_value(rhs))
        return report.refute({"clause": clause, **witness}, lhs, rhs, detail=f"{clause} fails for {d.name}")

    for t in terms:
        report.cases += 1
        if not RPLUS.leq(d(t, t), Fraction(0), tol):
            return fail("reflexivity", {"t": format_term(t)}, d(t, t), Fraction(0))

    pairs = bounded_product([terms, terms], budget, "csepmet-pairs")
    report.exhaustive &= pairs.exhaustive
    for t, u in pairs.cases:
        report.cases += 1
        if not (RPLUS.leq(d(t, u), d(u, t), tol) and RPLUS.leq(d(u, t), d(t, u), tol)):
            return fail("symmetry", {"t": format_term(t), "u": format_term(u)}, d(t, u), d(u, t))

    triples = bounded_product([terms] * 3, budget, "csepmet-triangle")
    report.exhaustive &= triples.exhaustive
    for t, u, v in triples.cases:
        report.cases += 1
        bound = RPLUS.add(d(t, u), d(u, v))
        if not RPLUS.leq(d(t, v), bound, tol):
            witness = {"t": format_term(t), "u": format_term(u), "v": format_term(v)}
            return fail("triangle", witness, d(t, v), bound)

    sigmas = _substitutions(d, budget)
    instances = bounded_product([sigmas, terms, terms], budget, "csepmet-substitutivity")
    report.exhaustive &= instances.exhaustive
    for sigma, t, u in instances.cases:
        report.cases += 1
        lhs = d(substitute(t, sigma), substitute(u, sigma))
        if not RPLUS.leq(lhs, d(t, u), tol):
            witness = {
                "substitution": {str(x): format_term(s) for x, s in sigma.items()},
                "t": format_term(t),
                "u": format_term(u),
            }
            return fail("substitutivity", witness, lhs, d(t, u))

    for symbol, arity in d.signature.arities:
        if arity == 0:
            continue
        args = bounded_product([terms] * (2 * arity), budget, f"csepmet-congruence-{symbol}")
        report.exhaustive &= args.exhaustive
        for choice in args.cases:
            report.cases += 1
            ts, us = choice[:arity], choice[arity:]
            lhs = d(Op(symbol, ts), Op(symbol, us))
            rhs = RPLUS.sup(d(a, b) for a, b in zip(ts, us, strict=True))
            if not RPLUS.leq(lhs, rhs, tol):
                witness = {"operator": symbol, "left": [format_term(a) for a in ts],
                           "right": [format_term(b) for b in us]}
                return fail("congruence", witness, lhs, rhs)

    logger.info("CS-EPMet %s passed on %d cases (exhaustive=%s)", d.name, report.cases, report.exhaustive)
    return report


__all__ = [
    "METRICS",
    "CSEPMet",
    "agreement_ultrametric",
    "check_csepmet",
    "depth_weighted",
    "discrete_metric",
    "get_metric",
    "pulled_back",
]
