"""
Transfer of divergences along monad opfunctors.

A monad opfunctor (p, λ) from S to T′ gives, for every divergence Δ on T′,
the divergence Δ^{p,λ}_I(ν₁, ν₂) = Δ_{pI}(λ_I ν₁, λ_I ν₂) on S. The two
opfunctor diagrams are checked on generated samples before transferring:

    λ_I(η^S x)   = η^{T′}(p x)
    λ_J(f♯ c)    = (λ_J ∘ f ∘ p⁻¹)♯ (λ_I c)
"""

from __future__ import annotations

import dataclasses
import logging
from collections.abc import Callable, Hashable
from dataclasses import dataclass
from typing import Any

from divlog.core.carriers import Carrier
from divlog.core.search import SearchBudget, bounded_product
from divlog.divergences.base import AxiomReport, DivergenceSpec
from divlog.errors import OpfunctorLawViolation, PreconditionFailed
from divlog.monads.base import Monad
from divlog.monads.dist import DIST, SUBDIST

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MonadOpfunctor:
    """(p, λ): carrier map p with its element action, and λ_I : p(S I) → T′(p I)."""

    name: str
    source: Monad
    target: Monad
    carrier_map: Callable[[Carrier], Carrier]
    element_map: Callable[[Carrier, Hashable], Hashable]
    transform: Callable[[Carrier, Any], Any]

    def inverse(self, carrier: Carrier) -> dict[Hashable, Hashable]:
        table: dict[Hashable, Hashable] = {}
        for x in carrier:
            image = self.element_map(carrier, x)
            if image in table:
                raise PreconditionFailed(f"{self.name}: carrier map is not injective on {carrier.name}")
            table[image] = x
        return table


def identity_opfunctor(
    name: str, source: Monad, target: Monad, transform: Callable[[Carrier, Any], Any] | None = None
) -> MonadOpfunctor:
    return MonadOpfunctor(
        name=name,
        source=source,
        target=target,
        carrier_map=lambda carrier: carrier,
        element_map=lambda carrier, x: x,
        transform=transform or (lambda carrier, c: c),
    )


def dist_inclusion() -> MonadOpfunctor:
    """D ↪ D_s: every distribution is a sub-distribution."""
    return identity_opfunctor("dist<subdist", DIST, SUBDIST)


def check_opfunctor_laws(
    op: MonadOpfunctor, budget: SearchBudget, carrier: Carrier | None = None
) -> AxiomReport:
    """Check both opfunctor diagrams on the grid (sampled beyond max_cases)."""
    carrier = carrier or Carrier.atoms(min(budget.max_carrier, 2))
    report = AxiomReport(axiom="opfunctor")
    image = op.carrier_map(carrier)
    back = op.inverse(carrier)

    for x in carrier:
        report.cases += 1
        lhs = op.transform(carrier, op.source.unit(x))
        rhs = op.target.unit(op.element_map(carrier, x))
        if not op.target.equal(lhs, rhs):
            return report.refute({"diagram": "unit", "x": x}, lhs, rhs)

    elements = op.source.elements(carrier, budget)
    maps = op.source.kleisli_maps(carrier, carrier, budget)
    stream = bounded_product([elements, maps], budget, f"opfunctor:{op.name}")
    report.exhaustive = stream.exhaustive
    for c, f in stream.cases:
        report.cases += 1
        lhs = op.transform(carrier, op.source.bind(c, f))
        rhs = op.target.bind(
            op.transform(carrier, c), lambda y, f=f: op.transform(carrier, f(back[y]))
        )
        if not op.target.equal(lhs, rhs):
            return report.refute({"diagram": "multiplication", "c": c, "f": f}, lhs, rhs)

    logger.info("Opfunctor laws: op=%s cases=%d carrier=%s", op.name, report.cases, image.name)
    return report


def opfunctor_transfer(
    spec: DivergenceSpec, op: MonadOpfunctor, budget: SearchBudget | None = None
) -> DivergenceSpec:
    """
    Transfer ``spec`` (a divergence on T′) to the source monad S of ``op``.

    Raises:
        OpfunctorLawViolation: if a sampled opfunctor diagram fails.
    """
    if spec.monad.name != op.target.name:
        raise PreconditionFailed(f"{spec.name} lives on {spec.monad.name}, not {op.target.name}")
    report = check_opfunctor_laws(op, budget or SearchBudget(grid_denom=2))
    if report.refuted:
        raise OpfunctorLawViolation(
            f"{op.name} violates the {report.witness['diagram']} diagram",
            witness={**report.witness, "lhs": report.lhs, "rhs": report.rhs},
        )

    def evaluator(m: Any, carrier: Carrier, c1: Any, c2: Any) -> Any:
        return spec.evaluate(m, op.carrier_map(carrier), op.transform(carrier, c1),
                             op.transform(carrier, c2))

    return dataclasses.replace(
        spec,
        name=f"{spec.name}^{op.name}",
        monad=op.source,
        evaluator=evaluator,
        known_cases=(),
        description=f"{spec.name} transferred along {op.name}",
    )

