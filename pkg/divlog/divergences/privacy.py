"""
Differential-privacy divergences on (sub-)distributions.

    dp      sup_S μ₁(S) − α μ₂(S)               graded by α = e^ε, exact
    pw      μ₁(I \\ A*), A* = {μ₁ ≤ α μ₂}         graded by α = e^ε, exact
    renyi   1/(a−1) log Σ μ₁^a μ₂^{1−a}          1-graded, float
    zcdp    sup_a (R_a − m)/a                    graded by (ℛ⁺, +), float, grid sup
    tcdp    sup_{a<w} R_a / a                    1-graded, float, grid sup

The DP supremum is attained at S* = {x : μ₁(x) > α μ₂(x)}, so no subset search
is needed; ``dp_bruteforce`` keeps the subset search as an oracle.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Hashable, Iterable, Sequence
from fractions import Fraction

import numpy as np

from divlog.core.carriers import Carrier
from divlog.core.domains import (
    ADDITIVE_GRADING,
    PRIVACY_GRADING,
    RPLUS,
    TRIVIAL_GRADING,
)
from divlog.core.values import INF, ExtendedValue, mul, parse_value
from divlog.divergences.base import EQ, CompositionCase, DivergenceSpec
from divlog.errors import ScenarioError
from divlog.monads.base import Monad, TableMap
from divlog.monads.dist import DIST, SUBDIST, Dist, union_support

logger = logging.getLogger(__name__)


# ── Differential privacy ──────────────────────────────────────────────────


def dp_event(alpha: ExtendedValue, mu1: Dist, mu2: Dist) -> frozenset[Hashable]:
    """S* = {x : μ₁(x) > α μ₂(x)}."""
    return frozenset(x for x in mu1.support if mu1.prob(x) > mul(alpha, mu2.prob(x)))


def dp_divergence(alpha: ExtendedValue, mu1: Dist, mu2: Dist) -> ExtendedValue:
    """Δ^DP_α(μ₁, μ₂) = μ₁(S*) − α μ₂(S*)."""
    total: ExtendedValue = Fraction(0)
    for x in dp_event(alpha, mu1, mu2):
        total += mu1.prob(x) - mul(alpha, mu2.prob(x))
    return total


def dp_bruteforce(alpha: ExtendedValue, mu1: Dist, mu2: Dist, carrier: Iterable[Hashable] = ()) -> ExtendedValue:
    """The same supremum by enumerating every event (oracle for small carriers)."""
    keys = union_support(mu1, mu2, carrier=carrier)
    best: ExtendedValue = Fraction(0)
    for size in range(1, len(keys) + 1):
        for event in itertools.combinations(keys, size):
            best = max(best, mu1.measure(event) - mul(alpha, mu2.measure(event)))
    return best


def pointwise_event(alpha: ExtendedValue, mu1: Dist, mu2: Dist, carrier: Iterable[Hashable] = ()) -> frozenset:
    """A* = {x : μ₁(x) ≤ α μ₂(x)}, the largest event on which the ratio bound holds."""
    keys = union_support(mu1, mu2, carrier=carrier)
    return frozenset(x for x in keys if mu1.prob(x) <= mul(alpha, mu2.prob(x)))


def pointwise_dp_divergence(alpha: ExtendedValue, mu1: Dist, mu2: Dist) -> ExtendedValue:
    """Δ^PW_α(μ₁, μ₂) = μ₁ of the complement of A*."""
    return sum(
        (mu1.prob(x) for x in mu1.support if mu1.prob(x) > mul(alpha, mu2.prob(x))),
        Fraction(0),
    )


def dp_spec(monad: Monad = SUBDIST, grades: Sequence[ExtendedValue] = (Fraction(2),)) -> DivergenceSpec:
    return DivergenceSpec(
        name="dp",
        monad=monad,
        grading=PRIVACY_GRADING,
        domain=RPLUS,
        endorelation=EQ,
        evaluator=lambda m, carrier, c1, c2: dp_divergence(m, c1, c2),
        exact=True,
        grades=tuple(grades),
        omega=Carrier.atoms(1),
        witness_kind="dp",
        description="sup over events of μ₁(S) − e^ε μ₂(S)",
    )


def pointwise_counterexample(alpha: Fraction = Fraction(2)) -> CompositionCase:
    """
    The instance on which pointwise DP fails Eq-composability: Δ^PW = 1/10
    before post-processing by f and 82/100 after.
    """
    source, target = Carrier.atoms(3), Carrier.atoms(2)
    mu1 = Dist.of({0: Fraction(1, 10), 1: Fraction(9, 10)})
    mu2 = Dist.of({1: Fraction(9, 10) / alpha, 2: 1 - Fraction(9, 10) / alpha})
    f = TableMap(
        source,
        (
            Dist.of({0: Fraction(1, 10), 1: Fraction(9, 10)}),
            Dist.of({0: Fraction(9, 10), 1: Fraction(1, 10)}),
            Dist.dirac(1),
        ),
        label="f",
    )
    return CompositionCase(alpha, Fraction(1), source, target, mu1, mu2, f, f, label="pointwise-dp")


def pointwise_dp_spec(monad: Monad = DIST, grades: Sequence[ExtendedValue] = (Fraction(2),)) -> DivergenceSpec:
    return DivergenceSpec(
        name="pw",
        monad=monad,
        grading=PRIVACY_GRADING,
        domain=RPLUS,
        endorelation=EQ,
        evaluator=lambda m, carrier, c1, c2: pointwise_dp_divergence(m, c1, c2),
        exact=True,
        grades=tuple(grades),
        known_cases=(pointwise_counterexample(),),
        description="μ₁ mass outside the pointwise-bounded event A*",
    )


# ── Rényi family ──────────────────────────────────────────────────────────


def parse_alpha_grid(text: str) -> list[Fraction]:
    """"start:stop:step" (inclusive) or a comma list of orders > 1."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (Fraction(part) for part in text.split(":"))
            if step <= 0:
                raise ScenarioError("alpha grid step must be positive")
            count = int((stop - start) / step)
            orders = [start + k * step for k in range(count + 1)]
        else:
            orders = [Fraction(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ScenarioError(f"bad alpha grid {text!r}") from exc
    if not orders or any(a <= 1 for a in orders):
        raise ScenarioError("Rényi orders must be > 1")
    return orders


DEFAULT_ALPHA_GRID = parse_alpha_grid("1.125:16:0.125")


def renyi_divergence(order: ExtendedValue, mu1: Dist, mu2: Dist) -> ExtendedValue:
    """R_a(μ₁, μ₂) in nats; ∞ when μ₁ charges a point μ₂ does not."""
    _, p, q = mu1.vectors(mu2)
    if np.any((p > 0) & (q == 0)):
        return INF
    a = float(order)
    mask = p > 0
    total = float(np.sum(p[mask] ** a * q[mask] ** (1.0 - a)))
    if total <= 0.0:
        return float(0.0)
    return max(0.0, float(np.log(total)) / (a - 1.0))


def renyi_curve(mu1: Dist, mu2: Dist, orders: Sequence[ExtendedValue]) -> np.ndarray:
    return np.array([float(renyi_divergence(a, mu1, mu2)) for a in orders], dtype=float)


def zcdp_divergence(m: ExtendedValue, mu1: Dist, mu2: Dist, orders: Sequence[ExtendedValue]) -> ExtendedValue:
    """Grid lower bound of sup_a (R_a − m)/a, clipped at 0."""
    curve = renyi_curve(mu1, mu2, orders)
    if np.isinf(curve).any():
        return INF
    alphas = np.array([float(a) for a in orders], dtype=float)
    return max(0.0, float(np.max((curve - float(m)) / alphas)))


def tcdp_divergence(w: ExtendedValue, mu1: Dist, mu2: Dist, orders: Sequence[ExtendedValue]) -> ExtendedValue:
    """Grid lower bound of sup_{1<a<w} R_a / a, clipped at 0."""
    window = [a for a in orders if a < w]
    if not window:
        return float(0.0)
    curve = renyi_curve(mu1, mu2, window)
    if np.isinf(curve).any():
        return INF
    alphas = np.array([float(a) for a in window], dtype=float)
    return max(0.0, float(np.max(curve / alphas)))


def renyi_spec(order: ExtendedValue, monad: Monad = DIST) -> DivergenceSpec:
    if order <= 1:
        raise ScenarioError("Rényi order must be > 1")
    return DivergenceSpec(
        name=f"renyi({order})",
        monad=monad,
        grading=TRIVIAL_GRADING,
        domain=RPLUS,
        endorelation=EQ,
        evaluator=lambda m, carrier, c1, c2: renyi_divergence(order, c1, c2),
        exact=False,
        description=f"Rényi divergence of order {order}",
    )


def zcdp_spec(orders: Sequence[ExtendedValue] = DEFAULT_ALPHA_GRID, monad: Monad = DIST) -> DivergenceSpec:
    return DivergenceSpec(
        name="zcdp",
        monad=monad,
        grading=ADDITIVE_GRADING,
        domain=RPLUS,
        endorelation=EQ,
        evaluator=lambda m, carrier, c1, c2: zcdp_divergence(m, c1, c2, orders),
        exact=False,
        grades=(Fraction(1, 2),),
        description="zero-concentrated DP (grid lower bound over Rényi orders)",
    )


def tcdp_spec(w: ExtendedValue, orders: Sequence[ExtendedValue] = DEFAULT_ALPHA_GRID,
              monad: Monad = DIST) -> DivergenceSpec:
    if w <= 1:
        raise ScenarioError("tCDP window must be > 1")
    return DivergenceSpec(
        name=f"tcdp({w})",
        monad=monad,
        grading=TRIVIAL_GRADING,
        domain=RPLUS,
        endorelation=EQ,
        evaluator=lambda m, carrier, c1, c2: tcdp_divergence(w, c1, c2, orders),
        exact=False,
        description=f"truncated CDP with window {w} (grid lower bound)",
    )


def parse_order(text: str) -> ExtendedValue:
    value = parse_value(text)
    if value <= 1:
        raise ScenarioError(f"order must be > 1, got {text!r}")
    return value
