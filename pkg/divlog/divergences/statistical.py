"""
Statistical divergences as f-divergences, and the parameter check for their
composability.

    ᶠDiv(μ₁, μ₂) = Σ_x μ₂(x) f(μ₁(x) / μ₂(x))

with 0·f(0/0) = 0 and, where μ₂(x) = 0 < μ₁(x), the contribution μ₁(x)·L for
L = lim_{t→∞} f(t)/t (the ``slope`` of the weight).

``check_fdiv_parameters`` evaluates both inequalities of the sufficient
condition for Eq-composability over Rgamma(γ) on a grid of [0,1]⁴.
"""

from __future__ import annotations

import dataclasses
import logging
from collections.abc import Callable, Hashable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np
from scipy.special import rel_entr, xlogy

from divlog.core.carriers import Carrier
from divlog.core.domains import TRIVIAL_GRADING, rgamma
from divlog.core.values import DEFAULT_TOLERANCE, INF, ExtendedValue, is_exact, is_finite
from divlog.divergences.base import EQ, AxiomReport, DivergenceSpec
from divlog.errors import ScenarioError
from divlog.monads.base import Monad
from divlog.monads.dist import DIST, SUBDIST, Dist, union_support

logger = logging.getLogger(__name__)


# ── Weight functions ──────────────────────────────────────────────────────


@dataclass(frozen=True)
class WeightFunction:
    """
    A weight f with its composability parameters (γ, α, β, β′).

    ``fn`` is numpy-vectorised; ``exact_fn``, when present, maps Fractions to
    Fractions and makes the divergence exact on rational inputs.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    gamma: Fraction = Fraction(0)
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    beta_prime: Fraction = Fraction(0)
    slope: ExtendedValue = INF
    exact_fn: Callable[[Fraction], Fraction] | None = field(default=None, repr=False)

    @property
    def exact(self) -> bool:
        return self.exact_fn is not None

    @property
    def parameters(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return self.gamma, self.alpha, self.beta, self.beta_prime

    def at(self, t: ExtendedValue) -> ExtendedValue:
        if self.exact_fn is not None and is_exact(t):
            return self.exact_fn(Fraction(t))
        return float(self.fn(np.asarray(float(t))))

    def with_parameters(self, **changes: Any) -> WeightFunction:
        """Copy with some of (gamma, alpha, beta, beta_prime) replaced."""
        changes = {k: Fraction(v) for k, v in changes.items()}
        return dataclasses.replace(self, name=f"{self.name}*", **changes)


TV_WEIGHT = WeightFunction(
    name="tv",
    fn=lambda t: np.abs(t - 1.0) / 2.0,
    beta=Fraction(1),
    slope=Fraction(1, 2),
    exact_fn=lambda t: abs(t - 1) / 2,
)

KL_WEIGHT = WeightFunction(
    name="kl",
    fn=lambda t: xlogy(t, t) - t + 1.0,
    alpha=Fraction(-1),
    beta=Fraction(1),
    beta_prime=Fraction(1),
)

HD_WEIGHT = WeightFunction(
    name="hd",
    fn=lambda t: (np.sqrt(t) - 1.0) ** 2 / 2.0,
    alpha=Fraction(-1, 4),
    beta=Fraction(1, 2),
    beta_prime=Fraction(1, 2),
    slope=Fraction(1, 2),
)

CHI2_WEIGHT = WeightFunction(
    name="chi2",
    fn=lambda t: (t - 1.0) ** 2,
    gamma=Fraction(1),
    alpha=Fraction(-2),
    beta=Fraction(2),
    beta_prime=Fraction(2),
    exact_fn=lambda t: (t - 1) ** 2,
)

WEIGHTS: dict[str, WeightFunction] = {w.name: w for w in (TV_WEIGHT, KL_WEIGHT, HD_WEIGHT, CHI2_WEIGHT)}


def dp_weight(alpha: ExtendedValue) -> WeightFunction:
    """max(0, t − α): its f-divergence is the DP divergence at grade α."""
    if is_exact(alpha):
        exact_alpha = Fraction(alpha)
        return WeightFunction(
            name=f"dp({alpha})",
            fn=lambda t: np.maximum(0.0, t - float(exact_alpha)),
            slope=Fraction(1),
            exact_fn=lambda t: max(Fraction(0), t - exact_alpha),
        )
    return WeightFunction(name=f"dp({alpha})", fn=lambda t: np.maximum(0.0, t - alpha), slope=Fraction(1))


def power_weight(order: ExtendedValue) -> WeightFunction:
    """t^a; log(ᶠDiv)/(a − 1) is the Rényi divergence of order a."""
    a = float(order)
    return WeightFunction(name=f"power({order})", fn=lambda t: np.power(t, a))


def get_weight(name: str) -> WeightFunction:
    try:
        return WEIGHTS[name]
    except KeyError as exc:
        raise ScenarioError(f"unknown weight function {name!r} (choose from {sorted(WEIGHTS)})") from exc


# ── Evaluation ────────────────────────────────────────────────────────────


def f_divergence(weight: WeightFunction, mu1: Dist, mu2: Dist, carrier: Iterable[Hashable] = ()) -> ExtendedValue:
    """ᶠDiv(μ₁, μ₂); exact when the weight and all masses are rational."""
    keys = union_support(mu1, mu2, carrier=carrier)
    masses = [(mu1.prob(x), mu2.prob(x)) for x in keys]

    if weight.exact and all(is_exact(p) and is_exact(q) for p, q in masses):
        total = Fraction(0)
        for p, q in masses:
            if q > 0:
                total += q * weight.exact_fn(p / q)
            elif p > 0:
                if not is_finite(weight.slope):
                    return INF
                total += p * weight.slope
        return total

    p = np.array([float(a) for a, _ in masses], dtype=float)
    q = np.array([float(b) for _, b in masses], dtype=float)
    if not is_finite(weight.slope) and np.any((q == 0) & (p > 0)):
        return INF
    terms = perspective(weight, q, p)
    return max(0.0, float(np.sum(terms)))


def perspective(weight: WeightFunction, q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Elementwise q·f(p/q) with 0·f(0/0) = 0 and q = 0 < p giving p·slope."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    positive = q > 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = np.where(positive, p / np.where(positive, q, 1.0), 1.0)
        inner = q * weight.fn(ratio)
        boundary = np.where(p > 0, p * float(weight.slope), 0.0)
    return np.where(positive, inner, boundary)


def tv_distance(mu1: Dist, mu2: Dist) -> ExtendedValue:
    """½ Σ |μ₁ − μ₂| (exact)."""
    keys = union_support(mu1, mu2)
    return sum((abs(mu1.prob(x) - mu2.prob(x)) for x in keys), Fraction(0)) / 2


def kl_divergence(mu1: Dist, mu2: Dist) -> ExtendedValue:
    _, p, q = mu1.vectors(mu2)
    value = float(np.sum(rel_entr(p, q)))
    return INF if np.isinf(value) else max(0.0, value)


def hellinger_distance(mu1: Dist, mu2: Dist) -> ExtendedValue:
    """½ Σ (√μ₁ − √μ₂)²."""
    _, p, q = mu1.vectors(mu2)
    return max(0.0, float(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2) / 2.0))


def chi_square(mu1: Dist, mu2: Dist) -> ExtendedValue:
    """Σ (μ₁ − μ₂)² / μ₂, exact on rational inputs."""
    total: ExtendedValue = Fraction(0)
    for x in union_support(mu1, mu2):
        p, q = mu1.prob(x), mu2.prob(x)
        if q == 0:
            if p > 0:
                return INF
            continue
        total += (p - q) ** 2 / q
    return total


CLOSED_FORMS: dict[str, Callable[[Dist, Dist], ExtendedValue]] = {
    "tv": tv_distance,
    "kl": kl_divergence,
    "hd": hellinger_distance,
    "chi2": chi_square,
}


def renyi_via_power(order: ExtendedValue, mu1: Dist, mu2: Dist) -> ExtendedValue:
    total = f_divergence(power_weight(order), mu1, mu2)
    if not is_finite(total):
        return INF
    if total <= 0:
        return 0.0
    return max(0.0, float(np.log(float(total))) / (float(order) - 1.0))


def fdiv_spec(weight: WeightFunction, monad: Monad | None = None) -> DivergenceSpec:
    """Eq-relative Rgamma(γ)-divergence; TV lives on SubDist, the others on Dist."""
    tv = weight.name == "tv"
    monad = monad or (SUBDIST if tv else DIST)
    return DivergenceSpec(
        name=weight.name,
        monad=monad,
        grading=TRIVIAL_GRADING,
        domain=rgamma(weight.gamma),
        endorelation=EQ,
        evaluator=lambda m, carrier, c1, c2: f_divergence(weight, c1, c2),
        exact=weight.exact,
        omega=Carrier.atoms(2) if tv else None,
        witness_kind="tv" if tv else None,
        description=f"f-divergence with the {weight.name} weight",
    )


# ── Composability parameter check ─────────────────────────────────────────


def _safe_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product with 0 · ∞ = 0."""
    with np.errstate(invalid="ignore"):
        return np.where((a == 0) | (b == 0), 0.0, a * b)


def check_fdiv_parameters(
    weight: WeightFunction,
    step: Fraction = Fraction(1, 10),
    tolerance: float = DEFAULT_TOLERANCE,
) -> AxiomReport:
    """
    Check both parameter inequalities at every point of the grid {0, step, …, 1}⁴.

    Points where an ∞ − ∞ arises are counted as indeterminate and skipped.
    Besides the verdict, ``extras`` carries the worst finite slack and whether
    the parameters also cover sub-distributions (α = 0 and β, β′ ∈ [0, 1]).

    Args:
        weight: Weight function with its (γ, α, β, β′).
        step: Grid step; 1/step must be an integer.
        tolerance: Allowed negative slack (the grid is evaluated in floats).

    Returns:
        AxiomReport named ``fdiv-parameters``.
    """
    step = Fraction(step)
    if step <= 0 or (1 / step).denominator != 1:
        raise ScenarioError(f"grid step {step} does not divide 1")
    n = int(1 / step)
    gamma, alpha, beta, beta_prime = (float(v) for v in weight.parameters)

    axis = np.arange(n + 1, dtype=float) / n
    x, y, z, w = np.meshgrid(axis, axis, axis, axis, indexing="ij")
    pxz = perspective(weight, x, z)
    pyw = perspective(weight, y, w)

    with np.errstate(invalid="ignore", over="ignore"):
        left_coef = beta * w + (1.0 - beta) * y
        right_coef = beta_prime * z + (1.0 - beta_prime) * x
        first_rhs = right_coef + _safe_mul(np.full_like(pxz, gamma), pxz)
        second_lhs = perspective(weight, x * y, z * w)
        second_rhs = (
            _safe_mul(left_coef, pxz)
            + _safe_mul(right_coef, pyw)
            + _safe_mul(np.full_like(pxz, gamma), _safe_mul(pxz, pyw))
            + alpha * (x - z) * (w - y)
        )

    report = AxiomReport(axiom="fdiv-parameters", cases=2 * (n + 1) ** 4)
    indeterminate = 0
    worst = INF
    for index, lhs, rhs in ((1, np.zeros_like(first_rhs), first_rhs), (2, second_lhs, second_rhs)):
        undefined = np.isnan(lhs) | np.isnan(rhs)
        indeterminate += int(np.count_nonzero(undefined))
        with np.errstate(invalid="ignore"):
            slack = np.where(undefined | np.isposinf(rhs), np.inf, rhs - lhs)
        slack = np.where(np.isnan(slack), -np.inf, slack)
        position = np.unravel_index(int(np.argmin(slack)), slack.shape)
        value = float(slack[position])
        worst = min(worst, value)
        if value < -tolerance and report.passed:
            point = {name: Fraction(int(round(float(arr[position]) * n)), n)
                     for name, arr in (("x", x), ("y", y), ("z", z), ("w", w))}
            report.refute({"inequality": index, **point}, float(lhs[position]), float(rhs[position]),
                          detail=f"inequality {index} fails for {weight.name}")

    report.extras = {
        "weight": weight.name,
        "parameters": {"gamma": weight.gamma, "alpha": weight.alpha,
                       "beta": weight.beta, "beta_prime": weight.beta_prime},
        "points": (n + 1) ** 4,
        "indeterminate": indeterminate,
        "worst_slack": worst,
        "subdist": weight.alpha == 0 and all(0 <= b <= 1 for b in (weight.beta, weight.beta_prime)),
    }
    logger.info("f-divergence parameters: weight=%s verdict=%s worst_slack=%.3g indeterminate=%d",
                weight.name, report.verdict, worst, indeterminate)
    return report
