"""
Finite noise mechanisms and the built-in operation implementations.

Continuous samplers are replaced by exact discrete ones:

    geo    x ↦ clamp_[lo,hi](x + N),  N two-sided geometric with ratio α = e^ε
           (exactly ε-DP for adjacent inputs inside the interval)
    lap    (x, b) ↦ x + N_W,  N folded onto [−W, W], ratio α = 1 + 1/b
           (shift-equivariant, so noise slides exactly)
    norm   (x, s) ↦ x + (K − n/2)·2s/√n,  K ~ Bin(n, ½), variance s²
    tick   r ↦ charge r, returning ()

All weights are exact rationals whenever the parameters are.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from scipy.stats import norm as gaussian

from divlog.core.values import ExtendedValue
from divlog.errors import SignatureError, UnsupportedEffect
from divlog.metalang.types import REAL, UNIT, TypeExpr, product
from divlog.monads.base import Monad
from divlog.monads.dist import Dist

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 4
DEFAULT_BINOMIAL_TRIALS = 64


# ── Noise distributions ───────────────────────────────────────────────────


def _ratio(alpha: ExtendedValue) -> ExtendedValue:
    if alpha <= 1:
        raise SignatureError(f"geometric noise needs a ratio above 1, got {alpha}")
    return 1 / alpha


def folded_geometric_noise(alpha: ExtendedValue, window: int) -> Dist:
    """
    Two-sided geometric noise P(k) ∝ α^{−|k|} with the mass beyond ±W moved
    onto ±W.
    """
    q = _ratio(alpha)
    c = (1 - q) / (1 + q)
    weights = {k: c * q ** abs(k) for k in range(-window + 1, window)}
    tail = q**window / (1 + q)
    weights[-window] = tail
    weights[window] = tail
    return Dist.of(weights)


def window_geometric(x: Any, alpha: ExtendedValue, window: int = DEFAULT_WINDOW) -> Dist:
    return folded_geometric_noise(alpha, window).pushforward(lambda k: x + k)


def clamped_geometric(x: Any, alpha: ExtendedValue, lo: int, hi: int) -> Dist:
    """clamp_[lo,hi](x + N) for integral x (inputs outside are clamped first)."""
    if hi - lo < 1:
        raise SignatureError(f"geometric interval [{lo}, {hi}] is empty or a point")
    q = _ratio(alpha)
    c = (1 - q) / (1 + q)
    x = min(max(int(x), lo), hi)
    weights = {y: c * q ** abs(y - x) for y in range(lo + 1, hi)}
    weights[lo] = q ** (x - lo) / (1 + q)
    weights[hi] = q ** (hi - x) / (1 + q)
    return Dist.of(weights)


def centered_binomial(trials: int) -> Dist:
    """K − n/2 for K ~ Bin(n, ½), exact."""
    total = 2**trials
    return Dist.of((Fraction(k) - Fraction(trials, 2), Fraction(math.comb(trials, k), total))
                   for k in range(trials + 1))


def binomial_surrogate(x: Any, scale: Any, trials: int = DEFAULT_BINOMIAL_TRIALS) -> Dist:
    """A discrete stand-in for N(x, s²): x + (K − n/2)·2s/√n; n must be a perfect square."""
    root = math.isqrt(trials)
    if root * root != trials:
        raise SignatureError(f"binomial surrogate needs a square number of trials, got {trials}")
    step = Fraction(scale) * 2 / root
    return centered_binomial(trials).pushforward(lambda k: x + k * step)


# ── Continuous reference values ───────────────────────────────────────────


def gaussian_shift_tv(shift: float, sigma: float) -> float:
    """TV(N(0, σ²), N(shift, σ²)) = 2Φ(shift / 2σ) − 1."""
    return float(2 * gaussian.cdf(abs(shift) / (2 * sigma)) - 1)


def gaussian_central_mass(radius: float, sigma: float) -> float:
    """Pr_{r ~ N(0, σ²)}[|r| < radius]."""
    return float(gaussian.cdf(radius / sigma) - gaussian.cdf(-radius / sigma))


def gaussian_renyi(order: float, shift: float, sigma: float) -> float:
    """Rényi divergence of order a between N(0, σ²) and N(shift, σ²): a·r²/2σ²."""
    return order * shift**2 / (2 * sigma**2)


def gaussian_zcdp(shift: float, sigma: float) -> float:
    return shift**2 / (2 * sigma**2)


# ── Operation implementations ─────────────────────────────────────────────

Kernel = Callable[[Monad | None, Any, Mapping[str, Any]], Any]


@dataclass(frozen=True)
class Mechanism:
    """A named implementation with its default type and parameters."""

    name: str
    domain: TypeExpr
    codomain: TypeExpr
    fn: Kernel = field(repr=False)
    defaults: Mapping[str, Any] = field(default_factory=dict)
    effectful: bool = True


def _probabilistic(monad: Monad | None, dist: Dist) -> Any:
    if monad is None:
        raise UnsupportedEffect("a probabilistic operation needs a monad")
    return monad.lift_distribution(dist)


def _geo(monad: Monad | None, x: Any, params: Mapping[str, Any]) -> Any:
    return _probabilistic(monad, clamped_geometric(x, params["alpha"], int(params["lo"]), int(params["hi"])))


def _lap(monad: Monad | None, arg: Any, params: Mapping[str, Any]) -> Any:
    x, b = arg
    if b <= 0:
        return _probabilistic(monad, Dist.dirac(x))
    return _probabilistic(monad, window_geometric(x, 1 + 1 / Fraction(b), int(params["window"])))


def _norm(monad: Monad | None, arg: Any, params: Mapping[str, Any]) -> Any:
    x, s = arg
    if s == 0:
        return _probabilistic(monad, Dist.dirac(x))
    return _probabilistic(monad, binomial_surrogate(x, abs(s), int(params["trials"])))


def _tick(monad: Monad | None, r: Any, params: Mapping[str, Any]) -> Any:
    if monad is None:
        raise UnsupportedEffect("tick needs a monad")
    return monad.charge(r)


def _binary(fn: Callable[[Any, Any], Any]) -> Kernel:
    return lambda monad, arg, params: fn(arg[0], arg[1])


def _unary(fn: Callable[[Any], Any]) -> Kernel:
    return lambda monad, arg, params: fn(arg)


REAL_PAIR = product(REAL, REAL)

MECHANISMS: dict[str, Mechanism] = {
    m.name: m
    for m in (
        Mechanism("geo", REAL, REAL, _geo, {"alpha": Fraction(2), "lo": 0, "hi": 4}),
        Mechanism("lap", REAL_PAIR, REAL, _lap, {"window": DEFAULT_WINDOW}),
        Mechanism("norm", REAL_PAIR, REAL, _norm, {"trials": DEFAULT_BINOMIAL_TRIALS}),
        Mechanism("tick", REAL, UNIT, _tick),
        Mechanism("add", REAL_PAIR, REAL, _binary(lambda a, b: a + b), effectful=False),
        Mechanism("sub", REAL_PAIR, REAL, _binary(lambda a, b: a - b), effectful=False),
        Mechanism("mul", REAL_PAIR, REAL, _binary(lambda a, b: a * b), effectful=False),
        Mechanism("min", REAL_PAIR, REAL, _binary(min), effectful=False),
        Mechanism("max", REAL_PAIR, REAL, _binary(max), effectful=False),
        Mechanism("neg", REAL, REAL, _unary(lambda a: -a), effectful=False),
        Mechanism("abs", REAL, REAL, _unary(abs), effectful=False),
    )
}


def get_mechanism(name: str) -> Mechanism:
    try:
        return MECHANISMS[name]
    except KeyError as exc:
        raise SignatureError(f"no implementation named {name!r}; known: {', '.join(sorted(MECHANISMS))}") from exc
