"""
Extended values: the elements of divergence domains.

An ExtendedValue is a ``Fraction`` (exact rational), a ``float`` (entropic
quantities, compared with tolerance), or one of the float infinities.
Ints are accepted everywhere and normalised to ``Fraction``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import TypeAlias

ExtendedValue: TypeAlias = Fraction | float

INF: float = math.inf
NEG_INF: float = -math.inf
DEFAULT_TOLERANCE = 1e-9


def to_value(raw: int | Fraction | float | str) -> ExtendedValue:
    """Normalise ints/strings into an ExtendedValue."""
    if isinstance(raw, bool):
        raise TypeError("booleans are not extended values")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, Fraction):
        return raw
    if isinstance(raw, float):
        return raw
    if isinstance(raw, str):
        return parse_value(raw)
    raise TypeError(f"cannot interpret {raw!r} as an extended value")


def parse_value(text: str) -> ExtendedValue:
    """Parse "inf", "-inf", "1/10", "0.25", "3" (decimals parse exactly)."""
    cleaned = text.strip().lower()
    if cleaned in ("inf", "+inf", "infinity", "∞"):
        return INF
    if cleaned in ("-inf", "-infinity", "-∞"):
        return NEG_INF
    if cleaned.startswith("float:"):
        return float(cleaned[len("float:"):])
    try:
        return Fraction(cleaned)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an extended value: {text!r}") from exc


def format_value(value: ExtendedValue) -> str:
    """Stable textual form: "p/q" for rationals, repr for floats."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def is_exact(value: ExtendedValue) -> bool:
    return isinstance(value, (int, Fraction))


def is_finite(value: ExtendedValue) -> bool:
    return is_exact(value) or math.isfinite(value)


def leq(a: ExtendedValue, b: ExtendedValue, tolerance: float = DEFAULT_TOLERANCE) -> bool:
    """a ≤ b; exact between rationals, within ``tolerance`` once a float is involved."""
    if a == b or a <= b:
        return True
    if is_exact(a) and is_exact(b):
        return False
    if not (is_finite(a) and is_finite(b)):
        return False
    return float(a) <= float(b) + tolerance


def approx_equal(a: ExtendedValue, b: ExtendedValue, tolerance: float = DEFAULT_TOLERANCE) -> bool:
    return leq(a, b, tolerance) and leq(b, a, tolerance)


def mul(a: ExtendedValue, b: ExtendedValue) -> ExtendedValue:
    """Product with 0 · ∞ = 0."""
    if a == 0 or b == 0:
        return Fraction(0)
    return a * b


def sub(a: ExtendedValue, b: ExtendedValue) -> ExtendedValue:
    """a − b with ∞ − ∞ resolved to −∞ (the absorbing convention of Z and R)."""
    if not is_finite(a) and not is_finite(b) and a == b:
        return NEG_INF
    return a - b


def exact_if_possible(value: float | Fraction) -> ExtendedValue:
    """Keep rationals exact; keep floats as they are."""
    return value if isinstance(value, Fraction) else float(value)
