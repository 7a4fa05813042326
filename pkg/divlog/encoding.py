"""
JSON-safe encoding of divlog values.

Rationals become "p/q" strings, infinities "inf"/"-inf", tuples lists. Monadic
values carry a one-key tag ({"dist": …}, {"cost": …}, …) so reports can be
read back into the same objects for witness replay.
"""

from __future__ import annotations

import json
import math
from collections.abc import Hashable, Mapping
from fractions import Fraction
from typing import Any

from divlog.core.carriers import Carrier
from divlog.core.values import format_value, parse_value
from divlog.errors import ScenarioError
from divlog.monads.base import Monad, TableMap
from divlog.monads.cost import CostComp, CostMonad, CostSet, CostSetMonad, DistCostMonad
from divlog.monads.dist import Dist, DistMonad
from divlog.monads.state import StateFn, StateMonad
from divlog.monads.terms import Op, Var, format_term


def encode(value: Any) -> Any:
    """Convert a value into plain JSON data (deterministic)."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return format_value(value)
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return format_value(value) if not math.isnan(value) else "nan"
        return value
    if isinstance(value, Dist):
        return {"dist": [[encode(x), encode(p)] for x, p in value.items]}
    if isinstance(value, CostComp):
        return {"cost": encode(value.cost), "value": encode(value.value)}
    if isinstance(value, CostSet):
        return {"set": [encode(e) for e in value]}
    if isinstance(value, StateFn):
        return {"state": [[encode(s), encode(out)] for s, out in value.table]}
    if isinstance(value, (Var, Op)):
        return {"term": format_term(value)}
    if isinstance(value, TableMap):
        return {"map": [[encode(x), encode(y)] for x, y in value.items()]}
    if isinstance(value, Carrier):
        return {"carrier": value.name, "elements": [encode(x) for x in value]}
    if isinstance(value, Mapping):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (tuple, list)):
        return [encode(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((encode(v) for v in value), key=lambda v: json.dumps(v, sort_keys=True))
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return repr(value)


def dumps(payload: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(encode(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ── Decoding scenario inputs ──────────────────────────────────────────────


def decode_element(raw: Any) -> Hashable:
    """JSON element → carrier element (lists become tuples, "p/q" strings stay strings)."""
    if isinstance(raw, list):
        return tuple(decode_element(x) for x in raw)
    if isinstance(raw, dict):
        return decode_value(raw)
    return raw


def decode_weight(raw: Any) -> Any:
    if isinstance(raw, bool):
        raise ScenarioError(f"not a weight: {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        return raw
    if isinstance(raw, str):
        return parse_value(raw)
    raise ScenarioError(f"not a weight: {raw!r}")


def decode_dist(raw: Any) -> Dist:
    """[[element, "p/q"], ...] or {"dist": [...]} → Dist."""
    if isinstance(raw, dict) and "dist" in raw:
        raw = raw["dist"]
    if not isinstance(raw, list):
        raise ScenarioError(f"a distribution is a list of [element, weight] pairs, got {raw!r}")
    pairs = []
    for item in raw:
        if not isinstance(item, list) or len(item) != 2:
            raise ScenarioError(f"bad distribution entry {item!r}")
        pairs.append((decode_element(item[0]), decode_weight(item[1])))
    return Dist.of(pairs)


def decode_value(raw: Any) -> Any:
    """Inverse of ``encode`` for tagged monadic values."""
    if isinstance(raw, dict):
        if "dist" in raw:
            return decode_dist(raw)
        if "cost" in raw:
            return CostComp(decode_weight(raw["cost"]), decode_element(raw["value"]))
        if "set" in raw:
            return CostSet(frozenset(decode_value(e) for e in raw["set"]))
        if "state" in raw:
            return StateFn(tuple((decode_element(s), tuple(decode_element(o) for o in out))
                                 for s, out in raw["state"]))
        raise ScenarioError(f"unknown tagged value {sorted(raw)}")
    return decode_element(raw)


def _cost_pair(raw: Any) -> CostComp:
    if isinstance(raw, CostComp):
        return raw
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        return CostComp(decode_weight(raw[0]), decode_element(raw[1]))
    raise ScenarioError(f"a cost computation is [cost, value], got {raw!r}")


_MONADIC_TYPES: dict[type, type] = {
    DistMonad: Dist,
    DistCostMonad: Dist,
    CostMonad: CostComp,
    CostSetMonad: CostSet,
    StateMonad: StateFn,
}


def decode_monadic(monad: Monad, raw: Any) -> Any:
    """
    JSON value → element of ``monad``.

    Tagged values decode as themselves; bare lists are read by the monad's
    shape: [[x, p], ...] for distributions, [cost, value] for costs, a list of
    [cost, value] for cost sets and [[s, [s', x]], ...] for state functions.

    Raises:
        ScenarioError: the value is malformed or not an element of ``monad``.
    """
    try:
        if isinstance(raw, dict):
            value = decode_value(raw)
        elif isinstance(monad, DistCostMonad):
            value = Dist.of((_cost_pair(x), p) for x, p in decode_dist(raw).items)
        elif isinstance(monad, DistMonad):
            value = decode_dist(raw)
        elif isinstance(monad, CostMonad):
            value = _cost_pair(raw)
        elif isinstance(monad, CostSetMonad):
            value = CostSet(frozenset(_cost_pair(e) for e in raw))
        elif isinstance(monad, StateMonad):
            value = StateFn(tuple((decode_element(s), tuple(decode_element(o) for o in out)) for s, out in raw))
        else:
            value = decode_element(raw)
    except (ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        raise ScenarioError(f"cannot read a {monad.name} value from {raw!r}: {exc}") from exc
    expected = _MONADIC_TYPES.get(type(monad))
    if expected is not None and not isinstance(value, expected):
        raise ScenarioError(f"{encode(value)!r} is not a {monad.name} value")
    return value

