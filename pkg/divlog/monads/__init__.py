"""
Finite monad instances and the registry resolving scenario identifiers:
"dist", "subdist", "cost", "cost-q", "pcost", "state(S)", "term(Ω|X)", "dist-cost".
"""

from __future__ import annotations

import re

from divlog.core.carriers import Carrier
from divlog.errors import ScenarioError
from divlog.monads.base import Monad, TableMap, check_monad_laws, kleisli, strength
from divlog.monads.cost import (
    COST,
    DIST_COST,
    PCOST,
    RATIONAL_COST,
    CostComp,
    CostMonad,
    CostSet,
    CostSetMonad,
    DistCostMonad,
)
from divlog.monads.dist import DIST, SUBDIST, Dist, DistMonad
from divlog.monads.state import StateFn, StateMonad
from divlog.monads.terms import OmegaSignature, TermMonad

_STATE = re.compile(r"^state\((?P<states>[^)]*)\)$")
_TERM = re.compile(r"^term\((?P<sig>[^|)]*)(\|(?P<vars>[^)]*))?\)$")

_FIXED: dict[str, Monad] = {
    "dist": DIST,
    "subdist": SUBDIST,
    "cost": COST,
    "cost-q": RATIONAL_COST,
    "pcost": PCOST,
    "dist-cost": DIST_COST,
}


def get_monad(identifier: str) -> Monad:
    """Resolve a monad identifier; "state(2)" or "state(a,b)", "term(f:1,a:0)"."""
    identifier = identifier.strip()
    if identifier in _FIXED:
        return _FIXED[identifier]
    match = _STATE.match(identifier)
    if match:
        states = match.group("states").strip()
        if states.isdigit():
            return StateMonad(Carrier.atoms(int(states)))
        names = [s.strip() for s in states.split(",") if s.strip()]
        if not names:
            raise ScenarioError("state monad needs a non-empty state carrier")
        return StateMonad(Carrier.of("S", names))
    match = _TERM.match(identifier)
    if match:
        return TermMonad(OmegaSignature.parse(match.group("sig")))
    raise ScenarioError(f"unknown monad {identifier!r}")


__all__ = [
    "COST",
    "DIST",
    "DIST_COST",
    "PCOST",
    "RATIONAL_COST",
    "SUBDIST",
    "CostComp",
    "CostMonad",
    "CostSet",
    "CostSetMonad",
    "Dist",
    "DistCostMonad",
    "DistMonad",
    "Monad",
    "OmegaSignature",
    "StateFn",
    "StateMonad",
    "TableMap",
    "TermMonad",
    "check_monad_laws",
    "get_monad",
    "kleisli",
    "strength",
]
