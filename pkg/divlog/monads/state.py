"""
State monad T_S = S ⇒ (− × S) over a finite state carrier.
"""

from __future__ import annotations

from collections.abc import Callable, Hashable, Sequence
from dataclasses import dataclass, field
from typing import Any

from divlog.core.carriers import Carrier
from divlog.core.search import MappedPool, ProductPool, SearchBudget
from divlog.errors import CarrierMismatch
from divlog.monads.base import Monad


@dataclass(frozen=True)
class StateFn:
    """A state transformer stored as its total table s ↦ (value, s')."""

    table: tuple[tuple[Hashable, tuple[Hashable, Hashable]], ...]
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_lookup", dict(self.table))

    def __call__(self, state: Hashable) -> tuple[Hashable, Hashable]:
        try:
            return self._lookup[state]
        except KeyError as exc:
            raise CarrierMismatch(f"state transformer undefined on {state!r}") from exc

    def value_at(self, state: Hashable) -> Hashable:
        return self(state)[0]

    def state_at(self, state: Hashable) -> Hashable:
        return self(state)[1]

    @property
    def states(self) -> tuple[Hashable, ...]:
        return tuple(s for s, _ in self.table)

    @classmethod
    def from_function(cls, states: Carrier, fn: Callable[[Hashable], tuple[Hashable, Hashable]]) -> StateFn:
        return cls(tuple((s, tuple(fn(s))) for s in states))


class StateMonad(Monad):
    """η x = s ↦ (x, s); f♯ c = s ↦ let (x, s') = c s in f(x)(s')."""

    def __init__(self, states: Carrier):
        self.states = states
        self.name = f"state({states.name})"

    def unit(self, x: Hashable) -> StateFn:
        return StateFn(tuple((s, (x, s)) for s in self.states))

    def bind(self, c: StateFn, f: Callable[[Hashable], StateFn]) -> StateFn:
        def run(s: Hashable) -> tuple[Hashable, Hashable]:
            x, s2 = c(s)
            return f(x)(s2)

        return StateFn.from_function(self.states, run)

    def contains(self, c: Any, carrier: Carrier) -> bool:
        if not isinstance(c, StateFn) or set(c.states) != set(self.states.elements):
            return False
        return all(value in carrier and state in self.states for _, (value, state) in c.table)

    def elements(self, carrier: Carrier, budget: SearchBudget) -> Sequence[StateFn]:
        outcomes = [(x, s) for x in carrier for s in self.states]
        pool = ProductPool([outcomes] * len(self.states))
        return MappedPool(pool, lambda images: StateFn(tuple(zip(self.states.elements, images, strict=True))))
