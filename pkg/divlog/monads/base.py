"""
Monad interface, Kleisli maps, derived strength and the monad-law checker.

Every instance is a Kleisli triple over finite carriers: ``unit``, ``bind``
(c, f) ↦ f♯ c, and an enumerator of T I under a SearchBudget. Strength is
never stored; it is θ(i, c) = (j ↦ η(i, j))♯ c.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any

from divlog.core.carriers import Carrier
from divlog.core.search import MappedPool, ProductPool, SearchBudget, bounded_product
from divlog.errors import CarrierMismatch, UnsupportedEffect

logger = logging.getLogger(__name__)


# ── Kleisli maps ──────────────────────────────────────────────────────────


@dataclass(frozen=True)
class TableMap:
    """A total function on a finite carrier, stored as its table of images."""

    source: Carrier
    images: tuple
    label: str = ""
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if len(self.images) != len(self.source):
            raise CarrierMismatch(
                f"map on {self.source.name} needs {len(self.source)} images, got {len(self.images)}"
            )
        object.__setattr__(self, "_lookup", dict(zip(self.source.elements, self.images, strict=True)))

    def __call__(self, element: Hashable) -> Any:
        try:
            return self._lookup[element]
        except (KeyError, TypeError) as exc:
            raise CarrierMismatch(
                f"{element!r} is outside the domain {self.source.name} of {self.label or 'map'}"
            ) from exc

    def items(self) -> Iterable[tuple[Hashable, Any]]:
        return zip(self.source.elements, self.images, strict=True)

    @classmethod
    def from_function(cls, source: Carrier, fn: Callable[[Hashable], Any], label: str = "") -> TableMap:
        return cls(source, tuple(fn(x) for x in source), label)

    @classmethod
    def from_mapping(cls, source: Carrier, mapping: dict, label: str = "") -> TableMap:
        try:
            return cls(source, tuple(mapping[x] for x in source), label)
        except KeyError as exc:
            raise CarrierMismatch(f"map is not total on {source.name}: missing {exc}") from exc


# ── Monad interface ───────────────────────────────────────────────────────


class Monad(ABC):
    """A Kleisli triple over finite carriers with a bounded element enumerator."""

    name: str = "monad"

    @abstractmethod
    def unit(self, x: Hashable) -> Any:
        """η_I(x)."""

    @abstractmethod
    def bind(self, c: Any, f: Callable[[Hashable], Any]) -> Any:
        """f♯(c)."""

    @abstractmethod
    def elements(self, carrier: Carrier, budget: SearchBudget) -> Sequence[Any]:
        """Enumerate T I under the budget's bounds (deterministic order)."""

    @abstractmethod
    def contains(self, c: Any, carrier: Carrier) -> bool:
        """Whether c is an element of T I."""

    def support(self, c: Any) -> tuple:
        """Outcomes of c, for the monads whose values are containers."""
        raise UnsupportedEffect(f"{self.name} has no outcome view")

    def outcome_value(self, outcome: Any) -> Any:
        return outcome

    def relabel(self, c: Any, mapping: Callable[[Any], Any]) -> Any:
        """Apply a map to outcomes, keeping any cost annotation."""
        return self.map(c, mapping)

    def lift_distribution(self, dist: Any) -> Any:
        raise UnsupportedEffect(f"{self.name} cannot host probabilistic choice")

    def charge(self, cost: Any) -> Any:
        raise UnsupportedEffect(f"{self.name} has no cost counter")

    def map(self, c: Any, h: Callable[[Hashable], Hashable]) -> Any:
        return self.bind(c, lambda x: self.unit(h(x)))

    def equal(self, a: Any, b: Any) -> bool:
        return a == b

    def validate(self, c: Any, carrier: Carrier) -> Any:
        if not self.contains(c, carrier):
            raise CarrierMismatch(f"{c!r} is not an element of {self.name}({carrier.name})")
        return c

    def kleisli_maps(self, source: Carrier, target: Carrier, budget: SearchBudget) -> Sequence[TableMap]:
        """Every map source → T target whose images the enumerator produces (lazy)."""
        images = self.elements(target, budget)
        pool = ProductPool([images] * len(source))
        return MappedPool(pool, lambda table: TableMap(source, tuple(table)))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


def kleisli(monad: Monad, f: Callable[[Hashable], Any], c: Any, carrier: Carrier | None = None) -> Any:
    """f♯ c; validates c against ``carrier`` when one is given."""
    if carrier is not None:
        monad.validate(c, carrier)
        if isinstance(f, TableMap) and f.source != carrier:
            raise CarrierMismatch(f"map is defined on {f.source.name}, not {carrier.name}")
    return monad.bind(c, f)


def kleisli_compose(monad: Monad, g: Callable, f: Callable) -> Callable:
    """g • f = x ↦ g♯(f x)."""
    return lambda x: monad.bind(f(x), g)


def strength(monad: Monad, i: Hashable, c: Any) -> Any:
    """θ(i, c) = (j ↦ η(i, j))♯ c."""
    return monad.bind(c, lambda j: monad.unit((i, j)))


# ── Law checks ────────────────────────────────────────────────────────────


@dataclass
class LawReport:
    """Monad-law verdicts; a law maps to None when no counterexample was found."""

    monad: str
    cases: dict[str, int] = field(default_factory=dict)
    exhaustive: dict[str, bool] = field(default_factory=dict)
    counterexamples: dict[str, dict[str, Any] | None] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v is None for v in self.counterexamples.values())

    def failed_laws(self) -> list[str]:
        return [law for law, witness in self.counterexamples.items() if witness is not None]


def check_monad_laws(
    monad: Monad, budget: SearchBudget, carrier: Carrier | None = None
) -> LawReport:
    """
    Check left unit, right unit and associativity on generated instances.

    Args:
        monad: Instance under test.
        budget: Enumeration bounds; beyond ``max_cases`` the check samples.
        carrier: Carrier used for I = J = K (defaults to atoms of max_carrier).

    Returns:
        LawReport listing the first counterexample per law, if any.
    """
    carrier = carrier or Carrier.atoms(budget.max_carrier)
    report = LawReport(monad=monad.name)
    elements = monad.elements(carrier, budget)
    maps = monad.kleisli_maps(carrier, carrier, budget)

    # left unit: η(x) >>= f == f x
    stream = bounded_product([carrier.elements, maps], budget, f"{monad.name}:left")
    report.exhaustive["left_unit"] = stream.exhaustive
    count, witness = 0, None
    for x, f in stream.cases:
        count += 1
        lhs, rhs = monad.bind(monad.unit(x), f), f(x)
        if not monad.equal(lhs, rhs):
            witness = {"x": x, "f": f, "lhs": lhs, "rhs": rhs}
            break
    report.cases["left_unit"], report.counterexamples["left_unit"] = count, witness

    # right unit: c >>= η == c
    count, witness = 0, None
    report.exhaustive["right_unit"] = len(elements) <= budget.max_cases
    for c in list(elements)[: budget.max_cases]:
        count += 1
        lhs = monad.bind(c, monad.unit)
        if not monad.equal(lhs, c):
            witness = {"c": c, "lhs": lhs, "rhs": c}
            break
    report.cases["right_unit"], report.counterexamples["right_unit"] = count, witness

    # associativity: (c >>= f) >>= g == c >>= (x ↦ f x >>= g)
    stream = bounded_product([elements, maps, maps], budget, f"{monad.name}:assoc")
    report.exhaustive["associativity"] = stream.exhaustive
    count, witness = 0, None
    for c, f, g in stream.cases:
        count += 1
        lhs = monad.bind(monad.bind(c, f), g)
        rhs = monad.bind(c, kleisli_compose(monad, g, f))
        if not monad.equal(lhs, rhs):
            witness = {"c": c, "f": f, "g": g, "lhs": lhs, "rhs": rhs}
            break
    report.cases["associativity"], report.counterexamples["associativity"] = count, witness

    logger.info(
        "Monad laws: monad=%s failed=%s cases=%s",
        monad.name, report.failed_laws() or "none", report.cases,
    )
    return report
