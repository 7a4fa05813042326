"""
Finite carriers: the objects I, J of the base category, as ordered element lists.
"""

from __future__ import annotations

import itertools
from collections.abc import Hashable, Iterable, Iterator
from dataclasses import dataclass, field

from divlog.errors import CarrierMismatch


@dataclass(frozen=True)
class Carrier:
    """A named finite set with a fixed element order."""

    name: str
    elements: tuple[Hashable, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        index = {}
        for position, element in enumerate(self.elements):
            if element in index:
                raise CarrierMismatch(f"duplicate element {element!r} in carrier {self.name}")
            index[element] = position
        object.__setattr__(self, "_index", index)

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, element: object) -> bool:
        try:
            return element in self._index
        except TypeError:
            return False

    def index(self, element: Hashable) -> int:
        try:
            return self._index[element]
        except (KeyError, TypeError) as exc:
            raise CarrierMismatch(f"{element!r} is not an element of {self.name}") from exc

    def require(self, element: Hashable) -> Hashable:
        self.index(element)
        return element

    def product(self, other: Carrier) -> Carrier:
        return Carrier(f"{self.name}x{other.name}", tuple(itertools.product(self, other)))

    def pairs(self) -> Iterator[tuple[Hashable, Hashable]]:
        return itertools.product(self.elements, self.elements)

    @classmethod
    def of(cls, name: str, elements: Iterable[Hashable]) -> Carrier:
        return cls(name, tuple(elements))

    @classmethod
    def atoms(cls, size: int) -> Carrier:
        """The carrier {0, …, size−1}, named by its size."""
        return cls(str(size), tuple(range(size)))


UNIT = Carrier("1", ((),))


def atom_carriers(max_size: int) -> list[Carrier]:
    return [Carrier.atoms(size) for size in range(1, max_size + 1)]
