"""
Bounded enumeration shared by every checker.

A check first tries the full product of its case pools; when that exceeds
``max_cases`` it draws ``max_cases`` index tuples from a generator seeded by
(seed, salt), so two runs with the same configuration see the same cases.
Sampled searches can refute, never prove.
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
import math
import zlib
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Generic, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")
U = TypeVar("U")


@dataclass(frozen=True)
class SearchBudget:
    """Immutable enumeration bounds; see ``divlog.config.Settings`` for defaults."""

    max_carrier: int = 3
    grid_denom: int = 4
    cost_bound: int = 3
    depth: int = 3
    max_set_size: int = 2
    max_cases: int = 20_000
    seed: int = 0
    tolerance: float = 1e-9

    def replace(self, **changes: Any) -> SearchBudget:
        return dataclasses.replace(self, **changes)

    def rng(self, salt: str) -> np.random.Generator:
        """Generator keyed by the seed and a stable per-check salt."""
        return np.random.default_rng([abs(self.seed), zlib.crc32(salt.encode("utf-8"))])


# ── Lazy sequences ────────────────────────────────────────────────────────


class ProductPool(Sequence[tuple]):
    """Indexable cartesian product that is never materialised."""

    def __init__(self, pools: Sequence[Sequence[Any]]):
        self.pools = [p if isinstance(p, Sequence) else list(p) for p in pools]
        self._sizes = [len(p) for p in self.pools]

    def __len__(self) -> int:
        return math.prod(self._sizes)

    def __getitem__(self, index: int) -> tuple:  # type: ignore[override]
        if index < 0 or index >= len(self):
            raise IndexError(index)
        digits = []
        for size in reversed(self._sizes):
            index, digit = divmod(index, size)
            digits.append(digit)
        return tuple(pool[d] for pool, d in zip(self.pools, reversed(digits), strict=True))

    def __iter__(self) -> Iterator[tuple]:
        return itertools.product(*self.pools)


class MappedPool(Sequence[U], Generic[T, U]):
    """A pool viewed through a function, still indexable."""

    def __init__(self, pool: Sequence[T], fn: Callable[[T], U]):
        self.pool = pool
        self.fn = fn

    def __len__(self) -> int:
        return len(self.pool)

    def __getitem__(self, index: int) -> U:  # type: ignore[override]
        return self.fn(self.pool[index])

    def __iter__(self) -> Iterator[U]:
        return (self.fn(item) for item in self.pool)


@dataclass
class CaseStream:
    """Cases drawn from a product of pools plus whether they cover it entirely."""

    cases: Iterator[tuple]
    exhaustive: bool
    total: int


def bounded_product(
    pools: Sequence[Sequence[Any]], budget: SearchBudget, salt: str, limit: int | None = None
) -> CaseStream:
    """Enumerate the product exhaustively if it fits ``limit``, else sample it."""
    limit = budget.max_cases if limit is None else limit
    product = ProductPool(pools)
    total = len(product)
    if total <= limit:
        return CaseStream(iter(product), exhaustive=True, total=total)

    logger.debug("Sampling %d of %d cases (salt=%s)", limit, total, salt)
    rng = budget.rng(salt)
    sizes = [len(p) for p in product.pools]

    def sampled() -> Iterator[tuple]:
        for _ in range(limit):
            yield tuple(pool[int(rng.integers(size))] for pool, size in
                        zip(product.pools, sizes, strict=True))

    return CaseStream(sampled(), exhaustive=False, total=total)


# ── Grids ─────────────────────────────────────────────────────────────────


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` naturals summing to ``total`` (lexicographic)."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in compositions(total - head, parts - 1):
            yield (head, *tail)


def grid_weights(parts: int, denom: int) -> list[tuple[Fraction, ...]]:
    """Weight vectors with entries k/denom summing to 1."""
    return [tuple(Fraction(k, denom) for k in combo) for combo in compositions(denom, parts)]


def unit_interval_grid(denom: int) -> list[Fraction]:
    return [Fraction(k, denom) for k in range(denom + 1)]
