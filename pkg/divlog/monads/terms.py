"""
Free term monad T_Ω: terms over a finite operator signature, with bind as
simultaneous substitution.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Callable, Hashable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any, TypeAlias

from divlog.core.carriers import Carrier
from divlog.core.search import SearchBudget
from divlog.errors import CarrierMismatch, ParseError
from divlog.monads.base import Monad


@dataclass(frozen=True)
class Var:
    name: Hashable

    def __repr__(self) -> str:
        return str(self.name)


@dataclass(frozen=True)
class Op:
    symbol: str
    args: tuple[OmegaTerm, ...] = ()

    def __repr__(self) -> str:
        return format_term(self)


OmegaTerm: TypeAlias = Var | Op


@dataclass(frozen=True)
class OmegaSignature:
    """Operator symbols with their arities, in declaration order."""

    arities: tuple[tuple[str, int], ...]

    def arity(self, symbol: str) -> int:
        for name, arity in self.arities:
            if name == symbol:
                return arity
        raise CarrierMismatch(f"unknown operator {symbol!r}")

    @property
    def symbols(self) -> list[str]:
        return [name for name, _ in self.arities]

    @classmethod
    def parse(cls, text: str) -> OmegaSignature:
        """Parse "f:1,g:2,a:0"."""
        arities = []
        for chunk in filter(None, (c.strip() for c in text.split(","))):
            name, _, arity = chunk.partition(":")
            if not name or not arity.isdigit():
                raise ParseError(f"bad operator declaration {chunk!r}, expected name:arity")
            arities.append((name.strip(), int(arity)))
        return cls(tuple(arities))

    def __str__(self) -> str:
        return ",".join(f"{name}:{arity}" for name, arity in self.arities)


def depth(term: OmegaTerm) -> int:
    if isinstance(term, Var):
        return 0
    return 1 + max((depth(a) for a in term.args), default=0)


def variables(term: OmegaTerm) -> set[Hashable]:
    if isinstance(term, Var):
        return {term.name}
    result: set[Hashable] = set()
    for arg in term.args:
        result |= variables(arg)
    return result


def substitute(term: OmegaTerm, sigma: Mapping[Hashable, OmegaTerm]) -> OmegaTerm:
    """Structural substitution; variables outside ``sigma`` stay put."""
    if isinstance(term, Var):
        return sigma.get(term.name, term)
    return Op(term.symbol, tuple(substitute(a, sigma) for a in term.args))


def format_term(term: OmegaTerm) -> str:
    if isinstance(term, Var):
        return str(term.name)
    if not term.args:
        return term.symbol
    return f"{term.symbol}({','.join(format_term(a) for a in term.args)})"


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_']*|\(|\)|,)")


def parse_term(text: str, signature: OmegaSignature) -> OmegaTerm:
    """Parse "f(x,g(y,y))"; identifiers that are not operators are variables."""
    tokens = []
    position = 0
    while position < len(text.rstrip()):
        match = _TOKEN.match(text, position)
        if not match:
            raise ParseError(f"unexpected character in term at offset {position}: {text!r}")
        tokens.append(match.group(1))
        position = match.end()
    symbols = dict(signature.arities)

    def parse(index: int) -> tuple[OmegaTerm, int]:
        if index >= len(tokens):
            raise ParseError(f"unexpected end of term {text!r}")
        name = tokens[index]
        if name not in symbols:
            return Var(name), index + 1
        arity = symbols[name]
        if arity == 0:
            return Op(name), index + 1
        if index + 1 >= len(tokens) or tokens[index + 1] != "(":
            raise ParseError(f"operator {name} expects {arity} arguments in {text!r}")
        args = []
        index += 2
        for position in range(arity):
            arg, index = parse(index)
            args.append(arg)
            expected = ")" if position == arity - 1 else ","
            if index >= len(tokens) or tokens[index] != expected:
                raise ParseError(f"expected {expected!r} in term {text!r}")
            index += 1
        return Op(name, tuple(args)), index

    term, index = parse(0)
    if index != len(tokens):
        raise ParseError(f"trailing tokens in term {text!r}")
    return term


def enumerate_terms(signature: OmegaSignature, names: Sequence[Hashable], max_depth: int) -> list[OmegaTerm]:
    """Every term over ``names`` of depth ≤ ``max_depth`` (shallow terms first)."""
    levels: list[list[OmegaTerm]] = [[Var(x) for x in names]]
    seen: list[OmegaTerm] = list(levels[0])
    for level in range(1, max_depth + 1):
        pool = seen
        fresh: list[OmegaTerm] = []
        for symbol, arity in signature.arities:
            for args in itertools.product(pool, repeat=arity):
                if max((depth(a) for a in args), default=0) == level - 1:
                    fresh.append(Op(symbol, tuple(args)))
        levels.append(fresh)
        seen = seen + fresh
    return seen


class TermMonad(Monad):
    """T_Ω: η = Var, h♯(f(t₁,…,tₙ)) = f(h♯ t₁, …, h♯ tₙ)."""

    def __init__(self, signature: OmegaSignature, max_depth: int | None = None):
        self.signature = signature
        self.max_depth = max_depth
        self.name = f"term({signature})"

    def unit(self, x: Hashable) -> Var:
        return Var(x)

    def bind(self, c: OmegaTerm, f: Callable[[Hashable], OmegaTerm]) -> OmegaTerm:
        if isinstance(c, Var):
            return f(c.name)
        return Op(c.symbol, tuple(self.bind(a, f) for a in c.args))

    def contains(self, c: Any, carrier: Carrier) -> bool:
        if isinstance(c, Var):
            return c.name in carrier
        if not isinstance(c, Op):
            return False
        try:
            if self.signature.arity(c.symbol) != len(c.args):
                return False
        except CarrierMismatch:
            return False
        return all(self.contains(a, carrier) for a in c.args)

    def elements(self, carrier: Carrier, budget: SearchBudget) -> Sequence[OmegaTerm]:
        bound = self.max_depth if self.max_depth is not None else budget.depth
        return enumerate_terms(self.signature, carrier.elements, bound)
