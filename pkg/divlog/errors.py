"""
Exception hierarchy for divlog.

Refutations are never raised: checkers return reports carrying replayable
witnesses. Exceptions signal malformed input or a violated precondition.
"""

from __future__ import annotations

from dataclasses import dataclass


class DivlogError(Exception):
    """Root of all divlog errors."""


# ── Value-shaped errors ───────────────────────────────────────────────────


class DomainMismatch(DivlogError, ValueError):
    """A value lies outside the carrier of a divergence domain."""


class GradeOutsideMonoid(DivlogError, ValueError):
    """A grade is not an element of the divergence's grading monoid."""


class CarrierMismatch(DivlogError, ValueError):
    """A monadic value or Kleisli map does not live over the expected carrier."""


class NonEnumerable(DivlogError, ValueError):
    """An enumerator was demanded from a relation that only supports membership tests."""


class SignatureError(DivlogError, ValueError):
    """An operation signature is malformed (e.g. a non first-order operation type)."""


class ScenarioError(DivlogError, ValueError):
    """A scenario, program or derivation file does not match its schema."""


class UsageError(DivlogError, ValueError):
    """Bad command-line usage."""


@dataclass(frozen=True)
class Location:
    """1-based source position inside a program text."""

    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(DivlogError, ValueError):
    """Malformed s-expression or term syntax."""

    def __init__(self, message: str, location: Location | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class TermTypeError(DivlogError, TypeError):
    """A metalanguage term is ill-typed."""

    def __init__(self, message: str, location: Location | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class UnboundVariable(TermTypeError):
    """A variable is used outside the typing context."""


# ── Contract failures ─────────────────────────────────────────────────────


class OpfunctorLawViolation(DivlogError, RuntimeError):
    """A sampled monad-opfunctor diagram does not commute."""

    def __init__(self, message: str, witness: dict | None = None):
        self.witness = witness or {}
        super().__init__(message)


class NotAPreorder(DivlogError, RuntimeError):
    """The adjacency of a Bool-valued divergence is not reflexive or not transitive."""

    def __init__(self, message: str, witness: dict | None = None):
        self.witness = witness or {}
        super().__init__(message)


class InvalidTestArrow(DivlogError, RuntimeError):
    """A test arrow violates its side condition (k1, k2) : X -> adj(n, w)."""

    def __init__(self, message: str, witness: dict | None = None):
        self.witness = witness or {}
        super().__init__(message)


class PreconditionFailed(DivlogError, RuntimeError):
    """A checker's precondition does not hold for the given inputs."""


class UnsupportedEffect(DivlogError, RuntimeError):
    """An effectful operation needs a monad capability the chosen monad lacks."""


class Undecidable(DivlogError, RuntimeError):
    """Membership in a lifted assertion cannot be decided by evaluation."""


class InvalidStep(DivlogError, RuntimeError):
    """A derivation step's premises or side conditions do not support its conclusion."""

    def __init__(self, message: str, witness: dict | None = None):
        self.witness = witness or {}
        super().__init__(message)
