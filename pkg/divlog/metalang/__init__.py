"""
The computational metalanguage: types, terms, signatures, typing and
monadic interpretation.
"""

from divlog.metalang.interpret import (
    Closure,
    apply_value,
    interpret,
    run_program,
    semantically_equal,
)
from divlog.metalang.parser import Program, parse_program, parse_signature, parse_term, parse_type
from divlog.metalang.signature import Inj, OpDecl, Signature, default_signature
from divlog.metalang.syntax import Term, format_term, free_vars, substitute
from divlog.metalang.typecheck import typecheck
from divlog.metalang.types import REAL, UNIT, MonadicType, TypeExpr, product

__all__ = [
    "REAL",
    "UNIT",
    "Closure",
    "Inj",
    "MonadicType",
    "OpDecl",
    "Program",
    "Signature",
    "Term",
    "TypeExpr",
    "apply_value",
    "default_signature",
    "format_term",
    "free_vars",
    "interpret",
    "parse_program",
    "parse_signature",
    "parse_term",
    "parse_type",
    "product",
    "run_program",
    "semantically_equal",
    "substitute",
    "typecheck",
]
