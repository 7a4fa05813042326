"""
S-expression surface syntax for types, terms and program files.

Types     R  1  0  (* τ τ …)  (+ τ τ)  (-> τ … τ)  (T τ)
Terms     x  3  1/2  'sym  ()  (pair M N …)  (fst M)  (snd M)
          (inl M τ)  (inr M τ)  (match M (x L) (y R))  (absurd M τ)
          (lambda (x τ) … M)  (let (x M) … N)  (ret M)  (op M …)  (M N …)
Programs  (signature (base R 0 1 2) (value-op sub (* R R) R)
                     (effect-op lap (* R R) R (window 4)) …)
          (input (r R) …)  (define name M) …  (main M)

Operation arguments are paired right-nested; application is curried.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Iterator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from divlog.errors import Location, ParseError, SignatureError
from divlog.metalang.signature import Signature
from divlog.metalang.syntax import (
    Absurd,
    App,
    EffectOp,
    Fst,
    Inl,
    Inr,
    Lam,
    Let,
    Lit,
    Match,
    Pair,
    Ret,
    Snd,
    Term,
    UnitTerm,
    ValueOp,
    Var,
    substitute,
)
from divlog.metalang.types import (
    EMPTY,
    UNIT,
    ArrowType,
    BaseType,
    MonadicType,
    ProductType,
    SumType,
    TypeExpr,
)

logger = logging.getLogger(__name__)

_NUMBER = re.compile(r"^[+-]?(\d+(/\d+)?|\d*\.\d+)$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_'\-]*$")
KEYWORDS = frozenset({"lambda", "let", "ret", "pair", "fst", "snd", "inl", "inr", "match", "absurd"})


# ── Reader ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Atom:
    text: str
    loc: Location


@dataclass(frozen=True)
class SList:
    items: tuple[Any, ...]
    loc: Location


SExpr = Atom | SList


def _tokens(text: str) -> Iterator[tuple[str, Location]]:
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            col, i = col + 1, i + 1
            continue
        if ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            yield ch, Location(line, col)
            col, i = col + 1, i + 1
            continue
        start, start_col = i, col
        while i < len(text) and not text[i].isspace() and text[i] not in "();":
            i += 1
        col += i - start
        yield text[start:i], Location(line, start_col)


def read_all(text: str) -> list[SExpr]:
    """Every top-level s-expression of ``text``."""
    stack: list[tuple[list, Location]] = []
    forms: list[SExpr] = []
    for token, loc in _tokens(text):
        if token == "(":
            stack.append(([], loc))
        elif token == ")":
            if not stack:
                raise ParseError("unexpected ')'", loc)
            items, start = stack.pop()
            node = SList(tuple(items), start)
            (stack[-1][0] if stack else forms).append(node)
        else:
            (stack[-1][0] if stack else forms).append(Atom(token, loc))
    if stack:
        raise ParseError("unclosed '('", stack[-1][1])
    return forms


def read_one(text: str) -> SExpr:
    forms = read_all(text)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one expression, found {len(forms)}", Location(1, 1))
    return forms[0]


def parse_number(text: str, loc: Location | None = None) -> Fraction:
    if not _NUMBER.match(text):
        raise ParseError(f"not a number: {text!r}", loc)
    return Fraction(text)


# ── Types ─────────────────────────────────────────────────────────────────


def type_from_sexpr(node: SExpr) -> TypeExpr:
    if isinstance(node, Atom):
        if node.text in ("1", "unit"):
            return UNIT
        if node.text in ("0", "empty"):
            return EMPTY
        if not _IDENT.match(node.text):
            raise ParseError(f"bad type name {node.text!r}", node.loc)
        return BaseType(node.text)
    if not node.items or not isinstance(node.items[0], Atom):
        raise ParseError("a compound type starts with *, +, -> or T", node.loc)
    head, args = node.items[0].text, [type_from_sexpr(a) for a in node.items[1:]]
    if head == "T" and len(args) == 1:
        return MonadicType(args[0])
    if head in ("*", "+", "->") and len(args) >= 2:
        build = {"*": ProductType, "+": SumType, "->": ArrowType}[head]
        result = args[-1]
        for t in reversed(args[:-1]):
            result = build(t, result)
        return result
    raise ParseError(f"malformed type ({head} …) with {len(args)} argument(s)", node.loc)


def parse_type(text: str) -> TypeExpr:
    return type_from_sexpr(read_one(text))


# ── Terms ─────────────────────────────────────────────────────────────────


def _pair_args(args: list[Term], loc: Location) -> Term:
    if not args:
        return UnitTerm(loc=loc)
    result = args[-1]
    for a in reversed(args[:-1]):
        result = Pair(a, result, loc=loc)
    return result


def _binding(node: SExpr, what: str) -> tuple[str, SExpr]:
    if not (isinstance(node, SList) and len(node.items) == 2 and isinstance(node.items[0], Atom)):
        raise ParseError(f"{what} expects (name …)", node.loc)
    return node.items[0].text, node.items[1]


class TermParser:
    """Turns s-expressions into terms; operation names come from a signature."""

    def __init__(self, signature: Signature | None = None):
        self.signature = signature or Signature()

    def parse(self, node: SExpr, bound: frozenset[str] = frozenset()) -> Term:
        if isinstance(node, Atom):
            return self._atom(node)
        if not node.items:
            return UnitTerm(loc=node.loc)
        head = node.items[0]
        if isinstance(head, Atom) and head.text not in bound:
            if head.text in KEYWORDS:
                return self._keyword(head.text, node, bound)
            if head.text in self.signature.op_names:
                args = [self.parse(a, bound) for a in node.items[1:]]
                arg = _pair_args(args, node.loc)
                if head.text in self.signature.effect_ops:
                    return EffectOp(head.text, arg, loc=node.loc)
                return ValueOp(head.text, arg, loc=node.loc)
        fn = self.parse(head, bound)
        if len(node.items) == 1:
            raise ParseError("application needs an argument", node.loc)
        for arg in node.items[1:]:
            fn = App(fn, self.parse(arg, bound), loc=node.loc)
        return fn

    def _atom(self, node: Atom) -> Term:
        text = node.text
        if _NUMBER.match(text):
            return Lit(Fraction(text), loc=node.loc)
        if text.startswith("'") and len(text) > 1:
            return Lit(text[1:], loc=node.loc)
        if text in KEYWORDS or not _IDENT.match(text):
            raise ParseError(f"unexpected {text!r}", node.loc)
        return Var(text, loc=node.loc)

    def _keyword(self, word: str, node: SList, bound: frozenset[str]) -> Term:
        items, loc = node.items, node.loc

        def arity(n: int) -> None:
            if len(items) - 1 != n:
                raise ParseError(f"{word} takes {n} argument(s), got {len(items) - 1}", loc)

        if word == "lambda":
            if len(items) < 3:
                raise ParseError("lambda needs a binder and a body", loc)
            binders = [_binding(b, "lambda") for b in items[1:-1]]
            inner = bound | {name for name, _ in binders}
            body = self.parse(items[-1], inner)
            for name, type_node in reversed(binders):
                body = Lam(name, type_from_sexpr(type_node), body, loc=loc)
            return body
        if word == "let":
            if len(items) < 3:
                raise ParseError("let needs a binding and a body", loc)
            bindings = []
            scope = bound
            for b in items[1:-1]:
                name, value = _binding(b, "let")
                bindings.append((name, self.parse(value, scope)))
                scope = scope | {name}
            body = self.parse(items[-1], scope)
            for name, value in reversed(bindings):
                body = Let(name, value, body, loc=loc)
            return body
        if word == "ret":
            arity(1)
            return Ret(self.parse(items[1], bound), loc=loc)
        if word == "pair":
            if len(items) < 3:
                raise ParseError("pair takes at least two arguments", loc)
            return _pair_args([self.parse(a, bound) for a in items[1:]], loc)
        if word in ("fst", "snd"):
            arity(1)
            return (Fst if word == "fst" else Snd)(self.parse(items[1], bound), loc=loc)
        if word in ("inl", "inr"):
            arity(2)
            return (Inl if word == "inl" else Inr)(self.parse(items[1], bound), type_from_sexpr(items[2]), loc=loc)
        if word == "absurd":
            arity(2)
            return Absurd(self.parse(items[1], bound), type_from_sexpr(items[2]), loc=loc)
        # match
        arity(3)
        x, left = _binding(items[2], "match branch")
        y, right = _binding(items[3], "match branch")
        return Match(self.parse(items[1], bound), x, self.parse(left, bound | {x}),
                     y, self.parse(right, bound | {y}), loc=loc)


def parse_term(text: str, signature: Signature | None = None) -> Term:
    return TermParser(signature).parse(read_one(text))


# ── Signatures and programs ───────────────────────────────────────────────


def _params(nodes: tuple[SExpr, ...]) -> tuple[str | None, dict[str, Any]]:
    impl, params = None, {}
    for node in nodes:
        if not (isinstance(node, SList) and len(node.items) == 2
                and all(isinstance(i, Atom) for i in node.items)):
            raise ParseError("operation parameters are (key value) pairs", node.loc)
        key, value = node.items[0].text, node.items[1].text
        if key == "impl":
            impl = value
        else:
            params[key] = parse_number(value, node.items[1].loc)
    return impl, params


def _base_elements(nodes: tuple[SExpr, ...]) -> list[Any]:
    elements: list[Any] = []
    for node in nodes:
        if isinstance(node, SList):
            if (len(node.items) == 3 and isinstance(node.items[0], Atom) and node.items[0].text == "range"):
                lo = parse_number(node.items[1].text, node.items[1].loc)
                hi = parse_number(node.items[2].text, node.items[2].loc)
                elements.extend(Fraction(k) for k in range(int(lo), int(hi) + 1))
                continue
            raise ParseError("base elements are atoms or (range lo hi)", node.loc)
        if _NUMBER.match(node.text):
            elements.append(Fraction(node.text))
        else:
            elements.append(node.text.lstrip("'"))
    return elements


def signature_from_sexpr(node: SList, signature: Signature | None = None) -> Signature:
    """Fill a signature from a (signature …) form."""
    sig = signature or Signature()
    for decl in node.items[1:]:
        if not (isinstance(decl, SList) and decl.items and isinstance(decl.items[0], Atom)):
            raise ParseError("signature entries are (base …), (value-op …) or (effect-op …)", decl.loc)
        kind = decl.items[0].text
        try:
            if kind == "base":
                sig.declare_base(decl.items[1].text, _base_elements(decl.items[2:]))
            elif kind in ("value-op", "effect-op"):
                if len(decl.items) < 4:
                    raise ParseError(f"{kind} needs a name, a domain and a codomain", decl.loc)
                name = decl.items[1].text
                domain, codomain = type_from_sexpr(decl.items[2]), type_from_sexpr(decl.items[3])
                impl, params = _params(decl.items[4:])
                declare = sig.declare_effect if kind == "effect-op" else sig.declare_value
                declare(name, domain, codomain, impl, **params)
            elif kind == "numeric":
                sig.numeric_base = decl.items[1].text
            else:
                raise ParseError(f"unknown signature entry {kind!r}", decl.loc)
        except SignatureError as exc:
            raise SignatureError(f"{decl.loc}: {exc}") from exc
    return sig


def parse_signature(text: str) -> Signature:
    node = read_one(text)
    if not (isinstance(node, SList) and node.items and isinstance(node.items[0], Atom)
            and node.items[0].text == "signature"):
        raise ParseError("expected (signature …)", node.loc)
    return signature_from_sexpr(node)


@dataclass
class Program:
    """A parsed program file."""

    signature: Signature
    inputs: list[tuple[str, TypeExpr]] = field(default_factory=list)
    definitions: dict[str, Term] = field(default_factory=dict)
    main: Term | None = None

    def resolve(self, term: Term) -> Term:
        """Inline the definitions (closed terms) into ``term``."""
        for name in reversed(list(self.definitions)):
            term = substitute(term, {name: self.definitions[name]})
        return term


def parse_program(text: str, signature: Signature | None = None) -> Program:
    """
    Raises:
        ParseError: on malformed syntax, with the offending position.
    """
    program = Program(signature or Signature())
    parser = TermParser(program.signature)
    for form in read_all(text):
        if not (isinstance(form, SList) and form.items and isinstance(form.items[0], Atom)):
            if program.main is not None:
                raise ParseError("a program has a single main term", form.loc)
            program.main = parser.parse(form)
            continue
        head = form.items[0].text
        if head == "signature":
            signature_from_sexpr(form, program.signature)
        elif head == "input":
            program.inputs.extend((name, type_from_sexpr(t)) for name, t in
                                  (_binding(b, "input") for b in form.items[1:]))
        elif head == "define":
            if len(form.items) != 3 or not isinstance(form.items[1], Atom):
                raise ParseError("define expects (define name term)", form.loc)
            program.definitions[form.items[1].text] = parser.parse(form.items[2])
        elif head == "main":
            if len(form.items) != 2:
                raise ParseError("main expects one term", form.loc)
            program.main = parser.parse(form.items[1])
        else:
            if program.main is not None:
                raise ParseError("a program has a single main term", form.loc)
            program.main = parser.parse(form)
    logger.debug("Parsed program: %d definitions, inputs=%s", len(program.definitions),
                 [name for name, _ in program.inputs])
    return program
