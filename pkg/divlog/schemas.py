"""
Pydantic schemas for divlog's files: judgment scenarios, derivation scripts
and reports.

Scenario and derivation files carry the program text (an optional
``(signature …)`` preamble plus ``(define …)`` forms) so terms in judgments and
steps can refer to named definitions.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Literal, TypeVar

from pydantic import BaseModel, Field, field_validator

from divlog.acrl.assertions import RESULT_LEFT, RESULT_RIGHT, AssertionBuilder, lifted, result_ctx
from divlog.acrl.derivation import RULES, DerivationScript, Step
from divlog.acrl.judgments import Judgment, JudgmentVerdict, judge_semantic, make_judgment, term_types
from divlog.core.search import SearchBudget
from divlog.core.values import parse_value
from divlog.divergences.base import DivergenceSpec
from divlog.divergences.catalogue import get_divergence
from divlog.errors import ScenarioError, TermTypeError
from divlog.metalang.parser import Program, TermParser, parse_program, parse_type, read_one
from divlog.metalang.signature import default_signature
from divlog.metalang.types import MonadicType
from divlog.monads import get_monad
from divlog.monads.base import Monad

logger = logging.getLogger(__name__)

SCENARIO_VERSION = "divlog.scenario/1"
DERIVATION_VERSION = "divlog.derivation/1"
REPORT_VERSION = "divlog.report/1"

ContextModel = list[tuple[str, str]]


# ── Shared setup ──────────────────────────────────────────────────────────


class ProgramSetup(BaseModel):
    """Signature, monad and divergence shared by scenarios and derivation scripts."""

    name: str = ""
    description: str = ""
    reals: tuple[int, int] = Field((0, 4), description="Inclusive integer window of the default R carrier")
    program: str = Field("", description="Program preamble: (signature …) and (define name term) forms")
    monad: str = Field(..., description="Monad identifier, e.g. dist, dist-cost, subdist")
    divergence: str = Field(..., description="Divergence identifier from the catalogue, e.g. tv-cost, dp")

    def build_program(self) -> Program:
        lo, hi = self.reals
        return parse_program(self.program, default_signature(range(lo, hi + 1)))

    def build_monad(self) -> Monad:
        return get_monad(self.monad)

    def build_divergence(self) -> DivergenceSpec:
        return get_divergence(self.divergence)


# ── Judgment scenarios ────────────────────────────────────────────────────


class JudgmentModel(BaseModel):
    """φ ⊢ (left, right) : post, with an optional lifted grade."""

    left_context: ContextModel = Field(default_factory=list)
    right_context: ContextModel = Field(default_factory=list)
    pre: str = "(true)"
    left: str
    right: str
    post: str = Field(..., description="Assertion between u and d (under T when grade/budget are set)")
    grade: str | None = Field(None, description="Grade m of the lifted postcondition")
    budget: str | None = Field(None, description="Budget v; when set, post is lifted to grade m and budget v")


class ScenarioFile(ProgramSetup):
    schema_version: Literal["divlog.scenario/1"] = SCENARIO_VERSION
    judgment: JudgmentModel
    expect: Literal["holds", "fails", "inconclusive"] | None = Field(
        None, description="Expected verdict, checked by the acceptance runner"
    )

    def build_judgment(self, program: Program, spec: DivergenceSpec, monad: Monad) -> Judgment:
        """
        Raises:
            ParseError, TermTypeError: malformed or ill-typed judgment text.
        """
        j = self.judgment
        sig = program.signature
        builder = AssertionBuilder(sig, spec, monad, resolve=program.resolve)
        left_ctx = tuple((n, parse_type(t)) for n, t in j.left_context)
        right_ctx = tuple((n, parse_type(t)) for n, t in j.right_context)
        pre = builder.build(j.pre, left_ctx, right_ctx)
        parser = TermParser(sig)
        left = program.resolve(parser.parse(read_one(j.left)))
        right = program.resolve(parser.parse(read_one(j.right)))
        t_left, t_right = term_types(pre, left, right)
        if j.budget is None:
            post = builder.build(j.post, result_ctx(RESULT_LEFT, t_left), result_ctx(RESULT_RIGHT, t_right))
            return make_judgment(pre, left, right, post)
        if not (isinstance(t_left, MonadicType) and isinstance(t_right, MonadicType)):
            raise TermTypeError(f"a graded judgment relates two computations, got {t_left} / {t_right}")
        inner = builder.build(j.post, result_ctx(RESULT_LEFT, t_left.inner),
                              result_ctx(RESULT_RIGHT, t_right.inner))
        post = lifted(spec, spec.grading.parse(j.grade), parse_value(j.budget), inner)
        return make_judgment(pre, left, right, post)

    def judge(self, budget: SearchBudget, jobs: int = 1) -> tuple[Judgment, JudgmentVerdict]:
        """Build the judgment and decide it semantically."""
        monad = self.build_monad()
        judgment = self.build_judgment(self.build_program(), self.build_divergence(), monad)
        return judgment, judge_semantic(judgment, monad, budget, jobs)


# ── Derivation scripts ────────────────────────────────────────────────────


class StepModel(BaseModel):
    """One rule application; only the fields its rule reads are consulted."""

    id: str
    rule: str
    premises: list[str] = Field(default_factory=list)
    left_context: ContextModel | None = None
    right_context: ContextModel | None = None
    pre: str | None = None
    post: str | None = None
    left: str | None = None
    right: str | None = None
    op: str | None = None
    grade: str | None = None
    budget: str | None = None
    var_left: str | None = None
    var_right: str | None = None
    theta_left: dict[str, str] = Field(default_factory=dict)
    theta_right: dict[str, str] = Field(default_factory=dict)

    @field_validator("rule")
    @classmethod
    def _known_rule(cls, value: str) -> str:
        if value not in RULES:
            raise ValueError(f"unknown rule {value!r}; expected one of {', '.join(RULES)}")
        return value

    def to_step(self) -> Step:
        def ctx(raw: ContextModel | None) -> tuple[tuple[str, str], ...] | None:
            return None if raw is None else tuple((n, t) for n, t in raw)

        return Step(
            id=self.id,
            rule=self.rule,  # type: ignore[arg-type]
            premises=tuple(self.premises),
            left_context=ctx(self.left_context),
            right_context=ctx(self.right_context),
            pre=self.pre,
            post=self.post,
            left=self.left,
            right=self.right,
            op=self.op,
            grade=self.grade,
            budget=self.budget,
            var_left=self.var_left,
            var_right=self.var_right,
            theta_left=dict(self.theta_left),
            theta_right=dict(self.theta_right),
        )


class DerivationFile(ProgramSetup):
    schema_version: Literal["divlog.derivation/1"] = DERIVATION_VERSION
    steps: list[StepModel] = Field(..., min_length=1)
    expect: Literal["valid", "invalid"] | None = None

    def to_script(self) -> DerivationScript:
        return DerivationScript(
            program=self.build_program(),
            monad=self.build_monad(),
            spec=self.build_divergence(),
            steps=[s.to_step() for s in self.steps],
            name=self.name,
        )


# ── Reports ───────────────────────────────────────────────────────────────


class ReportFile(BaseModel):
    """Top-level JSON report of one CLI command."""

    schema_version: Literal["divlog.report/1"] = REPORT_VERSION
    command: list[str] = Field(..., description="Echo of the command line (subcommand and arguments)")
    config: dict[str, Any] = Field(..., description="Settings snapshot the run used")
    verdict: str
    results: dict[str, Any] = Field(default_factory=dict, description="Per-check results keyed by check name")
    timing: dict[str, float] | None = Field(None, description="Wall-clock seconds, only with --timing")


# ── Loading ───────────────────────────────────────────────────────────────

FileModel = TypeVar("FileModel", bound=BaseModel)


def load_file(path: str | Path, model: type[FileModel]) -> FileModel:
    """
    Read and validate a JSON file against ``model``.

    Raises:
        ScenarioError: the file cannot be read.
        pydantic.ValidationError: the content does not match the schema.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    logger.debug("Loading %s as %s", path, model.__name__)
    return model.model_validate_json(text)


def load_scenario(path: str | Path) -> ScenarioFile:
    return load_file(path, ScenarioFile)


def load_derivation(path: str | Path) -> DerivationFile:
    return load_file(path, DerivationFile)
