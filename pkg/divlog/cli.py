"""
divlog command line: main entry point.

Every subcommand builds a versioned JSON report (config snapshot, per-check
verdicts, replayable witnesses) and maps its verdict to an exit code:

    0   passed / holds / valid / not refuted
    1   refuted / fails / invalid
    2   inconclusive
    64  usage error (bad flags or arguments)
    65  malformed scenario, program or derivation input
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from collections.abc import Callable, Hashable, Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from divlog.acrl import derive
from divlog.config import Settings, get_settings
from divlog.core.carriers import Carrier
from divlog.core.search import SearchBudget
from divlog.core.values import parse_value
from divlog.demos import DEMOS, run_demo
from divlog.divergences.axioms import check_axioms, overall_verdict
from divlog.divergences.base import DivergenceSpec, parse_endorelation
from divlog.divergences.catalogue import NAMES, get_divergence
from divlog.divergences.privacy import parse_alpha_grid
from divlog.encoding import decode_monadic, dumps, encode
from divlog.errors import (
    DivlogError,
    ParseError,
    ScenarioError,
    SignatureError,
    TermTypeError,
    UnsupportedEffect,
    UsageError,
)
from divlog.lifting import (
    RelObject,
    check_enrichment,
    check_fundamental_property,
    check_strength_law,
    codensity_refute,
    exact_witness,
    generate_test_arrows,
    omega_test_family,
)
from divlog.metalang.interpret import run_program
from divlog.metalang.parser import parse_program
from divlog.metalang.signature import default_signature
from divlog.monads import get_monad
from divlog.monads.terms import OmegaSignature, parse_term
from divlog.qet import check_csepmet, gen, gen_divergence, get_metric, round_trip
from divlog.schemas import ReportFile, load_derivation, load_scenario

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_USAGE, EXIT_INPUT = 64, 65

_EXIT_BY_VERDICT = {
    "passed": EXIT_OK, "holds": EXIT_OK, "valid": EXIT_OK, "not-refuted": EXIT_OK, "ok": EXIT_OK,
    "refuted": EXIT_FAILED, "fails": EXIT_FAILED, "invalid": EXIT_FAILED, "failed": EXIT_FAILED,
    "inconclusive": EXIT_INCONCLUSIVE,
}

# Errors that mean the input files or texts are malformed
_INPUT_ERRORS = (ScenarioError, ValidationError, ParseError, TermTypeError, SignatureError)


class _Parser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


# ── Argument parsing ──────────────────────────────────────────────────────


def _global_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("search bounds and output")
    group.add_argument("--max-carrier", type=int, default=None, help="Largest atom carrier enumerated (default: 3)")
    group.add_argument("--grid-denom", type=int, default=None, help="Denominator of the distribution grid (default: 4)")
    group.add_argument("--cost-bound", type=int, default=None, help="Largest enumerated cost (default: 3)")
    group.add_argument("--depth", type=int, default=None, help="Largest enumerated term depth (default: 3)")
    group.add_argument("--max-cases", type=int, default=None,
                       help="Cases checked before seeded sampling takes over (default: 20000)")
    group.add_argument("--alpha-grid", type=str, default=None,
                       help="Rényi orders for zCDP/tCDP, 'start:stop:step' or a comma list")
    group.add_argument("--tol", type=float, default=None, help="Float tolerance (default: 1e-9)")
    group.add_argument("--seed", type=int, default=None, help="Sampling seed (default: 0 or DIVLOG_SEED)")
    group.add_argument("--format", choices=["text", "json"], default=None, help="Output format (default: text)")
    group.add_argument("--jobs", type=int, default=None, help="Worker threads for independent checks")
    group.add_argument("--timing", action="store_true", help="Include wall-clock timing in the report")
    group.add_argument("--save", action="store_true", help="Also write the JSON report into the report directory")
    group.add_argument("--verbose", action="store_true", help="Debug logging on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="divlog", description="Divergences on monads: checkers, liftings and relational logic")
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="Evaluate a divergence on two monadic values")
    p.add_argument("--div", required=True, help=f"Divergence identifier ({', '.join(NAMES)})")
    p.add_argument("--grade", default=None, help="Grade m, e.g. ln(2) for DP (default: the unit)")
    p.add_argument("--lhs", required=True, help="Left value as JSON, e.g. '[[0, \"1/2\"], [1, \"1/2\"]]'")
    p.add_argument("--rhs", required=True, help="Right value as JSON")

    p = sub.add_parser("axioms", help="Check monotonicity, unit reflexivity and composability")
    p.add_argument("--div", required=True, help="Divergence identifier")
    p.add_argument("--endorel", choices=["eq", "top"], default=None,
                   help="Basic endorelation (default: the divergence's own)")

    p = sub.add_parser("lift", help="Codensity lifting checks")
    p.add_argument("check", choices=["refute", "fundamental", "strength", "enrichment"])
    p.add_argument("--div", required=True, help="Divergence identifier")
    p.add_argument("--endorel", choices=["eq", "top"], default=None,
                   help="Basic endorelation (default: the divergence's own)")
    p.add_argument("--grade", default=None, help="refute: grade m of the lifting")
    p.add_argument("--budget", default="0", help="refute: budget v of the lifting")
    p.add_argument("--lhs", default=None, help="refute: left value as JSON")
    p.add_argument("--rhs", default=None, help="refute: right value as JSON")
    p.add_argument("--random-arrows", type=int, default=0, help="refute: extra seeded arrows")

    p = sub.add_parser("run", help="Interpret a program file")
    p.add_argument("file", type=Path)
    p.add_argument("--monad", default="dist", help="Monad interpreting the effects (default: dist)")
    p.add_argument("--reals", default="0:4", help="Inclusive integer window of R (default: 0:4)")
    p.add_argument("--env", nargs="*", default=[], help="Input bindings name=value")

    p = sub.add_parser("judge", help="Decide a judgment scenario semantically")
    p.add_argument("scenario", type=Path)

    p = sub.add_parser("derive", help="Check a derivation script")
    p.add_argument("script", type=Path)
    p.add_argument("--verify", action="store_true", help="Also judge the conclusion semantically")

    p = sub.add_parser("qet", help="Term metrics and the generated divergence")
    p.add_argument("action", choices=["gen", "check"])
    p.add_argument("--sig", required=True, help="Ω signature, e.g. 'f:2,a:0'")
    p.add_argument("--vars", default="x,y", help="Variables of X (default: x,y)")
    p.add_argument("--metric", default="agreement", help="discrete, agreement or depth-weighted")
    p.add_argument("--gen-depth", type=int, default=1, help="Depth of the maps k in the Gen sup")
    p.add_argument("--lhs", default=None, help="gen: left term, e.g. 'f(x,a)'")
    p.add_argument("--rhs", default=None, help="gen: right term")

    p = sub.add_parser("demo", help="Run a bundled demo")
    p.add_argument("name", choices=[*DEMOS, "all"])
    return parser


def settings_from_args(args: argparse.Namespace) -> Settings:
    """
    Overlay explicit flags on the environment-backed settings.

    Raises:
        UsageError: a flag value breaks a settings validator.
    """
    overrides = {
        "max_carrier": args.max_carrier,
        "grid_denom": args.grid_denom,
        "cost_bound": args.cost_bound,
        "depth": args.depth,
        "max_cases": args.max_cases,
        "alpha_grid": args.alpha_grid,
        "tolerance": args.tol,
        "seed": args.seed,
        "output_format": args.format,
        "jobs": args.jobs,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if not overrides:
        return get_settings()
    try:
        return Settings(**overrides)
    except ValidationError as exc:
        raise UsageError(f"invalid option: {exc.errors()[0]['msg']}") from exc


# ── Commands ──────────────────────────────────────────────────────────────


def _json_value(spec: DivergenceSpec, text: str, what: str) -> Any:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc}") from exc
    try:
        return decode_monadic(spec.monad, raw)
    except ScenarioError as exc:
        raise ScenarioError(f"{what}: {exc}") from exc


def _outcome_carrier(spec: DivergenceSpec, *values: Any) -> Carrier:
    """The finite carrier spanned by the values' outcomes."""
    monad = spec.monad
    elements: list[Hashable] = []
    for value in values:
        try:
            outcomes = monad.support(value)
        except UnsupportedEffect:
            continue
        for outcome in outcomes:
            x = monad.outcome_value(outcome)
            if x not in elements:
                elements.append(x)
    return Carrier.of("support", elements)


class Commands:
    """Subcommand handlers; each returns (verdict, results)."""

    def __init__(self, settings: Settings):
        self.settings = settings
        self.budget: SearchBudget = settings.budget()
        self.jobs = settings.jobs

    def divergence(self, identifier: str) -> DivergenceSpec:
        return get_divergence(identifier, alpha_grid=parse_alpha_grid(self.settings.alpha_grid))

    def eval(self, args: argparse.Namespace) -> tuple[str, dict[str, Any]]:
        spec = self.divergence(args.div)
        c1, c2 = _json_value(spec, args.lhs, "--lhs"), _json_value(spec, args.rhs, "--rhs")
        grade = spec.grading.parse(args.grade)
        carrier = _outcome_carrier(spec, c1, c2)
        value = spec.evaluate(grade, carrier, c1, c2)
        return "ok", {"divergence": spec.name, "grade": spec.grading.format(grade), "value": value}

    def axioms(self, args: argparse.Namespace) -> tuple[str, dict[str, Any]]:
        spec = self.divergence(args.div)
        endorelation = parse_endorelation(args.endorel) if args.endorel else None
        reports = check_axioms(spec, endorelation, self.budget, jobs=self.jobs)
        return overall_verdict(reports), {r.axiom: r.to_dict() for r in reports}

    def lift(self, args: argparse.Namespace) -> tuple[str, dict[str, Any]]:
        spec = self.divergence(args.div)
        endorelation = parse_endorelation(args.endorel) if args.endorel else None
        if args.check == "fundamental":
            report = check_fundamental_property(spec, endorelation, self.budget)
            return report.verdict, {"fundamental": report.to_dict()}
        if args.check in ("strength", "enrichment"):
            checker = check_strength_law if args.check == "strength" else check_enrichment
            report = checker(spec, endorelation, self.budget)
            return report.verdict, {report.axiom: report.to_dict()}
        if args.lhs is None or args.rhs is None:
            raise UsageError("lift refute needs --lhs and --rhs")
        return self._refute(spec, endorelation, args)

    def _refute(self, spec: DivergenceSpec, endorelation: Any, args: argparse.Namespace) -> tuple[str, dict[str, Any]]:
        c1, c2 = _json_value(spec, args.lhs, "--lhs"), _json_value(spec, args.rhs, "--rhs")
        m, v = spec.grading.parse(args.grade), parse_value(args.budget)
        carrier = _outcome_carrier(spec, c1, c2)
        relation = RelObject.from_endorelation(endorelation or spec.endorelation, carrier)
        if spec.omega is not None:
            family = list(omega_test_family(spec, None, relation, self.budget, args.random_arrows))
        else:
            targets = [Carrier.atoms(n) for n in range(1, self.budget.max_carrier + 1)]
            family = list(generate_test_arrows(spec, relation, targets, self.budget))
        if spec.witness_kind is not None:
            family.insert(0, exact_witness(spec, c1, c2, m, carrier))
        verdict = codensity_refute(spec, m, v, relation, c1, c2, family,
                                   tolerance=self.budget.tolerance, jobs=self.jobs)
        return verdict.verdict, {"refute": verdict.to_dict()}

    def run(self, args: argparse.Namespace) -> tuple[str, dict[str, Any]]:
        try:
            lo, hi = (int(part) for part in args.reals.split(":"))
        except ValueError as exc:
            raise UsageError(f"--reals expects lo:hi, got {args.reals!r}") from exc
        try:
            text = args.file.read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioError(f"cannot read {args.file}: {exc}") from exc
        program = parse_program(text, default_signature(range(lo, hi + 1)))
        env = {}
        for binding in args.env:
            name, sep, value = binding.partition("=")
            if not sep:
                raise UsageError(f"--env binding {binding!r} is not name=value")
            try:
                env[name] = parse_value(value)
            except ValueError as exc:
                raise UsageError(f"--env binding {binding!r}: {exc}") from exc
        result = run_program(program, get_monad(args.monad), env)
        return "ok", {"program": str(args.file), "env": env, "result": result}

    def judge(self, args: argparse.Namespace) -> tuple[str, dict[str, Any]]:
        scenario = load_scenario(args.scenario)
        judgment, verdict = scenario.judge(self.budget, self.jobs)
        return verdict.verdict, {"judgment": judgment.to_dict(), "semantic": verdict.to_dict()}

    def derive(self, args: argparse.Namespace) -> tuple[str, dict[str, Any]]:
        script = load_derivation(args.script).to_script()
        report = derive(script, self.budget, verify=args.verify)
        verdict = report.verdict
        if report.valid and report.cross_check is not None and not report.cross_check.holds:
            verdict = report.cross_check.verdict
        return verdict, {"derivation": report.to_dict()}

    def qet(self, args: argparse.Namespace) -> tuple[str, dict[str, Any]]:
        signature = OmegaSignature.parse(args.sig)
        names = [v.strip() for v in args.vars.split(",") if v.strip()]
        metric = get_metric(args.metric, signature, names)
        if args.action == "check":
            report = check_csepmet(metric, self.budget)
            return report.verdict, {"csepmet": report.to_dict()}
        if args.lhs is not None and args.rhs is not None:
            t1, t2 = parse_term(args.lhs, signature), parse_term(args.rhs, signature)
            value = gen(metric, metric.carrier, t1, t2, self.budget, args.gen_depth)
            return "ok", {"gen": {"metric": metric.name, "lhs": t1, "rhs": t2, "value": value}}
        spec = gen_divergence(metric, self.budget, args.gen_depth)
        report = round_trip(spec, names, self.budget, gen_depth=args.gen_depth)
        return report.verdict, {"gen-round-trip": report.to_dict()}

    def demo(self, args: argparse.Namespace) -> tuple[str, dict[str, Any]]:
        result = run_demo(args.name, self.budget, self.jobs)
        return result["verdict"], {args.name: result}


# ── Driver ────────────────────────────────────────────────────────────────


def _error_report(argv: Sequence[str], exc: Exception) -> dict[str, Any]:
    return {"verdict": "error", "command": list(argv),
            "results": {"error": {"type": type(exc).__name__, "message": str(exc)}}}


def run_command(argv: Sequence[str]) -> tuple[int, dict[str, Any]]:
    """
    Parse ``argv``, run the subcommand and build its report.

    Returns:
        The exit code and the report as plain JSON data.
    """
    argv = list(argv)
    try:
        args = build_parser().parse_args(argv)
        settings = settings_from_args(args)
    except UsageError as exc:
        return EXIT_USAGE, _error_report(argv, exc)

    handler: Callable[[argparse.Namespace], tuple[str, dict[str, Any]]] = getattr(Commands(settings), args.command)
    started = time.perf_counter()
    try:
        verdict, results = handler(args)
    except UsageError as exc:
        return EXIT_USAGE, _error_report(argv, exc)
    except _INPUT_ERRORS as exc:
        logger.debug("Input error in %s", args.command, exc_info=True)
        return EXIT_INPUT, _error_report(argv, exc)
    except DivlogError as exc:
        logger.debug("Precondition failed in %s", args.command, exc_info=True)
        return EXIT_INPUT, _error_report(argv, exc)
    elapsed = time.perf_counter() - started

    report = ReportFile(
        command=argv,
        config=settings.snapshot(),
        verdict=verdict,
        results=encode(results),
        timing={"seconds": round(elapsed, 6)} if args.timing else None,
    )
    payload = report.model_dump()
    if payload["timing"] is None:
        del payload["timing"]
    if args.save:
        target = Path(settings.report_dir) / f"{args.command}.json"
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(dumps(payload), encoding="utf-8")
        logger.info("Report written to %s", target)
    return _EXIT_BY_VERDICT.get(verdict, EXIT_FAILED), payload


def render_text(report: dict[str, Any]) -> str:
    """Short human-readable summary: the verdict and each check's verdict or value."""
    lines = [f"verdict: {report['verdict']}"]
    for key, value in report.get("results", {}).items():
        if isinstance(value, dict) and "verdict" in value:
            lines.append(f"  {key}: {value['verdict']}")
            for field in ("lhs", "rhs", "value", "detail", "message"):
                if field in value:
                    lines.append(f"    {field}: {value[field]}")
        elif isinstance(value, dict):
            lines.append(f"  {key}: {json.dumps(value, sort_keys=True, ensure_ascii=False)}")
        else:
            lines.append(f"  {key}: {value}")
    return "\n".join(lines) + "\n"


def _output_format(argv: Sequence[str]) -> str:
    for index, token in enumerate(argv):
        if token == "--format" and index + 1 < len(argv):
            return argv[index + 1]
        if token.startswith("--format="):
            return token.partition("=")[2]
    return get_settings().output_format


def main(argv: Sequence[str] | None = None) -> int:
    """CLI entry point."""
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(
        level=logging.DEBUG if "--verbose" in argv else logging.WARNING,
        format="%(asctime)s | %(name)-30s | %(levelname)-7s | %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
    )
    code, report = run_command(argv)
    sys.stdout.write(dumps(report) if _output_format(argv) == "json" else render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
