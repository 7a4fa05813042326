"""
Acceptance runner: reproduces every headline result and writes one JSON report.

Usage:
    python scripts/run_acceptance.py
    python scripts/run_acceptance.py --only 1 5 7 --jobs 4
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path
from typing import Any

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from divlog.cli import run_command  # noqa: E402
from divlog.config import get_settings  # noqa: E402
from divlog.core.carriers import Carrier  # noqa: E402
from divlog.core.search import SearchBudget  # noqa: E402
from divlog.demos import run_demo  # noqa: E402
from divlog.divergences.axioms import check_axioms, check_composability  # noqa: E402
from divlog.divergences.base import EQ, TOP  # noqa: E402
from divlog.divergences.catalogue import get_divergence  # noqa: E402
from divlog.divergences.cost import c_spec, nc_spec, nci_spec  # noqa: E402
from divlog.divergences.preorder import (  # noqa: E402
    equality_preorder,
    inclusion_preorder,
    preorder_roundtrip,
    preorder_to_divergence,
    random_preorder,
    total_preorder,
)
from divlog.divergences.privacy import dp_spec  # noqa: E402
from divlog.divergences.statistical import WEIGHTS, check_fdiv_parameters  # noqa: E402
from divlog.encoding import dumps, encode  # noqa: E402
from divlog.lifting import check_fundamental_property  # noqa: E402
from divlog.monads.cost import PCOST  # noqa: E402
from divlog.monads.dist import DIST  # noqa: E402
from divlog.monads.terms import OmegaSignature  # noqa: E402
from divlog.qet import agreement_ultrametric, gen_divergence, round_trip  # noqa: E402

logger = logging.getLogger("acceptance")

Criterion = Callable[[SearchBudget, int], dict[str, Any]]


def _passed(ok: bool) -> str:
    return "passed" if ok else "failed"


# ── Criteria ──────────────────────────────────────────────────────────────


def pointwise_dp(budget: SearchBudget, jobs: int) -> dict[str, Any]:
    return run_demo("pointwise-dp", budget, jobs)


def cost_eq_refutation(budget: SearchBudget, jobs: int) -> dict[str, Any]:
    reports = check_axioms(c_spec(), EQ, budget.replace(cost_bound=1), jobs=jobs)
    composability = reports[2]
    return {"verdict": _passed(composability.refuted and composability.lhs == 1), "composability": composability.to_dict()}


def fdiv_parameters(budget: SearchBudget, jobs: int) -> dict[str, Any]:
    results, ok = {}, True
    for name, weight in WEIGHTS.items():
        report = check_fdiv_parameters(weight, Fraction(1, 10), budget.tolerance)
        mutated = check_fdiv_parameters(weight.with_parameters(gamma=0, beta_prime=2), Fraction(1, 10), budget.tolerance)
        ok &= report.passed and mutated.refuted
        results[name] = {"table": report.to_dict(), "mutated": mutated.to_dict()}
    return {"verdict": _passed(ok), "weights": results}


def dp_composition(budget: SearchBudget, jobs: int) -> dict[str, Any]:
    report = check_composability(dp_spec(), EQ, budget.replace(max_carrier=3, grid_denom=2), jobs=jobs)
    return {"verdict": _passed(report.passed), "composability": report.to_dict()}


def tv_generated(budget: SearchBudget, jobs: int) -> dict[str, Any]:
    return run_demo("tv-generated", budget, jobs)


def fundamental_property(budget: SearchBudget, jobs: int) -> dict[str, Any]:
    checks = {
        "c": (c_spec(), TOP),
        "nc": (nc_spec(), TOP),
        "nci": (nci_spec(), TOP),
        "dp": (dp_spec(), EQ),
        "tv": (get_divergence("tv"), EQ),
    }
    results = {name: check_fundamental_property(spec, endorelation, budget.replace(cost_bound=3))
               for name, (spec, endorelation) in checks.items()}
    ok = all(r.verdict == "passed" for r in results.values())
    return {"verdict": _passed(ok), "checks": {k: r.to_dict() for k, r in results.items()}}


def case_a(budget: SearchBudget, jobs: int) -> dict[str, Any]:
    return run_demo("case-a", budget, jobs)


def case_b(budget: SearchBudget, jobs: int) -> dict[str, Any]:
    return run_demo("case-b", budget, jobs)


def geometric(budget: SearchBudget, jobs: int) -> dict[str, Any]:
    return run_demo("geometric", budget, jobs)


def roundtrips(budget: SearchBudget, jobs: int) -> dict[str, Any]:
    sources = {
        "eq(dist)": equality_preorder(DIST),
        "total(dist)": total_preorder(DIST),
        "inclusion": inclusion_preorder(),
        "random(pcost)": random_preorder(PCOST, Carrier.atoms(2), budget),
        "divergence(inclusion)": preorder_to_divergence(inclusion_preorder()),
    }
    small = budget.replace(max_carrier=2, grid_denom=2, cost_bound=1)
    results = {name: preorder_roundtrip(source, small).report for name, source in sources.items()}
    metric = agreement_ultrametric(OmegaSignature.parse("f:1,a:0"), ("x", "y"))
    term_budget = budget.replace(max_carrier=2, depth=2)
    results["gen"] = round_trip(gen_divergence(metric, term_budget), ("x", "y"), term_budget, max_depth=2)
    ok = all(r.passed for r in results.values())
    return {"verdict": _passed(ok), "checks": {k: r.to_dict() for k, r in results.items()}}


def determinism(budget: SearchBudget, jobs: int) -> dict[str, Any]:
    argv = ["--format", "json", "--seed", str(budget.seed), "demo", "all"]
    first, second = run_command(argv), run_command(argv)
    same = first[0] == second[0] and dumps(first[1]) == dumps(second[1])
    return {"verdict": _passed(same), "exit_code": first[0]}


CRITERIA: dict[int, tuple[str, Criterion]] = {
    1: ("pointwise DP counterexample", pointwise_dp),
    2: ("C is not Eq-composable", cost_eq_refutation),
    3: ("f-divergence parameter table", fdiv_parameters),
    4: ("DP composition", dp_composition),
    5: ("TV generatedness", tv_generated),
    6: ("fundamental property", fundamental_property),
    7: ("case study A", case_a),
    8: ("case study B", case_b),
    9: ("geometric mechanism axiom", geometric),
    10: ("preorder and term round trips", roundtrips),
    11: ("deterministic reports", determinism),
}


def main() -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s | %(name)-30s | %(levelname)-7s | %(message)s",
        datefmt="%H:%M:%S",
    )
    parser = argparse.ArgumentParser(description="Run the divlog acceptance table")
    parser.add_argument("--only", type=int, nargs="*", default=None, help="Criterion numbers to run (default: all)")
    parser.add_argument("--jobs", type=int, default=1, help="Worker threads for independent checks")
    parser.add_argument("--output", type=Path, default=None,
                        help="Report path (default: <report_dir>/acceptance.json)")
    args = parser.parse_args()

    settings = get_settings()
    budget = settings.budget()
    chosen = args.only or list(CRITERIA)
    results: dict[str, Any] = {}
    for number in chosen:
        title, criterion = CRITERIA[number]
        started = time.perf_counter()
        result = encode(criterion(budget, args.jobs))
        logger.info("%2d. %-32s %s (%.2fs)", number, title, result["verdict"], time.perf_counter() - started)
        results[str(number)] = {"title": title, **result}

    verdict = _passed(all(r["verdict"] == "passed" for r in results.values()))
    output = args.output or Path(settings.report_dir) / "acceptance.json"
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(dumps({"verdict": verdict, "config": settings.snapshot(), "results": results}),
                      encoding="utf-8")
    logger.info("Acceptance %s; report written to %s", verdict, output)
    return 0 if verdict == "passed" else 1


if __name__ == "__main__":
    sys.exit(main())
