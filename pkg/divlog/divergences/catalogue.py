"""
The divergence catalogue: every shipped DivergenceSpec by name.

Names accepted by ``get_divergence``::

    dp  pw  renyi(a)  zcdp  tcdp(w)          privacy
    tv  kl  hd  chi2                         f-divergences
    c  c-prime  nc  nci                      cost
    lip  met  lip(abs:0,1,2)  met(discrete:a,b)   state
    tv-cost  kl-cost  hd-cost  chi2-cost     cost-combined
    preorder-eq(<monad>)  preorder-total(<monad>)  preorder-inclusion

Any name may carry ``@<monad>`` to move the entry to another monad of the
registry (e.g. ``dp@dist``).
"""

from __future__ import annotations

import dataclasses
import logging
import re
from collections.abc import Sequence

from divlog.core.carriers import Carrier
from divlog.core.values import ExtendedValue
from divlog.divergences.base import DivergenceSpec
from divlog.divergences.combined import cost_combined
from divlog.divergences.cost import c_prime_spec, c_spec, nc_spec, nci_spec
from divlog.divergences.preorder import (
    equality_preorder,
    inclusion_preorder,
    preorder_to_divergence,
    total_preorder,
)
from divlog.divergences.privacy import (
    DEFAULT_ALPHA_GRID,
    dp_spec,
    parse_order,
    pointwise_dp_spec,
    renyi_spec,
    tcdp_spec,
    zcdp_spec,
)
from divlog.divergences.state import absolute_metric, discrete_metric, lip_spec, met_spec
from divlog.divergences.statistical import WEIGHTS, fdiv_spec
from divlog.errors import ScenarioError
from divlog.monads import get_monad

logger = logging.getLogger(__name__)

_CALL = re.compile(r"^(?P<head>[a-z0-9-]+)(\((?P<arg>[^)]*)\))?(@(?P<monad>.+))?$")

NAMES = (
    "dp", "pw", "renyi(2)", "zcdp", "tcdp(4)",
    "tv", "kl", "hd", "chi2",
    "c", "c-prime", "nc", "nci",
    "lip", "met",
    "tv-cost", "kl-cost", "hd-cost", "chi2-cost",
    "preorder-eq(dist)", "preorder-total(dist)", "preorder-inclusion",
)


def _state_metric(arg: str | None):
    if not arg:
        return absolute_metric(Carrier.of("0..2", (0, 1, 2)))
    kind, _, states = arg.partition(":")
    elements = tuple(int(s) if s.strip().lstrip("-").isdigit() else s.strip()
                     for s in states.split(",") if s.strip()) or (0, 1, 2)
    carrier = Carrier.of(",".join(map(str, elements)), elements)
    if kind == "abs":
        return absolute_metric(carrier)
    if kind == "discrete":
        return discrete_metric(carrier)
    raise ScenarioError(f"unknown state metric {kind!r} (expected abs or discrete)")


def get_divergence(identifier: str, alpha_grid: Sequence[ExtendedValue] = DEFAULT_ALPHA_GRID) -> DivergenceSpec:
    """
    Resolve a catalogue name.

    Raises:
        ScenarioError: for an unknown name or a malformed parameter.
    """
    match = _CALL.match(identifier.strip().lower())
    if not match:
        raise ScenarioError(f"malformed divergence name {identifier!r}")
    head, arg, monad_name = match.group("head"), match.group("arg"), match.group("monad")

    if head == "dp":
        spec = dp_spec()
    elif head == "pw":
        spec = pointwise_dp_spec()
    elif head == "renyi":
        spec = renyi_spec(parse_order(arg or "2"))
    elif head == "zcdp":
        spec = zcdp_spec(alpha_grid)
    elif head == "tcdp":
        spec = tcdp_spec(parse_order(arg or "4"), alpha_grid)
    elif head in WEIGHTS:
        spec = fdiv_spec(WEIGHTS[head])
    elif head.endswith("-cost") and head.removesuffix("-cost") in WEIGHTS:
        spec = cost_combined(fdiv_spec(WEIGHTS[head.removesuffix("-cost")]))
    elif head == "c":
        spec = c_spec()
    elif head == "c-prime":
        spec = c_prime_spec()
    elif head == "nc":
        spec = nc_spec()
    elif head == "nci":
        spec = nci_spec()
    elif head == "lip":
        spec = lip_spec(_state_metric(arg))
    elif head == "met":
        spec = met_spec(_state_metric(arg))
    elif head == "preorder-eq":
        spec = preorder_to_divergence(equality_preorder(get_monad(arg or "dist")))
    elif head == "preorder-total":
        spec = preorder_to_divergence(total_preorder(get_monad(arg or "dist")))
    elif head == "preorder-inclusion":
        spec = preorder_to_divergence(inclusion_preorder())
    else:
        raise ScenarioError(f"unknown divergence {identifier!r}; known: {', '.join(NAMES)}")

    if monad_name:
        spec = dataclasses.replace(spec, monad=get_monad(monad_name), name=f"{spec.name}@{monad_name}")
    logger.debug("Resolved divergence %s → %s on %s", identifier, spec.name, spec.monad.name)
    return spec


def describe() -> list[dict[str, str]]:
    rows = []
    for name in NAMES:
        spec = get_divergence(name)
        rows.append({
            "name": spec.name,
            "monad": spec.monad.name,
            "grading": spec.grading.name,
            "domain": spec.domain.name,
            "endorelation": spec.endorelation.name,
            "exact": str(spec.exact).lower(),
            "description": spec.description,
        })
    return rows
