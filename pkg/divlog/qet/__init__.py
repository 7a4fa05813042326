"""
Quantitative equational theories on the term monad: CS-EPMets on Ω-terms and
the Gen/(−)_X correspondence with X-generated divergences.
"""

from divlog.qet.gen import gen, gen_divergence, round_trip
from divlog.qet.metrics import (
    METRICS,
    CSEPMet,
    agreement_ultrametric,
    check_csepmet,
    depth_weighted,
    discrete_metric,
    get_metric,
    pulled_back,
)

__all__ = [
    "METRICS",
    "CSEPMet",
    "agreement_ultrametric",
    "check_csepmet",
    "depth_weighted",
    "discrete_metric",
    "gen",
    "gen_divergence",
    "get_metric",
    "pulled_back",
    "round_trip",
]
