"""
Unit tests for the cost, state and cost-combined divergences.

Tests cover:
    - Deterministic cost difference and the Eq-composability counterexample
    - Monadic sorts: comparison counts and the C divergence between them
    - NC / NCI on nondeterministic costs, including empty computations
    - Lipschitz and sup-distance divergences on state transformers
    - Combining a distribution divergence with cost counting
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from divlog.core.carriers import Carrier
from divlog.core.values import INF, NEG_INF
from divlog.demos import insertion_sort, quicksort, randomized_quicksort
from divlog.divergences.axioms import check_axioms, check_composability, composition_sides
from divlog.divergences.base import EQ, TOP
from divlog.divergences.combined import cost_combined
from divlog.divergences.cost import (
    c_prime_spec,
    c_spec,
    cost_difference,
    cost_eq_counterexample,
    cost_interval,
    nc_divergence,
    nc_spec,
    nci_divergence,
    nci_lower_bound,
    nci_spec,
    sensitive_cost_difference,
)
from divlog.divergences.state import (
    StateMetric,
    absolute_metric,
    discrete_metric,
    lip_divergence,
    lip_spec,
    lipschitz_constant,
    met_divergence,
    met_spec,
)
from divlog.divergences.statistical import TV_WEIGHT, fdiv_spec
from divlog.errors import PreconditionFailed
from divlog.monads.cost import COST, PCOST, CostComp, CostSet
from divlog.monads.dist import Dist
from divlog.monads.state import StateFn

# ═══════════════════════════════════════════════════════════════════════════
# Deterministic cost
# ═══════════════════════════════════════════════════════════════════════════


class TestCostDifference:
    """Tests for C and C′ on the cost monad."""

    def test_absolute_difference(self):
        assert cost_difference(CostComp(Fraction(3), "x"), CostComp(Fraction(5), "y")) == 2

    def test_sensitive_difference_needs_equal_values(self):
        assert sensitive_cost_difference(CostComp(Fraction(1), "x"), CostComp(Fraction(1), "y")) == INF
        assert sensitive_cost_difference(CostComp(Fraction(1), "x"), CostComp(Fraction(4), "x")) == 3

    def test_counterexample_sides(self):
        lhs, rhs = composition_sides(c_spec(), EQ, cost_eq_counterexample())
        assert (lhs, rhs) == (1, 0)

    def test_not_eq_composable(self, budget):
        _, _, composability = check_axioms(c_spec(), EQ, budget.replace(cost_bound=1))
        assert composability.refuted
        assert composability.lhs == 1

    def test_top_composable(self, budget):
        report = check_composability(c_spec(), TOP, budget.replace(cost_bound=1))
        assert report.passed

    @pytest.mark.parametrize(
        "factory, name, endorelation",
        [(c_spec, "c", TOP), (c_prime_spec, "c-prime", EQ), (nc_spec, "nc", TOP), (nci_spec, "nci", TOP)],
        ids=["c", "c-prime", "nc", "nci"],
    )
    def test_spec_factories(self, factory, name, endorelation):
        spec = factory()
        assert (spec.name, spec.endorelation) == (name, endorelation)
        assert factory.__doc__.strip()


class TestSortCosts:
    """Comparison counts of the monadic sorts on sorted and reversed input."""

    @pytest.mark.parametrize(
        "xs, quick, insertion",
        [((1, 2, 3, 4, 5), 10, 4), ((5, 4, 3, 2, 1), 10, 10)],
        ids=["sorted", "reversed"],
    )
    def test_deterministic_costs(self, xs, quick, insertion):
        q, i = quicksort(COST, xs), insertion_sort(COST, xs)
        assert (q.cost, i.cost) == (quick, insertion)
        assert q.value == i.value == tuple(sorted(xs))
        carrier = Carrier.of("sorted", [tuple(sorted(xs))])
        assert c_spec().evaluate(None, carrier, q, i) == abs(quick - insertion)

    def test_randomized_pivot_costs(self):
        costs = randomized_quicksort((1, 2, 3))
        assert sorted(set(costs.costs)) == [2, 3]
        assert {e.value for e in costs} == {(1, 2, 3)}


# ═══════════════════════════════════════════════════════════════════════════
# Nondeterministic cost
# ═══════════════════════════════════════════════════════════════════════════


class TestNondeterministicCost:
    """Tests for NC and NCI between sets of cost-tagged results."""

    @pytest.fixture
    def quick(self) -> CostSet:
        return randomized_quicksort((1, 2, 3))

    @pytest.fixture
    def insertion(self) -> CostSet:
        return insertion_sort(PCOST, (1, 2, 3))

    def test_nc(self, quick, insertion):
        assert insertion.costs == [2]
        assert nc_divergence(quick, insertion) == 1

    def test_nci_is_asymmetric(self, quick, insertion):
        assert nci_divergence(quick, insertion) == 1
        assert nci_divergence(insertion, quick) == 0
        assert nci_lower_bound(quick, insertion) == 0

    def test_interval(self, quick):
        assert cost_interval(quick) == (2, 3)

    def test_empty_computations(self, quick):
        empty = CostSet.of([])
        assert nc_divergence(empty, quick) == 0
        assert nci_divergence(empty, quick) == NEG_INF
        assert nci_lower_bound(empty, quick) == INF
        assert cost_interval(empty) is None


# ═══════════════════════════════════════════════════════════════════════════
# State
# ═══════════════════════════════════════════════════════════════════════════


class TestStateDivergences:
    """Tests for the Lipschitz and sup-distance divergences on state."""

    @pytest.fixture
    def states(self) -> Carrier:
        return Carrier.atoms(3)

    def test_lipschitz_constant(self, states):
        metric = absolute_metric(states)
        doubling = StateFn.from_function(states, lambda s: ((), min(2 * s, 2)))
        identity = StateFn.from_function(states, lambda s: ((), s))
        assert lipschitz_constant(metric, doubling) == 2
        assert lipschitz_constant(metric, identity) == 1
        assert lip_divergence(metric, identity, doubling) == INF

    def test_met_between_nonexpansive_updates(self, states):
        metric = absolute_metric(states)
        identity = StateFn.from_function(states, lambda s: ((), s))
        decrement = StateFn.from_function(states, lambda s: ((), max(s - 1, 0)))
        assert met_divergence(metric, identity, decrement) == 1

    def test_met_infinite_when_values_differ(self, states):
        metric = discrete_metric(states)
        left = StateFn.from_function(states, lambda s: ("a", s))
        right = StateFn.from_function(states, lambda s: ("b", s))
        assert met_divergence(metric, left, right) == INF

    def test_met_infinite_when_expanding(self, states):
        metric = absolute_metric(states)
        identity = StateFn.from_function(states, lambda s: ((), s))
        doubling = StateFn.from_function(states, lambda s: ((), min(2 * s, 2)))
        assert met_divergence(metric, identity, doubling) == INF

    def test_metric_must_vanish_on_diagonal(self, states):
        bad = StateMetric("bad", states, lambda a, b: Fraction(1))
        with pytest.raises(PreconditionFailed):
            lip_spec(bad)

    def test_met_needs_triangle_inequality(self, states):
        squared = StateMetric("squared", states, lambda a, b: Fraction((a - b) ** 2))
        with pytest.raises(PreconditionFailed):
            met_spec(squared)


# ═══════════════════════════════════════════════════════════════════════════
# Cost-combined
# ═══════════════════════════════════════════════════════════════════════════


class TestCostCombined:
    """Δ[C] compares cost marginals when the results agree."""

    @pytest.fixture
    def tv_cost(self):
        return cost_combined(fdiv_spec(TV_WEIGHT))

    def test_compares_cost_marginals(self, tv_cost):
        c1 = Dist.dirac(CostComp(Fraction(0), ()))
        c2 = Dist.of({CostComp(Fraction(0), ()): Fraction(1, 2), CostComp(Fraction(1), ()): Fraction(1, 2)})
        assert tv_cost.evaluate(None, Carrier.atoms(1), c1, c2) == Fraction(1, 2)

    def test_top_when_results_differ(self, tv_cost):
        c1 = Dist.dirac(CostComp(Fraction(0), "a"))
        c2 = Dist.dirac(CostComp(Fraction(0), "b"))
        assert tv_cost.evaluate(None, Carrier.of("ab", ("a", "b")), c1, c2) == INF

    def test_requires_distribution_base(self):
        with pytest.raises(PreconditionFailed):
            cost_combined(c_spec())

    def test_requires_eq_relative_base(self):
        with pytest.raises(PreconditionFailed):
            cost_combined(fdiv_spec(TV_WEIGHT).relative_to(TOP))
