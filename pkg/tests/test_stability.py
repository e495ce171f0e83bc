import random
from fractions import Fraction

import pytest

from ebmatch.model import build_bm
from ebmatch.policy import Policy
from ebmatch.stability import (
    DistributionError,
    advise_stability,
    build_distribution,
    check_ncond,
    check_scond,
    check_separable_cond,
    estimate_tau1,
    random_distribution,
    scond_holds_for,
)
from ebmatch.model import enumerate_independent_sets

from .conftest import RESTRICTED_MU, SEPARABLE_BM


def restricted_dist(structure):
    return build_distribution(
        structure,
        {edge: Fraction(*nd) for edge, nd in RESTRICTED_MU.items()},
    )


class TestBuildDistribution:
    def test_reference_weights(self, restricted):
        dist = restricted_dist(restricted)
        assert dist.prob(1, 2) == Fraction(1, 3)
        assert dist.customer_marginal({2}) == Fraction(4, 9)
        assert dist.server_marginal({1}) == Fraction(2, 9)

    def test_floats_rejected(self, restricted):
        with pytest.raises(DistributionError):
            build_distribution(restricted, {(1, 2): 0.5, (2, 1): 0.5})

    def test_support_outside_arrivals_rejected(self, restricted):
        with pytest.raises(DistributionError):
            build_distribution(restricted, {(1, 1): Fraction(1)})

    def test_sum_must_be_one(self, restricted):
        with pytest.raises(DistributionError):
            build_distribution(restricted, {(1, 2): Fraction(1, 2)})

    def test_random_distribution_valid(self, restricted):
        dist = random_distribution(restricted, random.Random(3))
        assert sum(p for _, p in dist.weights) == 1
        assert all(p > 0 for _, p in dist.weights)


class TestDriftConditions:
    def test_reference_ncond_holds(self, restricted):
        assert check_ncond(restricted_dist(restricted)).holds

    def test_reference_scond_fails_with_witness(self, restricted):
        report = check_scond(restricted_dist(restricted))
        assert not report.holds
        assert report.witness.A == frozenset({3})
        assert report.witness.B == frozenset({1})

    def test_specific_witness_inequality(self, restricted):
        dist = restricted_dist(restricted)
        witness = next(
            ind
            for ind in enumerate_independent_sets(restricted)
            if ind.A == frozenset({3}) and ind.B == frozenset({1})
        )
        assert not scond_holds_for(dist, witness)

    def test_ncond_witness_is_a_subset(self, restricted):
        # uniform weights overload class 3 relative to its neighbors
        uniform = build_distribution(
            restricted, {edge: Fraction(1, 5) for edge in restricted.F}
        )
        report = check_ncond(uniform)
        assert not report.holds
        assert report.witness is not None


class TestSeparableEquivalence:
    @pytest.mark.parametrize("n_c,n_s,edges", SEPARABLE_BM)
    def test_three_verdicts_agree(self, n_c, n_s, edges):
        st = build_bm(n_c, n_s, edges)
        rng = random.Random(42)
        for _ in range(20):
            dist = random_distribution(st, rng)
            verdicts = (
                check_ncond(dist).holds,
                check_scond(dist).holds,
                check_separable_cond(dist).holds,
            )
            assert len(set(verdicts)) == 1, (edges, dist.weights, verdicts)

    def test_non_separable_reported(self, chain_bm):
        dist = build_distribution(
            chain_bm, {edge: Fraction(1, 9) for edge in chain_bm.F}
        )
        report = check_separable_cond(dist)
        assert not report.holds
        assert report.witness == "not separable"


class TestSimulation:
    def test_tau1_reproducible(self, restricted, fcfs):
        dist = restricted_dist(restricted)
        a = estimate_tau1(restricted, fcfs, dist, runs=20, horizon=500, seed=5)
        b = estimate_tau1(restricted, fcfs, dist, runs=20, horizon=500, seed=5)
        assert a == b
        assert a.censored == 0
        assert a.mean >= 1.0

    def test_tau1_censoring_counted(self, restricted, fcfs):
        dist = restricted_dist(restricted)
        est = estimate_tau1(restricted, fcfs, dist, runs=10, horizon=1, seed=1)
        assert est.censored + len(est.samples) == 10


class TestAdvice:
    def test_restricted_fcfs(self, restricted, fcfs):
        dist = restricted_dist(restricted)
        advice = advise_stability(restricted, fcfs, dist)
        assert advice.ncond.holds
        assert not advice.scond.holds

    def test_separable_ml_positive(self):
        n_c, n_s, edges = SEPARABLE_BM[1]
        st = build_bm(n_c, n_s, edges)
        dist = build_distribution(
            st, {edge: Fraction(1, len(st.F)) for edge in st.F}
        )
        advice = advise_stability(st, Policy("ml"), dist)
        assert advice.scond.holds
        assert any(flag for _, flag in advice.cases)
