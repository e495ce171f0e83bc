"""Stability conditions on arrival distributions, decided exactly.

Arrival weights are rationals (fractions.Fraction); no floating point
enters any verdict.  The module also provides a Monte Carlo estimator of
the first return time to an empty buffer and an advisor aggregating the
known sufficient conditions for its integrability.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .model import (
    MatchingStructure,
    associated_digraph,
    check_bi_separable,
    detect_model_kind,
    enumerate_independent_sets,
    is_strongly_connected,
)
from .policy import Policy
from .state import EMPTY_BUFFER, ArrivalQuadruple
from .engine import run_final
from .errors import EbmatchError

Edge = tuple[int, int]


class DistributionError(EbmatchError):
    """Invalid arrival distribution."""


@dataclass(frozen=True)
class ArrivalDistribution:
    """Probability distribution on the arrival graph, exact weights."""

    structure: MatchingStructure
    weights: tuple[tuple[Edge, Fraction], ...]

    def prob(self, c: int, s: int) -> Fraction:
        for edge, p in self.weights:
            if edge == (c, s):
                return p
        return Fraction(0)

    def mass(self, edges) -> Fraction:
        edges = set(edges)
        return sum((p for e, p in self.weights if e in edges), Fraction(0))

    def customer_marginal(self, A) -> Fraction:
        A = set(A)
        return sum((p for (c, _), p in self.weights if c in A), Fraction(0))

    def server_marginal(self, B) -> Fraction:
        B = set(B)
        return sum((p for (_, s), p in self.weights if s in B), Fraction(0))


def build_distribution(structure: MatchingStructure, weights) -> ArrivalDistribution:
    """Validate a weight mapping: support within the arrival graph,
    non-negative exact weights summing to one."""
    items = []
    total = Fraction(0)
    for edge, p in sorted(weights.items()):
        if edge not in structure.F:
            c, s = edge
            raise DistributionError(f"couple ({c}, s{s}) cannot arrive")
        if isinstance(p, float):
            raise DistributionError("weights must be exact rationals, not floats")
        p = Fraction(p)
        if p < 0:
            raise DistributionError(f"negative weight for {edge}")
        total += p
        items.append((edge, p))
    if total != 1:
        raise DistributionError(f"weights sum to {total}, expected 1")
    return ArrivalDistribution(structure=structure, weights=tuple(items))


def random_distribution(
    structure: MatchingStructure, rng: random.Random, resolution: int = 100
) -> ArrivalDistribution:
    """Full-support distribution with random rational weights."""
    raw = {edge: rng.randint(1, resolution) for edge in sorted(structure.F)}
    total = sum(raw.values())
    return build_distribution(
        structure, {edge: Fraction(v, total) for edge, v in raw.items()}
    )


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of one drift condition, with a witness when it fails."""

    name: str
    holds: bool
    witness: object = None


def check_ncond(dist: ArrivalDistribution) -> ConditionReport:
    """Every non-empty proper class subset must arrive strictly slower than
    its compatible classes on the other side."""
    st = dist.structure
    for r in range(1, st.n_customers):
        for A in itertools.combinations(st.customers, r):
            if dist.customer_marginal(A) >= dist.server_marginal(st.S_of_set(A)):
                return ConditionReport(
                    name="ncond", holds=False, witness=("c", frozenset(A))
                )
    for r in range(1, st.n_servers):
        for B in itertools.combinations(st.servers, r):
            if dist.server_marginal(B) >= dist.customer_marginal(st.C_of_set(B)):
                return ConditionReport(
                    name="ncond", holds=False, witness=("s", frozenset(B))
                )
    return ConditionReport(name="ncond", holds=True)


def scond_holds_for(dist: ArrivalDistribution, ind) -> bool:
    """The independent-set inequality for one set: the compatible-arrival
    mass must exceed one minus the mass of compatible couples among the
    free classes."""
    st = dist.structure
    lhs = dist.customer_marginal(st.C_of_set(ind.B)) + dist.server_marginal(
        st.S_of_set(ind.A)
    )
    inner = {
        (c, s)
        for c in ind.free_customers
        for s in ind.free_servers
        if (c, s) in st.E
    }
    return lhs > 1 - dist.mass(inner)


def check_scond(dist: ArrivalDistribution, size_cap: int = 20) -> ConditionReport:
    """Whether the independent-set inequality holds for every two-sided
    independent set (both class sides non-empty)."""
    for ind in enumerate_independent_sets(dist.structure, size_cap=size_cap):
        if not ind.A or not ind.B:
            continue
        if not scond_holds_for(dist, ind):
            return ConditionReport(name="scond", holds=False, witness=ind)
    return ConditionReport(name="scond", holds=True)


def check_separable_cond(dist: ArrivalDistribution) -> ConditionReport:
    """On separable structures: each part must carry mass below one half."""
    st = dist.structure
    partition = check_bi_separable(st)
    if partition is None:
        return ConditionReport(
            name="separable-cond", holds=False, witness="not separable"
        )
    half = Fraction(1, 2)
    for part in partition.parts:
        # half the customer marginal plus half the server marginal: the
        # arrival mass attached to the part, each couple counting once
        # per endpoint
        attached = (
            dist.customer_marginal(part.A) + dist.server_marginal(part.B)
        ) / 2
        if attached >= half:
            return ConditionReport(name="separable-cond", holds=False, witness=part)
    return ConditionReport(name="separable-cond", holds=True)


# --- simulation ---------------------------------------------------------------


@dataclass(frozen=True)
class Tau1Estimate:
    """Monte Carlo summary of the first return time to an empty buffer."""

    runs: int
    horizon: int
    samples: tuple[int, ...]
    censored: int

    @property
    def mean(self) -> float:
        return sum(self.samples) / len(self.samples) if self.samples else float("nan")

    @property
    def max(self) -> int:
        return max(self.samples) if self.samples else 0

    @property
    def censored_fraction(self) -> float:
        return self.censored / self.runs


def _draw_arrival(structure, policy, dist, rng) -> ArrivalQuadruple:
    u = rng.random()
    acc = 0.0
    edge = dist.weights[-1][0]
    for e, p in dist.weights:
        acc += float(p)
        if u < acc:
            edge = e
            break
    c, s = edge
    if policy.uses_preferences and policy.profile is None:
        return ArrivalQuadruple(
            c=c,
            s=s,
            sigma_row=tuple(rng.sample(structure.S(c), len(structure.S(c)))),
            gamma_row=tuple(rng.sample(structure.C(s), len(structure.C(s)))),
        )
    return ArrivalQuadruple(c=c, s=s)


def estimate_tau1(
    structure: MatchingStructure,
    policy: Policy,
    dist: ArrivalDistribution,
    runs: int = 100,
    horizon: int = 10000,
    seed: int = 0,
) -> Tau1Estimate:
    """Simulate the return time to an empty buffer from an empty start.

    Each run draws couples from ``dist`` (and, for preference-driven
    disciplines without a fixed profile, uniform preference rows) with its
    own seeded generator; runs exceeding ``horizon`` steps are censored.
    """
    samples = []
    censored = 0
    for run_idx in range(runs):
        rng = random.Random(f"{seed}:{run_idx}")
        buffer = EMPTY_BUFFER
        tau = None
        for n in range(1, horizon + 1):
            a = _draw_arrival(structure, policy, dist, rng)
            buffer = run_final(
                structure,
                policy,
                [(a.c, a.s)],
                sigma_rows=[a.sigma_row],
                gamma_rows=[a.gamma_row],
                initial=buffer,
                check_arrivals=False,
            )
            if buffer.is_empty:
                tau = n
                break
        if tau is None:
            censored += 1
        else:
            samples.append(tau)
    return Tau1Estimate(
        runs=runs, horizon=horizon, samples=tuple(samples), censored=censored
    )


# --- advisor ------------------------------------------------------------------


@dataclass(frozen=True)
class StabilityAdvice:
    """Which known sufficient conditions for an integrable return time
    apply to a (structure, policy, distribution) triple."""

    cases: tuple[tuple[str, bool], ...]
    ncond: ConditionReport
    scond: ConditionReport

    @property
    def integrable_return_time(self) -> bool:
        return any(ok for _, ok in self.cases)


def advise_stability(
    structure: MatchingStructure,
    policy: Policy,
    dist: ArrivalDistribution,
    size_cap: int = 20,
) -> StabilityAdvice:
    """Evaluate the six known sufficient cases for an integrable first
    return time to the empty buffer."""
    strong = is_strongly_connected(associated_digraph(structure))
    ncond = check_ncond(dist)
    scond = check_scond(dist, size_cap=size_cap)
    separable = check_bi_separable(structure) is not None
    sep_cond = check_separable_cond(dist) if separable else None
    kind = detect_model_kind(structure)
    cases = (
        ("strongly-connected + scond", strong and scond.holds),
        ("strongly-connected + ncond + ml", strong and ncond.holds and policy.kind == "ml"),
        (
            "strongly-connected + separable + part-mass",
            strong and separable and sep_cond is not None and sep_cond.holds,
        ),
        ("bm + fcfs", kind == "bm" and policy.kind == "fcfs"),
        ("gm + fcfs", kind == "gm" and policy.kind == "fcfs"),
        ("gm + ml", kind == "gm" and policy.kind == "ml"),
    )
    return StabilityAdvice(cases=cases, ncond=ncond, scond=scond)
