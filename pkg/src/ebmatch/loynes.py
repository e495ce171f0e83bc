"""Stationary buffer solutions on periodic inputs via backward coupling.

The input is a periodic sample of arriving couples.  Starting empty ever
further in the past and folding forward yields, per shift, a backward
scheme; when it stabilizes, the resulting per-shift buffers solve the
stationarity recursion (the buffer before time k+1 is the buffer before
time k stepped by the arrival at k).  Empty shifts cut the time axis into
segments carrying perfect matchings, which assemble into a periodic
bi-infinite matching.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import run, run_final
from .errors import (
    ArrivalNotInF,
    ImperfectSegment,
    NoConstructionPoints,
    StationarityViolation,
)
from .model import MatchingStructure
from .policy import Policy
from .state import EMPTY_BUFFER, ArrivalQuadruple, BufferDetail


@dataclass(frozen=True)
class PeriodicSample:
    """Arrivals at times 0..period-1, repeated over all of time."""

    structure: MatchingStructure
    arrivals: tuple[ArrivalQuadruple, ...]

    @property
    def period(self) -> int:
        return len(self.arrivals)

    def event(self, k: int) -> ArrivalQuadruple:
        return self.arrivals[k % self.period]

    def window(self, start: int, length: int):
        return [self.event(start + i) for i in range(length)]


def periodic_sample(structure: MatchingStructure, pairs) -> PeriodicSample:
    arrivals = []
    for c, s in pairs:
        if (c, s) not in structure.F:
            raise ArrivalNotInF(f"couple ({c}, s{s}) cannot arrive")
        arrivals.append(ArrivalQuadruple(c=c, s=s))
    return PeriodicSample(structure=structure, arrivals=tuple(arrivals))


@dataclass(frozen=True)
class StationarySolution:
    """Per-shift stationary buffers: values[k] is the buffer just before
    the arrival at time k (mod period)."""

    sample: PeriodicSample
    values: tuple[BufferDetail, ...]
    coupling_depth: int

    @property
    def period(self) -> int:
        return len(self.values)


def _advance_one_period(structure, policy, sample, start, buffer) -> BufferDetail:
    events = sample.window(start, sample.period)
    return run_final(
        structure,
        policy,
        [(a.c, a.s) for a in events],
        sigma_rows=[a.sigma_row for a in events],
        gamma_rows=[a.gamma_row for a in events],
        initial=buffer,
        check_arrivals=False,
    )


def backward_coupling(
    structure: MatchingStructure,
    policy: Policy,
    sample: PeriodicSample,
    max_backsteps: int = 10000,
) -> StationarySolution | None:
    """Stationary solution of the periodic input, or None.

    Per shift, the buffer obtained from an empty start n periods in the
    past is iterated until one extra period changes nothing; the coupled
    values are then verified against the one-step recursion.  Returns None
    when no coupling happens within ``max_backsteps`` arrivals, the
    signature of an unstable sample.
    """
    p = sample.period
    values = [EMPTY_BUFFER] * p
    depth = 0
    coupled = False
    while depth * p < max_backsteps:
        new_values = [
            _advance_one_period(structure, policy, sample, k, values[k])
            for k in range(p)
        ]
        depth += 1
        if new_values == values:
            coupled = True
            break
        values = new_values
    if not coupled:
        return None
    for k in range(p):
        a = sample.event(k)
        nxt = run_final(
            structure,
            policy,
            [(a.c, a.s)],
            sigma_rows=[a.sigma_row],
            gamma_rows=[a.gamma_row],
            initial=values[k],
            check_arrivals=False,
        )
        if nxt != values[(k + 1) % p]:
            raise StationarityViolation(
                f"coupled values break the recursion at shift {k}"
            )
    # depth counts the extra confirmation period
    return StationarySolution(
        sample=sample, values=tuple(values), coupling_depth=depth - 1
    )


def construction_points(solution: StationarySolution) -> frozenset[int]:
    """Shifts whose stationary buffer is empty."""
    return frozenset(
        k for k, v in enumerate(solution.values) if v.is_empty
    )


@dataclass(frozen=True)
class PeriodicMatching:
    """A periodic bi-infinite matching: matched (customer time, server
    time) pairs, times taken modulo the period."""

    period: int
    pairs: frozenset[tuple[int, int]]

    @property
    def is_perfect(self) -> bool:
        return (
            sorted(c % self.period for c, _ in self.pairs) == list(range(self.period))
            and sorted(s % self.period for _, s in self.pairs)
            == list(range(self.period))
        )


def biinfinite_matching(
    structure: MatchingStructure,
    policy: Policy,
    solution: StationarySolution,
) -> PeriodicMatching:
    """Assemble the matching carried by the stationary solution.

    Each segment between consecutive empty shifts is replayed from an
    empty buffer; segments must match perfectly.
    """
    sample = solution.sample
    p = solution.period
    points = sorted(construction_points(solution))
    if not points:
        raise NoConstructionPoints("stationary buffer is never empty")
    pairs: set[tuple[int, int]] = set()
    for idx, start in enumerate(points):
        end = points[idx + 1] if idx + 1 < len(points) else points[0] + p
        if end == start:
            continue
        length = end - start
        if length == 0:
            continue
        trace = run(
            structure,
            policy,
            sample.window(start, length),
            check_arrivals=False,
        )
        if not trace.is_perfect:
            raise ImperfectSegment(
                f"segment [{start}, {end}) leaves {trace.final_buffer}"
            )
        for ci, si in trace.matches:
            pairs.add(((start + ci) % p, (start + si) % p))
    return PeriodicMatching(period=p, pairs=frozenset(pairs))


def check_renovation(
    structure: MatchingStructure,
    policy: Policy,
    sample: PeriodicSample,
    couples,
    window: int,
    max_backsteps: int = 10000,
) -> bool:
    """Whether every shift admits a renovation epoch within ``window``.

    ``couples`` is a list of (c_word, s_word) erasing couples whose
    concatenation, m arrivals long, must occur in the input right after an
    epoch l <= window - m at which the buffer started empty at any past
    time is empty again.  The everywhere-in-the-past requirement is decided
    through the coupled stationary solution, so an uncoupled (unstable)
    sample yields False.
    """
    solution = backward_coupling(structure, policy, sample, max_backsteps)
    if solution is None:
        return False
    p = sample.period
    block = []
    for c_word, s_word in couples:
        block.extend(zip(c_word, s_word))
    m = len(block)
    if window < m:
        return False
    depth_arrivals = (solution.coupling_depth + 1) * p
    for t in range(p):
        found = False
        for l in range(window - m + 1):
            # the block must sit right after epoch l
            if any(
                (sample.event(t + l + i).c, sample.event(t + l + i).s) != block[i]
                for i in range(m)
            ):
                continue
            # empty at l from an empty start at t and from every past start
            if not _empty_from_past(
                structure, policy, sample, t, l, depth_arrivals
            ):
                continue
            if not solution.values[(t + l) % p].is_empty:
                continue
            found = True
            break
        if not found:
            return False
    return True


def _empty_from_past(structure, policy, sample, t, l, depth_arrivals) -> bool:
    """Empty buffer at time t+l when starting empty at t-k, for all k up to
    the coupling depth (beyond it, the stationary value decides)."""
    for k in range(0, depth_arrivals + 1):
        events = sample.window(t - k, k + l)
        left = run_final(
            structure,
            policy,
            [(a.c, a.s) for a in events],
            sigma_rows=[a.sigma_row for a in events],
            gamma_rows=[a.gamma_row for a in events],
            check_arrivals=False,
        )
        if not left.is_empty:
            return False
    return True


def forward_coupling_check(
    structure: MatchingStructure,
    policy: Policy,
    solution: StationarySolution,
    initial: BufferDetail,
    max_steps: int = 10000,
) -> int | None:
    """First time at which the trajectory started in ``initial`` before
    time 0 merges with the stationary one; None when censored."""
    sample = solution.sample
    p = solution.period
    buffer = initial
    for n in range(max_steps + 1):
        if buffer == solution.values[n % p]:
            return n
        a = sample.event(n)
        buffer = run_final(
            structure,
            policy,
            [(a.c, a.s)],
            sigma_rows=[a.sigma_row],
            gamma_rows=[a.gamma_row],
            initial=buffer,
            check_arrivals=False,
        )
    return None
