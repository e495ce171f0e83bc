"""Running the matching dynamics over arrival streams.

Two execution paths: a traced run that records matches and per-step
buffers, and a fast final-buffer path through the kernel.  Items are
identified by arrival index; items already buffered at the start carry
negative indices (the k-th initial item, oldest first, has index -(k+1)).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernel
from .errors import ArrivalNotInF, NotAdmissibleInput, ProfileLengthMismatch
from .model import MatchingStructure
from .policy import Policy, choose_position
from .state import (
    EMPTY_BUFFER,
    ArrivalQuadruple,
    BufferDetail,
    Word,
)


@dataclass(frozen=True)
class MatchingTrace:
    """Outcome of a traced run.

    ``matches`` pairs customer and server arrival indices in match order.
    ``steps`` holds the buffer after each event.  The final buffer words
    are the unmatched customers and servers, oldest first.
    """

    matches: tuple[tuple[int, int], ...]
    steps: tuple[BufferDetail, ...]
    final_buffer: BufferDetail
    final_customer_indices: tuple[int, ...]
    final_server_indices: tuple[int, ...]
    n_customer_arrivals: int
    n_server_arrivals: int

    @property
    def is_perfect(self) -> bool:
        return self.final_buffer.is_empty


def _fold_traced(structure, policy, events, initial: BufferDetail) -> MatchingTrace:
    w = [(cls, -(k + 1)) for k, cls in enumerate(initial.w)]
    z = [(cls, -(k + 1)) for k, cls in enumerate(initial.z)]
    matches = []
    steps = []
    n_c = n_s = 0
    for c, c_idx, s, s_idx, sig_row, gam_row in events:
        pos_s = pos_c = None
        if c is not None:
            n_c += 1
            pos_s = choose_position(
                structure, policy, [cls for cls, _ in z], "c", c, sig_row
            )
        if s is not None:
            n_s += 1
            pos_c = choose_position(
                structure, policy, [cls for cls, _ in w], "s", s, gam_row
            )
        if c is not None and s is not None:
            if pos_s is not None and pos_c is not None:
                matches.append((c_idx, z.pop(pos_s)[1]))
                matches.append((w.pop(pos_c)[1], s_idx))
            elif pos_s is not None:
                matches.append((c_idx, z.pop(pos_s)[1]))
                z.append((s, s_idx))
            elif pos_c is not None:
                matches.append((w.pop(pos_c)[1], s_idx))
                w.append((c, c_idx))
            elif (c, s) in structure.E:
                matches.append((c_idx, s_idx))
            else:
                w.append((c, c_idx))
                z.append((s, s_idx))
        elif c is not None:
            if pos_s is not None:
                matches.append((c_idx, z.pop(pos_s)[1]))
            else:
                w.append((c, c_idx))
        elif s is not None:
            if pos_c is not None:
                matches.append((w.pop(pos_c)[1], s_idx))
            else:
                z.append((s, s_idx))
        steps.append(
            BufferDetail(w=tuple(cls for cls, _ in w), z=tuple(cls for cls, _ in z))
        )
    final = steps[-1] if steps else BufferDetail(w=initial.w, z=initial.z)
    return MatchingTrace(
        matches=tuple(matches),
        steps=tuple(steps),
        final_buffer=final,
        final_customer_indices=tuple(idx for _, idx in w),
        final_server_indices=tuple(idx for _, idx in z),
        n_customer_arrivals=n_c,
        n_server_arrivals=n_s,
    )


def run(
    structure: MatchingStructure,
    policy: Policy,
    arrivals,
    initial: BufferDetail = EMPTY_BUFFER,
    check_arrivals: bool = True,
) -> MatchingTrace:
    """Traced run over a sequence of arriving couples."""
    events = []
    for n, a in enumerate(arrivals):
        if not isinstance(a, ArrivalQuadruple):
            a = ArrivalQuadruple(*a)
        if check_arrivals and (a.c, a.s) not in structure.F:
            raise ArrivalNotInF(f"couple ({a.c}, s{a.s}) cannot arrive (step {n})")
        events.append((a.c, n, a.s, n, a.sigma_row, a.gamma_row))
    return _fold_traced(structure, policy, events, initial)


def match_words(
    structure: MatchingStructure,
    policy: Policy,
    c_word: Word,
    s_word: Word,
    sigma_rows=None,
    gamma_rows=None,
    initial: BufferDetail = EMPTY_BUFFER,
) -> MatchingTrace:
    """Traced run over two class words of possibly different lengths.

    The surplus prefix of the longer word enters alone, one item per step;
    the tails then enter pairwise, aligned at the end.  Indices in the
    trace are positions within each word.  ``sigma_rows``/``gamma_rows``
    give one preference row per letter of the respective word.
    """
    c_word, s_word = tuple(c_word), tuple(s_word)
    if sigma_rows is not None and len(sigma_rows) != len(c_word):
        raise ProfileLengthMismatch("one sigma row per customer letter required")
    if gamma_rows is not None and len(gamma_rows) != len(s_word):
        raise ProfileLengthMismatch("one gamma row per server letter required")
    n, m = len(c_word), len(s_word)
    events = []
    shift = n - m
    for k in range(max(n, m) - min(n, m)):
        if shift > 0:
            row = sigma_rows[k] if sigma_rows else None
            events.append((c_word[k], k, None, None, row, None))
        else:
            row = gamma_rows[k] if gamma_rows else None
            events.append((None, None, s_word[k], k, None, row))
    for k in range(min(n, m)):
        ci = k + max(shift, 0)
        si = k + max(-shift, 0)
        events.append(
            (
                c_word[ci],
                ci,
                s_word[si],
                si,
                sigma_rows[ci] if sigma_rows else None,
                gamma_rows[si] if gamma_rows else None,
            )
        )
    return _fold_traced(structure, policy, events, initial)


# --- fast path ---------------------------------------------------------------


def _rows_for(structure, policy, side, classes, rows):
    """Kernel preference rows for one side of an arrival stream."""
    if policy.kind in ("fcfs", "lcfs"):
        return [None] * len(classes)
    if policy.profile is not None:
        table = policy.profile.sigma if side == "c" else policy.profile.gamma
        return [table[k - 1] if k else None for k in classes]
    if rows is not None:
        return list(rows)
    neigh = structure.S if side == "c" else structure.C
    return [neigh(k) if k else None for k in classes]


def run_final(
    structure: MatchingStructure,
    policy: Policy,
    pairs,
    sigma_rows=None,
    gamma_rows=None,
    initial: BufferDetail = EMPTY_BUFFER,
    check_arrivals: bool = True,
) -> BufferDetail:
    """Final buffer of a run, computed by the selected kernel backend.

    ``pairs`` is a sequence of (c, s) couples; entries of 0 mean a lone
    arrival on the other side.
    """
    cs = [c for c, _ in pairs]
    ss = [s for _, s in pairs]
    if check_arrivals:
        for c, s in pairs:
            if c and s and (c, s) not in structure.F:
                raise NotAdmissibleInput(f"couple ({c}, s{s}) cannot arrive")
    s_masks, c_masks = kernel.masks(structure)
    sigs = _rows_for(structure, policy, "c", cs, sigma_rows)
    gams = _rows_for(structure, policy, "s", ss, gamma_rows)
    w, z = kernel.final_buffer(
        kernel.POLICY_CODES[policy.kind],
        s_masks,
        c_masks,
        cs,
        ss,
        sigs,
        gams,
        list(initial.w),
        list(initial.z),
    )
    return BufferDetail(w=tuple(w), z=tuple(z))


def unmatched_words(
    structure: MatchingStructure,
    policy: Policy,
    c_word: Word,
    s_word: Word,
    sigma_rows=None,
    gamma_rows=None,
    initial: BufferDetail = EMPTY_BUFFER,
    check_arrivals: bool = True,
) -> BufferDetail:
    """Final buffer left by two equal-length class words (fast path)."""
    if len(c_word) != len(s_word):
        raise NotAdmissibleInput("words must have equal length on the fast path")
    return run_final(
        structure,
        policy,
        list(zip(c_word, s_word)),
        sigma_rows=sigma_rows,
        gamma_rows=gamma_rows,
        initial=initial,
        check_arrivals=check_arrivals,
    )
