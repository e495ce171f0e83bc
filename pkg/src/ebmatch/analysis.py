"""Structural properties of disciplines: sub-additivity, non-expansiveness,
erasing couples.

All checks are exhaustive over the stated budgets and deterministic: inputs
are enumerated in lexicographic order and the first counterexample (or
witness) found is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import kernel
from .engine import run_final, unmatched_words
from .errors import BudgetExceeded, NotAdmissibleInput, SearchExhausted
from .model import MatchingStructure, check_bi_separable
from .policy import (
    Policy,
    arrival_row_choices,
    preference_word_choices,
    select_match,
    step_class,
)
from .state import (
    EMPTY_BUFFER,
    ArrivalQuadruple,
    BufferDetail,
    Word,
    enumerate_class_details,
    l1_distance,
    validate_buffer,
)

Couple = tuple[Word, Word]


def _check_couples_in_f(structure: MatchingStructure, c_word: Word, s_word: Word):
    if len(c_word) != len(s_word):
        raise NotAdmissibleInput("couple words must have equal length")
    for c, s in zip(c_word, s_word):
        if (c, s) not in structure.F:
            raise NotAdmissibleInput(f"couple ({c}, s{s}) cannot arrive")


def admissible_words(structure: MatchingStructure, length: int):
    """All input words of ``length`` couples, lexicographic order."""
    return itertools.product(sorted(structure.F), repeat=length)


def _split_rows(row_word):
    sigs = tuple(sig for sig, _ in row_word)
    gams = tuple(gam for _, gam in row_word)
    return sigs, gams


# --- sub-additivity -----------------------------------------------------------


@dataclass(frozen=True)
class SubadditivityCounterexample:
    """Two input pieces whose concatenation leaves more items unmatched
    than the two pieces separately."""

    piece1: Couple
    piece2: Couple
    rows1: tuple
    rows2: tuple
    combined: BufferDetail
    left1: BufferDetail
    left2: BufferDetail

    @property
    def combined_unmatched(self) -> int:
        return self.combined.size()

    @property
    def split_unmatched(self) -> int:
        return self.left1.size() + self.left2.size()


def _subadd_violates(combined: BufferDetail, left1: BufferDetail, left2: BufferDetail):
    return len(combined.w) > len(left1.w) + len(left2.w) or len(
        combined.z
    ) > len(left1.z) + len(left2.z)


def check_subadditive(
    structure: MatchingStructure,
    policy: Policy,
    max_len: int = 3,
    pieces: tuple[Couple, Couple] | None = None,
    length_cap: int = 3,
) -> SubadditivityCounterexample | None:
    """Search for a sub-additivity violation; None means none exists
    within the budget.

    Without ``pieces``, every ordered pair of input words of up to
    ``max_len`` couples each is checked, ranging over all preference rows
    the arrivals can carry.  With ``pieces = ((c1, s1), (c2, s2))`` only
    that pair of words is checked (still ranging over preferences).
    """
    if pieces is not None:
        return _check_subadd_explicit(structure, policy, *pieces)
    if max_len > length_cap:
        raise BudgetExceeded(f"piece length {max_len} exceeds cap {length_cap}")
    s_masks, c_masks = kernel.masks(structure)
    code = kernel.POLICY_CODES[policy.kind]

    # outcomes of every (piece, preference word); identical final buffers
    # are deduplicated, keeping the lexicographically first witness
    outcomes = []
    reachable: dict[BufferDetail, tuple] = {}
    for length in range(1, max_len + 1):
        for piece in admissible_words(structure, length):
            for row_word in preference_word_choices(structure, policy, piece):
                sigs, gams = _split_rows(row_word)
                w, z = kernel.final_buffer(
                    code,
                    s_masks,
                    c_masks,
                    [c for c, _ in piece],
                    [s for _, s in piece],
                    _kernel_rows(structure, policy, "c", [c for c, _ in piece], sigs),
                    _kernel_rows(structure, policy, "s", [s for _, s in piece], gams),
                    [],
                    [],
                )
                left = BufferDetail(w=tuple(w), z=tuple(z))
                outcomes.append((piece, row_word, left))
                if left not in reachable:
                    reachable[left] = (piece, row_word)

    for left1, (piece1, rows1) in sorted(
        reachable.items(), key=lambda kv: (kv[0].w, kv[0].z)
    ):
        init_w = list(left1.w)
        init_z = list(left1.z)
        n1w, n1z = len(init_w), len(init_z)
        for piece2, rows2, left2 in outcomes:
            sigs, gams = _split_rows(rows2)
            w, z = kernel.final_buffer(
                code,
                s_masks,
                c_masks,
                [c for c, _ in piece2],
                [s for _, s in piece2],
                _kernel_rows(structure, policy, "c", [c for c, _ in piece2], sigs),
                _kernel_rows(structure, policy, "s", [s for _, s in piece2], gams),
                init_w,
                init_z,
            )
            if len(w) > n1w + len(left2.w) or len(z) > n1z + len(left2.z):
                cex = _assemble_counterexample(
                    structure, policy, piece1, rows1, piece2, rows2, left1, left2
                )
                if cex is not None:
                    return cex
    return None


def _kernel_rows(structure, policy, side, classes, rows):
    if policy.kind in ("fcfs", "lcfs"):
        return [None] * len(classes)
    if policy.profile is not None:
        table = policy.profile.sigma if side == "c" else policy.profile.gamma
        return [table[k - 1] for k in classes]
    neigh = structure.S if side == "c" else structure.C
    return [r if r is not None else neigh(k) for k, r in zip(classes, rows)]


def _assemble_counterexample(
    structure, policy, piece1, rows1, piece2, rows2, left1, left2
):
    """Replay the concatenated input directly and keep the violation only
    if it reproduces (guards the piecewise evaluation)."""
    pairs = list(piece1) + list(piece2)
    rows = list(rows1) + list(rows2)
    sigs, gams = _split_rows(rows)
    combined = unmatched_words(
        structure,
        policy,
        tuple(c for c, _ in pairs),
        tuple(s for _, s in pairs),
        sigma_rows=_kernel_rows(structure, policy, "c", [c for c, _ in pairs], sigs),
        gamma_rows=_kernel_rows(structure, policy, "s", [s for _, s in pairs], gams),
    )
    if not _subadd_violates(combined, left1, left2):
        return None
    c1 = tuple(c for c, _ in piece1)
    s1 = tuple(s for _, s in piece1)
    c2 = tuple(c for c, _ in piece2)
    s2 = tuple(s for _, s in piece2)
    return SubadditivityCounterexample(
        piece1=(c1, s1),
        piece2=(c2, s2),
        rows1=tuple(rows1),
        rows2=tuple(rows2),
        combined=combined,
        left1=left1,
        left2=left2,
    )


def _check_subadd_explicit(structure, policy, piece1, piece2):
    c1, s1 = piece1
    c2, s2 = piece2
    _check_couples_in_f(structure, c1, s1)
    _check_couples_in_f(structure, c2, s2)
    pairs1 = list(zip(c1, s1))
    pairs2 = list(zip(c2, s2))
    for rows1 in preference_word_choices(structure, policy, pairs1):
        sig1, gam1 = _split_rows(rows1)
        left1 = unmatched_words(
            structure,
            policy,
            c1,
            s1,
            sigma_rows=_kernel_rows(structure, policy, "c", c1, sig1),
            gamma_rows=_kernel_rows(structure, policy, "s", s1, gam1),
        )
        for rows2 in preference_word_choices(structure, policy, pairs2):
            sig2, gam2 = _split_rows(rows2)
            left2 = unmatched_words(
                structure,
                policy,
                c2,
                s2,
                sigma_rows=_kernel_rows(structure, policy, "c", c2, sig2),
                gamma_rows=_kernel_rows(structure, policy, "s", s2, gam2),
            )
            cex = _assemble_counterexample(
                structure, policy, pairs1, rows1, pairs2, rows2, left1, left2
            )
            if cex is not None:
                return cex
    return None


# --- non-expansiveness --------------------------------------------------------


@dataclass(frozen=True)
class NonexpansivenessCounterexample:
    """Two class details moved further apart by the same arrival."""

    detail_a: object
    detail_b: object
    arrival: ArrivalQuadruple
    distance_before: int
    distance_after: int


def check_nonexpansive(
    structure: MatchingStructure, policy: Policy, max_count: int = 2
) -> NonexpansivenessCounterexample | None:
    """Search pairs of class details (counts up to ``max_count``) for an
    arrival increasing their l1 distance; None means none exists."""
    details = enumerate_class_details(structure, max_count)
    couples = sorted(structure.F)
    for a in details:
        for b in details:
            before = l1_distance(a, b)
            for c, s in couples:
                for sig_row, gam_row in arrival_row_choices(structure, policy, c, s):
                    arrival = ArrivalQuadruple(c=c, s=s, sigma_row=sig_row, gamma_row=gam_row)
                    after = l1_distance(
                        step_class(structure, policy, a, arrival, check_arrival=False),
                        step_class(structure, policy, b, arrival, check_arrival=False),
                    )
                    if after > before:
                        return NonexpansivenessCounterexample(
                            detail_a=a,
                            detail_b=b,
                            arrival=arrival,
                            distance_before=before,
                            distance_after=after,
                        )
    return None


@dataclass(frozen=True)
class ConsistencyViolation:
    """Two count vectors where the selector picks classes that are loaded
    in both vectors yet differ."""

    side: str
    detail_a: object
    detail_b: object
    entering_class: int
    pref_row: tuple
    pick_a: int
    pick_b: int


def find_consistency_violation(
    structure: MatchingStructure, policy: Policy, max_count: int = 2
) -> ConsistencyViolation | None:
    """Search for selector picks l = pick(a), l' = pick(b) with l loaded in
    b and l' loaded in a but l != l'.  None when the selector is consistent
    over the budget."""
    details = enumerate_class_details(structure, max_count)
    for a in details:
        for b in details:
            for side, classes in (("c", structure.customers), ("s", structure.servers)):
                for k in classes:
                    row_space = (
                        itertools.permutations(structure.S(k))
                        if side == "c"
                        else itertools.permutations(structure.C(k))
                    )
                    for row in row_space:
                        pa = select_match(structure, policy, a, side, k, row)
                        pb = select_match(structure, policy, b, side, k, row)
                        if pa is None or pb is None or pa == pb:
                            continue
                        counts_a = a.y if side == "c" else a.x
                        counts_b = b.y if side == "c" else b.x
                        if counts_a[pb - 1] > 0 and counts_b[pa - 1] > 0:
                            return ConsistencyViolation(
                                side=side,
                                detail_a=a,
                                detail_b=b,
                                entering_class=k,
                                pref_row=row,
                                pick_a=pa,
                                pick_b=pb,
                            )
    return None


# --- erasing couples ----------------------------------------------------------


@dataclass(frozen=True)
class ErasingCouple:
    """An input word that empties a target buffer under a discipline.

    Strong couples empty every admissible single-couple buffer and all of
    their own suffixes match perfectly; they erase any buffer content.
    """

    c: Word
    s: Word
    strength: str
    target: BufferDetail | None = None
    policy_kinds: tuple[str, ...] = ()


def _empties(
    structure: MatchingStructure,
    policy: Policy,
    c_word: Word,
    s_word: Word,
    initial: BufferDetail,
) -> bool:
    """Whether the word leaves an empty buffer for every preference draw."""
    pairs = list(zip(c_word, s_word))
    for row_word in preference_word_choices(structure, policy, pairs):
        sigs, gams = _split_rows(row_word)
        left = unmatched_words(
            structure,
            policy,
            c_word,
            s_word,
            sigma_rows=_kernel_rows(structure, policy, "c", c_word, sigs),
            gamma_rows=_kernel_rows(structure, policy, "s", s_word, gams),
            initial=initial,
            check_arrivals=False,
        )
        if not left.is_empty:
            return False
    return True


def verify_erasing_couple(
    structure: MatchingStructure,
    policy: Policy,
    target: BufferDetail,
    c_word: Word,
    s_word: Word,
) -> bool:
    """Whether (c_word, s_word) matches perfectly on its own and empties
    the target buffer, for every preference draw."""
    _check_couples_in_f(structure, c_word, s_word)
    if len(target.w) != len(target.z):
        raise NotAdmissibleInput("target buffer must be balanced")
    validate_buffer(structure, target.w, target.z)
    if not _empties(structure, policy, c_word, s_word, EMPTY_BUFFER):
        return False
    return _empties(structure, policy, c_word, s_word, target)


def verify_strong_erasing_couple(
    structure: MatchingStructure, policy: Policy, c_word: Word, s_word: Word
) -> bool:
    """Whether every suffix of the couple matches perfectly and the couple
    empties every admissible single-couple buffer."""
    _check_couples_in_f(structure, c_word, s_word)
    if not c_word:
        return False
    for k in range(1, len(c_word) + 1):
        if not _empties(structure, policy, c_word[-k:], s_word[-k:], EMPTY_BUFFER):
            return False
    for i in structure.customers:
        for j in structure.servers:
            if (i, j) in structure.E:
                continue
            seed = BufferDetail(w=(i,), z=(j,))
            if not _empties(structure, policy, c_word, s_word, seed):
                return False
    return True


def _coverage_subsets(structure: MatchingStructure):
    """Equal-size subset pairs whose neighborhoods cover the other side."""
    all_s = frozenset(structure.servers)
    all_c = frozenset(structure.customers)
    for q in range(1, min(structure.n_customers, structure.n_servers) + 1):
        for cc in itertools.combinations(structure.customers, q):
            if structure.S_of_set(cc) != all_s:
                continue
            for ss in itertools.combinations(structure.servers, q):
                if structure.C_of_set(ss) != all_c:
                    continue
                yield cc, ss


def _alternating_paths(structure: MatchingStructure, cc, ss):
    """Orderings forming a path i1-j1-i2-...-iq-jq with couples in F."""
    q = len(cc)
    for iseq in itertools.permutations(cc):
        for jseq in itertools.permutations(ss):
            ok = all((iseq[k], jseq[k]) in structure.F for k in range(q))
            ok = ok and all((iseq[k], jseq[k]) in structure.E for k in range(q))
            ok = ok and all(
                (iseq[k + 1], jseq[k]) in structure.E for k in range(q - 1)
            )
            if ok:
                yield iseq, jseq


def _path_candidates(structure: MatchingStructure, iseq, jseq):
    """Candidate strong couples read off one spanning path."""
    q = len(iseq)
    # complete case: walk the path pairs directly
    if all((i, j) in structure.E for i in iseq for j in jseq):
        yield iseq, jseq
    # pivot case: repeat the tail when the last server only sees the last
    # customer within the subset and the shifted couples can arrive
    if q >= 2 and all((iseq[k + 1], jseq[k]) in structure.F for k in range(q - 1)):
        last_seen = set(structure.C(jseq[-1])) & set(iseq)
        if last_seen == {iseq[-1]}:
            yield iseq + iseq[1:], jseq + jseq[:-1]


def _admissible_couple(structure: MatchingStructure, c_word, s_word) -> bool:
    return all((c, s) in structure.F for c, s in zip(c_word, s_word))


def construct_strong_erasing_couple(
    structure: MatchingStructure,
    policy_kinds: tuple[str, ...] = ("fcfs", "lcfs", "rand", "ml", "ms"),
    candidate_budget: int = 10000,
) -> ErasingCouple | None:
    """Search for a strong erasing couple valid for all ``policy_kinds``.

    Candidates come from spanning alternating paths over covering subset
    pairs and, on separable structures of order three or more, from cyclic
    picks across three maximal parts.  Every candidate is validated with
    verify_strong_erasing_couple before being returned.
    """
    policies = [Policy(kind) for kind in policy_kinds]

    def validated(c_word, s_word):
        if not _admissible_couple(structure, c_word, s_word):
            return False
        return all(
            verify_strong_erasing_couple(structure, p, c_word, s_word)
            for p in policies
        )

    seen = 0
    partition = check_bi_separable(structure)
    if partition is not None and partition.order >= 3:
        maximal = [p for p in partition.parts if p.is_maximal and p.A and p.B]
        for trio in itertools.permutations(maximal, 3):
            picks = [
                [(k, l) for k in sorted(p.A) for l in sorted(p.B) if (k, l) in structure.F]
                for p in trio
            ]
            for (k1, l1), (k2, l2), (k3, l3) in itertools.product(*picks):
                c_word = (k1, k2, k3)
                s_word = (l2, l3, l1)
                seen += 1
                if seen > candidate_budget:
                    raise BudgetExceeded("candidate budget exhausted")
                if validated(c_word, s_word):
                    return ErasingCouple(
                        c=c_word, s=s_word, strength="strong", policy_kinds=tuple(policy_kinds)
                    )
    for cc, ss in _coverage_subsets(structure):
        for iseq, jseq in _alternating_paths(structure, cc, ss):
            for c_word, s_word in _path_candidates(structure, iseq, jseq):
                seen += 1
                if seen > candidate_budget:
                    raise BudgetExceeded("candidate budget exhausted")
                if validated(c_word, s_word):
                    return ErasingCouple(
                        c=c_word, s=s_word, strength="strong", policy_kinds=tuple(policy_kinds)
                    )
    return None


def construct_erasing_couple(
    structure: MatchingStructure,
    policy: Policy,
    target: BufferDetail,
    max_single_len: int = 4,
) -> ErasingCouple:
    """Build an erasing couple of ``target`` by repeatedly erasing the last
    buffered couple with a short searched word.

    Raises SearchExhausted when no single-couple eraser of length up to
    ``max_single_len`` exists for some residual, or when the residual stops
    shrinking.
    """
    validate_buffer(structure, target.w, target.z)
    if len(target.w) != len(target.z):
        raise NotAdmissibleInput("target buffer must be balanced")
    if target.is_empty:
        return ErasingCouple(c=(), s=(), strength="erasing", target=target, policy_kinds=(policy.kind,))
    cache: dict[tuple[int, int], Couple] = {}
    residual = target
    c_acc: list[int] = []
    s_acc: list[int] = []
    for _ in range(len(target.w) + 1):
        if residual.is_empty:
            break
        pair = (residual.w[-1], residual.z[-1])
        if pair not in cache:
            cache[pair] = _search_single_eraser(structure, policy, pair, max_single_len)
        ec, es = cache[pair]
        c_acc.extend(ec)
        s_acc.extend(es)
        new_residual = _worst_residual(
            structure, policy, target, tuple(c_acc), tuple(s_acc)
        )
        if new_residual.size() >= residual.size():
            raise SearchExhausted("residual stopped shrinking")
        residual = new_residual
    c_word, s_word = tuple(c_acc), tuple(s_acc)
    if not verify_erasing_couple(structure, policy, target, c_word, s_word):
        raise SearchExhausted("constructed couple failed verification")
    return ErasingCouple(
        c=c_word, s=s_word, strength="erasing", target=target, policy_kinds=(policy.kind,)
    )


def _worst_residual(structure, policy, target, c_word, s_word) -> BufferDetail:
    """Largest residual buffer over preference draws after feeding the
    accumulated word into the target."""
    worst = None
    pairs = list(zip(c_word, s_word))
    for row_word in preference_word_choices(structure, policy, pairs):
        sigs, gams = _split_rows(row_word)
        left = unmatched_words(
            structure,
            policy,
            c_word,
            s_word,
            sigma_rows=_kernel_rows(structure, policy, "c", c_word, sigs),
            gamma_rows=_kernel_rows(structure, policy, "s", s_word, gams),
            initial=target,
            check_arrivals=False,
        )
        if worst is None or left.size() > worst.size():
            worst = left
    return worst


def _search_single_eraser(
    structure: MatchingStructure, policy: Policy, pair: tuple[int, int], max_len: int
) -> Couple:
    """Shortest word erasing the single-couple buffer (i, j), by exhaustive
    search in lexicographic order."""
    seed = BufferDetail(w=(pair[0],), z=(pair[1],))
    for length in range(1, max_len + 1):
        for word in admissible_words(structure, length):
            c_word = tuple(c for c, _ in word)
            s_word = tuple(s for _, s in word)
            if not _empties(structure, policy, c_word, s_word, EMPTY_BUFFER):
                continue
            if _empties(structure, policy, c_word, s_word, seed):
                return c_word, s_word
    raise SearchExhausted(
        f"no eraser of ({pair[0]}, s{pair[1]}) within length {max_len}"
    )
