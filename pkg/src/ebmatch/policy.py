"""Matching disciplines.

Five disciplines are supported.  'fcfs' and 'lcfs' pick the oldest or
youngest compatible buffered item.  'rand', 'ml' and 'ms' pick a class
(first non-empty preferred class, most loaded, least loaded) and then the
oldest buffered item of that class; they only read class counts, so they
also act on class details.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ArrivalNotInF, NotClassAdmissible
from .model import MatchingStructure
from .state import (
    ArrivalQuadruple,
    BufferDetail,
    ClassDetail,
    PreferenceProfile,
    PrefRow,
    validate_profile,
)

KINDS = ("fcfs", "lcfs", "rand", "ml", "ms")
CLASS_ADMISSIBLE = ("rand", "ml", "ms")
SUBADDITIVE_KINDS = ("fcfs", "lcfs", "rand", "ml")


@dataclass(frozen=True)
class Policy:
    """A discipline plus, optionally, a fixed preference profile.

    With ``profile`` set, every arrival uses the same preference rows
    (for 'rand' this is a strict priority discipline).  Without it,
    preference rows travel with each arrival.
    """

    kind: str
    profile: PreferenceProfile | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown discipline {self.kind!r}")

    @property
    def class_admissible(self) -> bool:
        return self.kind in CLASS_ADMISSIBLE

    @property
    def uses_preferences(self) -> bool:
        return self.kind in CLASS_ADMISSIBLE


def select_class(kind: str, counts, pref_row: PrefRow) -> int | None:
    """Pick a class among those with positive count, or None.

    ``counts`` maps class to its buffered count; ``pref_row`` ranks the
    candidate classes and breaks ties.
    """
    loaded = [k for k in pref_row if counts.get(k, 0) > 0]
    if not loaded:
        return None
    if kind == "rand":
        return loaded[0]
    if kind == "ml":
        best = max(counts[k] for k in loaded)
    elif kind == "ms":
        best = min(counts[k] for k in loaded)
    else:
        raise NotClassAdmissible(f"discipline {kind!r} has no class selector")
    for k in loaded:
        if counts[k] == best:
            return k
    raise AssertionError("unreachable")


def select_match(
    structure: MatchingStructure,
    policy: Policy,
    detail: ClassDetail,
    side: str,
    entering_class: int,
    pref_row: PrefRow | None = None,
) -> int | None:
    """Class-level selector: class matched by an entering item, or None.

    ``side`` is 'c' when a customer of ``entering_class`` scans the server
    counts, 's' for the symmetric case.
    """
    if not policy.class_admissible:
        raise NotClassAdmissible(f"discipline {policy.kind!r} is order-driven")
    row = _resolve_row(structure, policy, side, entering_class, pref_row)
    if side == "c":
        counts = {j: detail.y[j - 1] for j in structure.S(entering_class)}
    else:
        counts = {i: detail.x[i - 1] for i in structure.C(entering_class)}
    return select_class(policy.kind, counts, row)


def _resolve_row(
    structure: MatchingStructure,
    policy: Policy,
    side: str,
    entering_class: int,
    pref_row: PrefRow | None,
) -> PrefRow:
    if policy.profile is not None:
        if side == "c":
            return policy.profile.sigma[entering_class - 1]
        return policy.profile.gamma[entering_class - 1]
    if pref_row is not None:
        return pref_row
    # canonical fallback for order-driven disciplines (row is ignored)
    return structure.S(entering_class) if side == "c" else structure.C(entering_class)


def choose_position(
    structure: MatchingStructure,
    policy: Policy,
    word,
    side: str,
    entering_class: int,
    pref_row: PrefRow | None = None,
) -> int | None:
    """0-based position in ``word`` taken by the entering item, or None.

    ``word`` is the opposite-side buffer word, oldest first.  Class-driven
    disciplines remove the oldest item of the selected class.
    """
    neighbors = (
        structure.S(entering_class) if side == "c" else structure.C(entering_class)
    )
    compat = [k for k, cls in enumerate(word) if cls in neighbors]
    if not compat:
        return None
    if policy.kind == "fcfs":
        return compat[0]
    if policy.kind == "lcfs":
        return compat[-1]
    counts: dict[int, int] = {}
    for k in compat:
        counts[word[k]] = counts.get(word[k], 0) + 1
    row = _resolve_row(structure, policy, side, entering_class, pref_row)
    cls = select_class(policy.kind, counts, row)
    if cls is None:
        return None
    return next(k for k in compat if word[k] == cls)


def step_buffer(
    structure: MatchingStructure,
    policy: Policy,
    buffer: BufferDetail,
    arrival: ArrivalQuadruple,
    check_arrival: bool = True,
) -> BufferDetail:
    """Buffer after one arriving couple.

    Each member first scans the opposite buffer.  The two are matched
    together only when both scans fail and the couple is compatible.
    """
    c, s = arrival.c, arrival.s
    if check_arrival and (c, s) not in structure.F:
        raise ArrivalNotInF(f"couple ({c}, s{s}) cannot arrive")
    w, z = list(buffer.w), list(buffer.z)
    pos_s = choose_position(structure, policy, z, "c", c, arrival.sigma_row)
    pos_c = choose_position(structure, policy, w, "s", s, arrival.gamma_row)
    if pos_s is not None and pos_c is not None:
        del z[pos_s]
        del w[pos_c]
    elif pos_s is not None:
        del z[pos_s]
        z.append(s)
    elif pos_c is not None:
        del w[pos_c]
        w.append(c)
    elif (c, s) not in structure.E:
        w.append(c)
        z.append(s)
    return BufferDetail(w=tuple(w), z=tuple(z))


def step_class(
    structure: MatchingStructure,
    policy: Policy,
    detail: ClassDetail,
    arrival: ArrivalQuadruple,
    check_arrival: bool = True,
) -> ClassDetail:
    """Class detail after one arriving couple (class-driven disciplines)."""
    if not policy.class_admissible:
        raise NotClassAdmissible(f"discipline {policy.kind!r} is order-driven")
    c, s = arrival.c, arrival.s
    if check_arrival and (c, s) not in structure.F:
        raise ArrivalNotInF(f"couple ({c}, s{s}) cannot arrive")
    x, y = list(detail.x), list(detail.y)
    matched_s = select_match(structure, policy, detail, "c", c, arrival.sigma_row)
    matched_c = select_match(structure, policy, detail, "s", s, arrival.gamma_row)
    if matched_s is not None and matched_c is not None:
        y[matched_s - 1] -= 1
        x[matched_c - 1] -= 1
    elif matched_s is not None:
        y[matched_s - 1] -= 1
        y[s - 1] += 1
    elif matched_c is not None:
        x[matched_c - 1] -= 1
        x[c - 1] += 1
    elif (c, s) not in structure.E:
        x[c - 1] += 1
        y[s - 1] += 1
    return ClassDetail(x=tuple(x), y=tuple(y))


# --- preference enumeration -------------------------------------------------


def sigma_rows(structure: MatchingStructure, c: int) -> tuple[PrefRow, ...]:
    return tuple(itertools.permutations(structure.S(c)))


def gamma_rows(structure: MatchingStructure, s: int) -> tuple[PrefRow, ...]:
    return tuple(itertools.permutations(structure.C(s)))


def arrival_row_choices(
    structure: MatchingStructure, policy: Policy, c: int, s: int
) -> tuple[tuple[PrefRow | None, PrefRow | None], ...]:
    """Preference rows that can influence one arrival of couple (c, s).

    A step only reads the rows of the two arriving classes, so ranging
    over these pairs covers every preference profile.  Order-driven and
    fixed-profile disciplines contribute a single choice.
    """
    if not policy.uses_preferences:
        return ((None, None),)
    if policy.profile is not None:
        return ((policy.profile.sigma[c - 1], policy.profile.gamma[s - 1]),)
    return tuple(itertools.product(sigma_rows(structure, c), gamma_rows(structure, s)))


def preference_word_choices(
    structure: MatchingStructure, policy: Policy, pairs
) -> "itertools.product":
    """Iterator over per-arrival row pairs for an input word of couples."""
    return itertools.product(
        *(arrival_row_choices(structure, policy, c, s) for c, s in pairs)
    )


def all_profiles(structure: MatchingStructure):
    """Every preference profile (exponential; small structures only)."""
    sig_space = [sigma_rows(structure, c) for c in structure.customers]
    gam_space = [gamma_rows(structure, s) for s in structure.servers]
    for sig in itertools.product(*sig_space):
        for gam in itertools.product(*gam_space):
            yield PreferenceProfile(sigma=sig, gamma=gam)


def uniform_profile(structure: MatchingStructure, rng) -> PreferenceProfile:
    """Profile with each row drawn uniformly among its orderings."""
    sig = tuple(
        tuple(rng.sample(structure.S(c), len(structure.S(c))))
        for c in structure.customers
    )
    gam = tuple(
        tuple(rng.sample(structure.C(s), len(structure.C(s))))
        for s in structure.servers
    )
    return validate_profile(structure, PreferenceProfile(sigma=sig, gamma=gam))
