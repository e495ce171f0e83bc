"""Buffer contents and arrival data.

Buffers are pairs of words (customer side, server side) stored oldest
first.  The class-count projection of a buffer is its "class detail".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import (
    AlphabetMismatch,
    ArrivalNotInF,
    IncompatibleCoexistence,
    PositionOutOfRange,
    ProfileLengthMismatch,
)
from .model import MatchingStructure

Word = tuple[int, ...]


def parse_word(text: str, server: bool = False) -> Word:
    """Parse a word: whitespace-separated class tokens, '-' for empty.

    Server tokens carry an 's' prefix ('s1 s2'); customer tokens are bare
    integers.  A run of single digits without spaces ('331') is accepted
    for either side as a compact form.
    """
    text = text.strip()
    if text in ("", "-"):
        return ()
    tokens = text.split()
    if len(tokens) == 1 and tokens[0].isdigit() and len(tokens[0]) > 1:
        return tuple(int(d) for d in tokens[0])
    out = []
    for tok in tokens:
        if server:
            if not tok.startswith("s") or not tok[1:].isdigit():
                raise ValueError(f"bad server token {tok!r}")
            out.append(int(tok[1:]))
        else:
            if tok.startswith("s"):
                raise ValueError(f"customer token {tok!r} has server prefix")
            out.append(int(tok))
    return tuple(out)


def format_word(word: Iterable[int], server: bool = False) -> str:
    word = tuple(word)
    if not word:
        return "-"
    prefix = "s" if server else ""
    return " ".join(f"{prefix}{k}" for k in word)


def commutative_image(word: Iterable[int], n_classes: int) -> tuple[int, ...]:
    """Per-class occurrence counts of a word."""
    counts = [0] * n_classes
    for k in word:
        if not (1 <= k <= n_classes):
            raise AlphabetMismatch(f"letter {k} outside 1..{n_classes}")
        counts[k - 1] += 1
    return tuple(counts)


def delete_at(word: Word, position: int) -> Word:
    """Word with the letter at 1-based ``position`` removed."""
    if not (1 <= position <= len(word)):
        raise PositionOutOfRange(f"position {position} in word of length {len(word)}")
    return word[: position - 1] + word[position:]


@dataclass(frozen=True)
class BufferDetail:
    """Unmatched customer and server words, oldest first."""

    w: Word
    z: Word

    @property
    def is_empty(self) -> bool:
        return not self.w and not self.z

    def size(self) -> int:
        return len(self.w) + len(self.z)


EMPTY_BUFFER = BufferDetail(w=(), z=())


def validate_buffer(structure: MatchingStructure, w: Word, z: Word) -> BufferDetail:
    """Build a buffer, rejecting coexisting compatible classes."""
    commutative_image(w, structure.n_customers)
    commutative_image(z, structure.n_servers)
    for i in set(w):
        for j in set(z):
            if (i, j) in structure.E:
                raise IncompatibleCoexistence(i, j)
    return BufferDetail(w=tuple(w), z=tuple(z))


@dataclass(frozen=True)
class ClassDetail:
    """Per-class unmatched counts (customer side x, server side y)."""

    x: tuple[int, ...]
    y: tuple[int, ...]

    @property
    def is_empty(self) -> bool:
        return not any(self.x) and not any(self.y)


def class_detail_of(structure: MatchingStructure, buffer: BufferDetail) -> ClassDetail:
    return ClassDetail(
        x=commutative_image(buffer.w, structure.n_customers),
        y=commutative_image(buffer.z, structure.n_servers),
    )


def l1_distance(a: ClassDetail, b: ClassDetail) -> int:
    if len(a.x) != len(b.x) or len(a.y) != len(b.y):
        raise AlphabetMismatch("class details over different alphabets")
    return sum(abs(p - q) for p, q in zip(a.x, b.x)) + sum(
        abs(p - q) for p, q in zip(a.y, b.y)
    )


def enumerate_buffers(
    structure: MatchingStructure, max_len: int, balanced: bool = False
) -> list[BufferDetail]:
    """All valid buffers with both words of length at most ``max_len``.

    With ``balanced=True`` only buffers with equally long sides are kept.
    """
    def words(n_classes, up_to):
        out = [()]
        for length in range(1, up_to + 1):
            out.extend(itertools.product(range(1, n_classes + 1), repeat=length))
        return out

    result = []
    for w in words(structure.n_customers, max_len):
        for z in words(structure.n_servers, max_len):
            if balanced and len(w) != len(z):
                continue
            try:
                result.append(validate_buffer(structure, w, z))
            except IncompatibleCoexistence:
                continue
    return result


def enumerate_class_details(
    structure: MatchingStructure, max_count: int
) -> list[ClassDetail]:
    """All valid class details with per-class counts at most ``max_count``."""
    out = []
    for x in itertools.product(range(max_count + 1), repeat=structure.n_customers):
        for y in itertools.product(range(max_count + 1), repeat=structure.n_servers):
            if any(
                x[c - 1] and y[s - 1] for c, s in structure.E
            ):
                continue
            out.append(ClassDetail(x=x, y=y))
    return out


# --- preferences and arrivals ----------------------------------------------

PrefRow = tuple[int, ...]


class PreferenceProfile(NamedTuple):
    """One preference order per class: sigma[c-1] ranks the server classes
    compatible with customer c, gamma[s-1] ranks the customer classes
    compatible with server s."""

    sigma: tuple[PrefRow, ...]
    gamma: tuple[PrefRow, ...]


def canonical_profile(structure: MatchingStructure) -> PreferenceProfile:
    """Profile ranking every neighborhood in increasing class order."""
    return PreferenceProfile(
        sigma=tuple(structure.S(c) for c in structure.customers),
        gamma=tuple(structure.C(s) for s in structure.servers),
    )


def validate_profile(
    structure: MatchingStructure, profile: PreferenceProfile
) -> PreferenceProfile:
    if len(profile.sigma) != structure.n_customers or len(profile.gamma) != structure.n_servers:
        raise ProfileLengthMismatch("profile rows do not cover all classes")
    for c in structure.customers:
        if sorted(profile.sigma[c - 1]) != sorted(structure.S(c)):
            raise ProfileLengthMismatch(f"sigma row for customer {c} is not a ranking of its neighbors")
    for s in structure.servers:
        if sorted(profile.gamma[s - 1]) != sorted(structure.C(s)):
            raise ProfileLengthMismatch(f"gamma row for server s{s} is not a ranking of its neighbors")
    return profile


class ArrivalQuadruple(NamedTuple):
    """One arrival: a couple plus the preference rows it enters with.

    ``sigma_row`` ranks the server classes compatible with ``c``;
    ``gamma_row`` ranks the customer classes compatible with ``s``.  Rows
    are ignored by order-driven disciplines and may be None.
    """

    c: int
    s: int
    sigma_row: PrefRow | None = None
    gamma_row: PrefRow | None = None


def make_arrival(
    structure: MatchingStructure,
    c: int,
    s: int,
    profile: PreferenceProfile | None = None,
) -> ArrivalQuadruple:
    if (c, s) not in structure.F:
        raise ArrivalNotInF(f"couple ({c}, s{s}) cannot arrive")
    if profile is None:
        return ArrivalQuadruple(c=c, s=s, sigma_row=structure.S(c), gamma_row=structure.C(s))
    return ArrivalQuadruple(
        c=c, s=s, sigma_row=profile.sigma[c - 1], gamma_row=profile.gamma[s - 1]
    )
