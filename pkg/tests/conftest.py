"""Shared fixtures: the two three-class test structures, their reference
inputs, and known-good analysis artifacts used across the suite."""

import pytest

from ebmatch.model import build_bm, build_structure
from ebmatch.policy import Policy

# The "chain" compatibility graph on three customer and three server
# classes: customer i can be served by server i, plus the two off-diagonal
# edges (1,2) and (2,3).
CHAIN_E = ((1, 1), (1, 2), (2, 2), (2, 3), (3, 3))

# A restricted arrival graph on the same compatibility graph: only these
# five couples can arrive together.
RESTRICTED_F = ((1, 2), (2, 1), (2, 3), (3, 1), (3, 2))

# Strong erasing couple for the restricted structure under FCFS; its
# self-concatenation is strong under LCFS.
STRONG_C = (3, 3, 1, 2, 1, 2, 1, 2, 2)
STRONG_S = (1, 2, 2, 1, 2, 3, 2, 3, 3)

# Period-9 arrival pattern on the restricted structure.
PERIOD9 = (
    (1, 2),
    (2, 1),
    (1, 2),
    (2, 3),
    (1, 2),
    (2, 3),
    (2, 3),
    (3, 1),
    (3, 2),
)

# Stationary buffers of the period-9 pattern, one per shift, for the two
# order-driven disciplines.
FCFS_SOLUTION = (
    ((3, 3), (1, 2)),
    ((3, 3), (2, 2)),
    ((3, 3), (2, 1)),
    ((3, 3), (1, 2)),
    ((3,), (1,)),
    ((3,), (2,)),
    ((), ()),
    ((), ()),
    ((3,), (1,)),
)
LCFS_SOLUTION = (
    ((3, 3), (1, 2)),
    ((3, 3), (1, 2)),
    ((3, 3), (1, 1)),
    ((3, 3), (1, 2)),
    ((3,), (1,)),
    ((3,), (2,)),
    ((), ()),
    ((), ()),
    ((3,), (1,)),
)

# Reference arrival rates on the restricted structure (exact rationals as
# numerator/denominator pairs).
RESTRICTED_MU = {
    (1, 2): (1, 3),
    (2, 3): (1, 3),
    (2, 1): (1, 9),
    (3, 2): (1, 9),
    (3, 1): (1, 9),
}

# Three separable matching-in-pairs structures of order three, given as
# (n_customers, n_servers, E).
SEPARABLE_BM = (
    (3, 2, ((1, 2), (2, 2), (2, 1), (3, 1))),
    (3, 3, ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))),
    (
        5,
        4,
        (
            (1, 4),
            (1, 3),
            (2, 4),
            (2, 3),
            (3, 3),
            (3, 2),
            (3, 4),
            (3, 1),
            (4, 2),
            (4, 1),
            (5, 2),
            (5, 1),
        ),
    ),
)


@pytest.fixture(scope="session")
def chain_bm():
    """The chain graph with unrestricted arrivals."""
    return build_bm(3, 3, CHAIN_E)


@pytest.fixture(scope="session")
def restricted():
    """The chain graph with the restricted arrival graph."""
    return build_structure(3, 3, CHAIN_E, RESTRICTED_F)


@pytest.fixture(scope="session")
def fcfs():
    return Policy("fcfs")


@pytest.fixture(scope="session")
def lcfs():
    return Policy("lcfs")


def arr(c, s, sigma_row=None, gamma_row=None):
    """Arrival helper used across the suite."""
    from ebmatch.state import ArrivalQuadruple

    return ArrivalQuadruple(c=c, s=s, sigma_row=sigma_row, gamma_row=gamma_row)
