"""Exception types shared across the package."""


class EbmatchError(Exception):
    """Base class for all package-specific errors."""


class StructureError(EbmatchError):
    """Invalid matching structure."""


class OutOfRangeEdge(StructureError):
    """An edge references a class outside the declared ranges."""


class DisconnectedMatchingGraph(StructureError):
    """The matching graph is not connected."""


class IsolatedArrivalVertex(StructureError):
    """Some class never appears in the arrival graph."""


class TooLarge(EbmatchError):
    """An exhaustive enumeration would exceed the configured size cap."""


class IncompatibleCoexistence(EbmatchError):
    """A buffer holds a compatible customer/server pair at the same time."""

    def __init__(self, customer_class: int, server_class: int):
        self.customer_class = customer_class
        self.server_class = server_class
        super().__init__(
            f"buffer holds compatible pair ({customer_class}, s{server_class})"
        )


class PositionOutOfRange(EbmatchError):
    """A 1-based word position is outside the word."""


class AlphabetMismatch(EbmatchError):
    """Two count vectors live over different alphabets."""


class ArrivalNotInF(EbmatchError):
    """An arriving couple is not a possible arrival."""


class NotClassAdmissible(EbmatchError):
    """Operation requires a policy defined on class counts."""


class ProfileLengthMismatch(EbmatchError):
    """A per-arrival preference sequence has the wrong length."""


class NotAdmissibleInput(EbmatchError):
    """An input word contains a couple outside the arrival graph."""


class BudgetExceeded(EbmatchError):
    """A search or enumeration budget was exhausted before completion."""


class SearchExhausted(EbmatchError):
    """A bounded search completed without finding the requested object."""


class StationarityViolation(EbmatchError):
    """A candidate stationary solution fails the shift recursion."""


class NoConstructionPoints(EbmatchError):
    """No shift of the stationary solution has an empty buffer."""


class ImperfectSegment(EbmatchError):
    """A segment between empty-buffer points left items unmatched."""


class ScenarioError(EbmatchError):
    """Invalid scenario file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
