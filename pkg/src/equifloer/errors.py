"""Exception hierarchy.

Every error carries a short machine-parsable ``tag`` so the CLI can map
failures to single-line diagnostics.
"""

from __future__ import annotations


class EquifloerError(Exception):
    """Base class for all package errors."""

    tag = "error"

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context


class DiagramSyntaxError(EquifloerError):
    """Malformed or degenerate diagram file."""

    tag = "syntax-error"


class DanglingReferenceError(EquifloerError):
    """An id is referenced but never declared."""

    tag = "dangling-reference"


class DuplicateIdError(EquifloerError):
    """An id is declared more than once."""

    tag = "duplicate-id"


class InvalidDiagramError(EquifloerError):
    """A diagram failed validation where a valid one is required."""

    tag = "invalid-diagram"


class BranchPointsCoincideError(EquifloerError):
    """Branch basepoints must lie in distinct regions."""

    tag = "branch-points-coincide"


class NoDomainError(EquifloerError):
    """No connecting domain exists between the given generators."""

    tag = "no-domain"


class NonDiskRegionError(EquifloerError):
    """A region with nonzero multiplicity is not an embedded disk."""

    tag = "non-disk-region"


class NotNiceError(EquifloerError):
    """Diagram fails the bigon/square condition needed for disk counts."""

    tag = "not-nice"


class NotAdmissibleError(EquifloerError):
    """Weak admissibility fails for the requested puncture set."""

    tag = "not-admissible"


class DifferentialNotSquareZeroError(EquifloerError):
    """A computed differential fails d^2 = 0 (internal inconsistency)."""

    tag = "differential-not-square-zero"


class NotChainMapError(EquifloerError):
    """The induced involution does not commute with the differential."""

    tag = "not-chain-map"


class NotInvolutionError(EquifloerError):
    """The supplied symmetry does not square to the identity."""

    tag = "not-involution"


class NotDivisibleError(EquifloerError):
    """Exact Laurent-polynomial division left a remainder."""

    tag = "not-divisible"


class AsymmetricRanksError(EquifloerError):
    """No grading shift makes the rank function symmetric."""

    tag = "asymmetric-ranks"


class CorrespondenceViolationError(EquifloerError):
    """Cover/quotient grading correspondence fails."""

    tag = "correspondence-violation"
