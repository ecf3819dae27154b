"""Exception types shared across the package.

Every guard in the library raises one of these instead of a bare ValueError so
the CLI can map failures onto stable machine-readable error codes.
"""

from __future__ import annotations


class LeibtenError(Exception):
    """Base class; `code` is the stable identifier used in CLI error objects."""

    code = "error"


class DimensionMismatch(LeibtenError):
    code = "dimension-mismatch"


class ComplexNotComposable(LeibtenError):
    code = "complex-not-composable"


class SlotOutOfRange(LeibtenError):
    code = "slot-out-of-range"


class SignatureMismatch(LeibtenError):
    code = "signature-mismatch"


class InvalidInputData(LeibtenError):
    code = "invalid-input-data"


class InvalidRepresentation(LeibtenError):
    code = "invalid-representation"


class SizeLimit(LeibtenError):
    code = "size-limit"


class NotACocycle(LeibtenError):
    code = "not-a-cocycle"


class NotCentral(LeibtenError):
    code = "not-central"


class NotASection(LeibtenError):
    code = "not-a-section"


class TruncationOverflow(LeibtenError):
    code = "truncation-overflow"


class NotHomogeneous(LeibtenError):
    code = "not-homogeneous"


class NotHomotopyET(LeibtenError):
    code = "not-homotopy-et"


class NotSquareZero(LeibtenError):
    code = "not-square-zero"


class NotAHomomorphism(LeibtenError):
    code = "not-a-homomorphism"
