"""Exception hierarchy shared by every ebkit module.

Each error carries the process exit code the CLI returns when it escapes a
command: 2 for bad input, 3 for numerical failure.
"""


class EbkitError(Exception):
    exit_code = 3


class UsageError(EbkitError):
    exit_code = 2


class DataFormatError(EbkitError):
    exit_code = 2


class EmptySample(EbkitError):
    pass


class ZeroVariance(EbkitError):
    pass


class InvalidInterval(EbkitError):
    pass


class LengthMismatch(EbkitError):
    pass


class DimensionMismatch(EbkitError):
    pass


class DegenerateDenominator(EbkitError):
    pass


class PoleAtX(EbkitError):
    pass


class PoleInGrid(EbkitError):
    pass


class NonPositiveU(EbkitError):
    pass


class BoundaryX(EbkitError):
    pass


class NonPDSigma(EbkitError):
    pass


class BadLevel(EbkitError):
    pass


class OutOfRange(EbkitError):
    pass


class NoConvergence(EbkitError):
    pass


class NotAvailable(EbkitError):
    pass


class TooFewGroups(EbkitError):
    pass


class SingularShrinkageMatrix(EbkitError):
    def __init__(self, message: str, group: int):
        super().__init__(message)
        self.group = group


class ZeroDispersion(EbkitError):
    pass


class DegenerateRange(EbkitError):
    pass


class BadK(EbkitError):
    pass


class InconsistentPartition(EbkitError):
    pass


class NotAPermutation(EbkitError):
    pass


class ZeroResultant(EbkitError):
    def __init__(self, message: str, params=None):
        super().__init__(message)
        self.params = params


class BadOrder(EbkitError):
    pass
