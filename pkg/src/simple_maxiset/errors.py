"""Errors raised by the simple maxiset package

Every error derives from [`MaxisetError`][src.simple_maxiset.errors.MaxisetError], so callers can catch the whole family at once.

Errors that correspond to a bad input derive from [`InvalidArgumentError`][src.simple_maxiset.errors.InvalidArgumentError], which is also a `ValueError`.  The command line maps those to the validation exit code and everything else to the runtime exit code.
"""


class MaxisetError(Exception):
    """Base class for all simple maxiset errors"""


class InvalidArgumentError(MaxisetError, ValueError):
    """An argument violates the documented precondition"""


class AliasingError(InvalidArgumentError):
    """A lacunary series has frequencies too high for the grid"""


class UnknownNameError(InvalidArgumentError):
    """A kernel or zoo function name is not in the registry"""


class ReportValidationError(InvalidArgumentError):
    """A report is incomplete and cannot be emitted"""


class UnderResolvedBandwidthError(MaxisetError):
    """The bandwidth covers too few grid cells"""

    code = "under-resolved-bandwidth"


class KernelWraparoundError(MaxisetError):
    """The scaled kernel support wraps around the unit torus"""

    code = "kernel-wraparound"


class BandwidthTooLargeError(MaxisetError):
    """The bandwidth rule produced h >= 1/2"""

    code = "bandwidth-too-large"


class ScheduleAssertionError(MaxisetError, AssertionError):
    """A dyadic bandwidth schedule left the class of admissible sequences"""


class InadmissibleBandwidthError(MaxisetError):
    """Some sample sizes of an experiment have inadmissible bandwidths

    Args:
        offending (list[int]): The sample sizes whose bandwidth is inadmissible
        code (str): The reason code of the first failure
        detail (str): The message of the first failure
    """

    def __init__(self, offending: list[int], code: str, detail: str) -> None:
        self.offending = offending
        self.code = code
        super().__init__(f"{code}: inadmissible bandwidth for n in {offending} ({detail})")
