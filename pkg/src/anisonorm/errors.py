"""Exception hierarchy.

Two families matter for the CLI exit codes: input/validation problems
(exit 2) and numerical guard trips (exit 3).
"""


class AnisonormError(Exception):
    pass


class ValidationError(AnisonormError, ValueError):
    """Bad inputs: schema violations, grid mismatches, parameter errors."""


class GridMismatchError(ValidationError):
    pass


class CylinderFormError(ValidationError):
    """Parameters not of the (a0,...,a0,at) / (p0,...,p0,pt) form."""


class KindMismatchError(ValidationError):
    """F-scale operation called with B-scale parameters, or vice versa."""


class FileFormatError(ValidationError):
    """Malformed grid file: bad magic, truncated payload, invalid axis."""


class NumericalGuardError(AnisonormError, RuntimeError):
    """A resolution / conditioning / support guard tripped."""


class ConditionNumberError(NumericalGuardError):
    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class UndersampledKernelError(NumericalGuardError):
    """Dilated kernel narrower than the minimum number of grid spacings."""


class SupportSpilloverError(NumericalGuardError):
    """Kernel support does not fit inside the periodic box."""


class NyquistCapError(NumericalGuardError):
    """Requested modulation level exceeds the axis Nyquist frequency."""
