"""Exception hierarchy shared by all modules."""


class MatSloccError(Exception):
    """Base class for every error raised by this package."""


class ParseError(MatSloccError, ValueError):
    pass


class ConfigError(MatSloccError, ValueError):
    pass


class DenominatorDivisibleByP(MatSloccError, ArithmeticError):
    """A scalar cannot be reduced into the chosen prime field."""


class SizeGuardExceeded(MatSloccError):
    def __init__(self, message: str, largest_tested: int | None = None):
        super().__init__(message)
        self.largest_tested = largest_tested


class LengthMismatch(MatSloccError, ValueError):
    pass


class DimensionMismatch(MatSloccError, ValueError):
    pass


class AmbientMismatch(DimensionMismatch):
    pass


class NonSquare(DimensionMismatch):
    pass


class SingularTransform(MatSloccError, ValueError):
    pass


class NotInSpace(MatSloccError, ValueError):
    pass


class InvalidParams(MatSloccError, ValueError):
    pass


class NotMaximalCompression(InvalidParams):
    pass


class ZeroPQ(InvalidParams):
    pass


class DomainError(MatSloccError, ValueError):
    pass


class EvenD(InvalidParams):
    pass


class InconsistentEvidence(MatSloccError):
    """Verified evidence contradicts itself; indicates a bug, never valid data."""


class UnknownSuite(MatSloccError, ValueError):
    pass
