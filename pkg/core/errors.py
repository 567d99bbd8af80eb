class FidelityError(ValueError):
    """Base class for every invariant violation raised by the numerical core."""


class DimensionMismatchError(FidelityError):
    pass


class NotUnitaryError(FidelityError):
    pass


class NotHermitianError(FidelityError):
    pass


class InvalidStateError(FidelityError):
    pass


class InvalidChannelError(FidelityError):
    pass


class InvalidBasisError(FidelityError):
    pass


class ParameterRangeError(FidelityError):
    pass


class SingularBasisError(FidelityError):
    pass
