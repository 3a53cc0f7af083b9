"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`FermbezzleError`, which is itself a :class:`ValueError` so callers that
only care about bad input can catch the builtin.
"""


class FermbezzleError(ValueError):
    pass


class NotHermitian(FermbezzleError):
    pass


class SpectrumOutOfRange(FermbezzleError):
    pass


class InvalidDelta(FermbezzleError):
    pass


class NotDenseEnough(FermbezzleError):
    pass


class DimensionMismatch(FermbezzleError):
    pass


class TooManyModes(FermbezzleError):
    pass


class NotUnitary(FermbezzleError):
    pass


class WindowViolation(FermbezzleError):
    pass


class BoundViolation(FermbezzleError):
    """A proven inequality failed numerically; always indicates a bug."""


class NotSorted(FermbezzleError):
    pass


class TrivialSpectrum(FermbezzleError):
    pass


class NonFaithfulMarginal(FermbezzleError):
    pass


class NotSelfDual(FermbezzleError):
    pass


class NotReal(FermbezzleError):
    pass


class NotBasisProjection(FermbezzleError):
    pass


class IncompatibleSplit(FermbezzleError):
    pass


class OddDimension(FermbezzleError):
    pass


class NotAntisymmetric(FermbezzleError):
    pass


class PatternTooLong(FermbezzleError):
    pass


class UnknownModel(FermbezzleError):
    pass


class OddLength(FermbezzleError):
    pass


class MalformedInput(FermbezzleError):
    pass
