"""
Error taxonomy for MNPCA.

The CLI reports these by class name on stderr, so names are part of the
public surface.
"""


class MnpcaError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(MnpcaError, ValueError):
    """A parameter is outside its permitted range."""


class DimensionMismatchError(MnpcaError, ValueError):
    """Array shapes disagree with each other or with a fitted model."""


class NonFiniteInputError(MnpcaError, ValueError):
    """Input contains NaN or infinite values."""


class RankDeficientError(MnpcaError):
    """An observation has rank below the requested truncation rank r."""


class RepeatedSingularValueError(MnpcaError):
    """Two of the leading singular values coincide within tolerance."""


class KernelParityError(MnpcaError):
    """The left and right kernels are not both odd, both even or both linear-raw."""


class IllConditionedError(MnpcaError):
    """A matrix to be inverted is singular or too ill-conditioned."""


class DataFormatError(MnpcaError, ValueError):
    """An input file does not follow the expected layout."""
