"""
Custom exception classes for GHRR.
"""


class GHRRError(Exception):
    """
    Generic exception for GHRR.
    """

    def __init__(self, message, extra=None):
        super(GHRRError, self).__init__(message)
        self.extra = extra


class ShapeMismatchError(GHRRError):
    """Operands do not share (D, m) or matrix dimensions."""


class NotUnitaryError(GHRRError):
    """An operation that needs unitary elements got something else."""


class NotHermitianError(GHRRError):
    """unitary_exp was handed a non-Hermitian generator."""


class SingularMapError(GHRRError):
    """A tensor-view column map cannot be inverted."""


class InvalidDistributionError(GHRRError):
    """A phase or frequency distribution breaks the zero-mean/symmetry requirement."""


class ConvergenceError(GHRRError):
    """
    The diagonality optimizer ran out of iterations.

    ``extra`` holds ``{'best': matrix, 'diagonality': value, 'iterations': n}``.
    """


class DimensionError(GHRRError):
    """Invalid or indivisible dimensions, or a structure that would be too large."""


class CodebookError(GHRRError):
    """A quasi-orthogonal codebook could not be sampled."""


class CapacityError(GHRRError):
    """The alphabet cannot supply the requested number of strings."""
