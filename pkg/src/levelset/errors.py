"""Exception and warning types shared across the package."""


class LevelsetError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LevelsetError):
    """Invalid arguments, shapes, value ranges, or file contents."""


class ConfigError(InputError):
    """A run configuration failed schema validation."""


class PointCloudFormatError(InputError):
    """A point-cloud file is malformed; carries the offending data row."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class NumericalError(LevelsetError):
    """A computation failed for numerical reasons (singularity, divergence)."""


class IterationError(NumericalError):
    """An iterative solver failed; carries the 1-based iteration index."""

    def __init__(self, message, iteration):
        super().__init__(message)
        self.iteration = iteration


class SamplingError(NumericalError):
    """Zero-set sampling could not produce the requested number of points."""


class AmbiguityWarning(UserWarning):
    """The smallest eigenvalue is degenerate, so recovery is not unique.

    Carries the degeneracy count in ``nullity``; callers that hit this should
    switch to the nullspace/sum-of-squares path instead of trusting a single
    eigenvector.
    """

    def __init__(self, message, nullity):
        super().__init__(message)
        self.nullity = nullity
