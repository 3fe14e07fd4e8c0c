"""Exception hierarchy shared by all gaussib modules."""


class GaussIBError(Exception):
    """Base class for every error raised by this package."""


class NonPositiveSpectrum(GaussIBError):
    """A marginal spectrum vanishes where the cross-spectrum does not."""


class ZeroBand(GaussIBError):
    """A spectrum is zero on a set of positive grid measure."""


class UnachievableRate(GaussIBError):
    """The requested bottleneck rate cannot be met by the source."""


class ConvergenceFailure(GaussIBError):
    """An iterative solver stopped before meeting its tolerance."""


class SingularSystem(GaussIBError):
    """Normal equations are numerically singular."""


class SingularArgument(GaussIBError):
    """A log-determinant argument is not positive definite."""


class SingularNoise(GaussIBError):
    """The effective noise covariance of a linear form is singular."""


class ConfigError(GaussIBError):
    """Malformed or missing configuration / model fields."""

    def __init__(self, message, path=()):
        super().__init__(message)
        self.path = list(path)


class ModelError(GaussIBError):
    """A source model violates its invariants."""

    def __init__(self, message, path=()):
        super().__init__(message)
        self.path = list(path)
