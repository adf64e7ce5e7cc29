"""Exception types raised across the package."""


class AtomFieldError(Exception):
    """Base class for all package errors."""


class NonPositiveParameter(AtomFieldError, ValueError):
    """A model parameter is zero, negative, or not finite."""


class GridTooNarrow(AtomFieldError, ValueError):
    """The position grid truncates the Gaussian tail above threshold."""


class CutoffTooSmall(AtomFieldError, ValueError):
    """The Fock cutoff cannot hold the requested state."""


class NonHermitianInput(AtomFieldError, ValueError):
    pass


class NormalizationError(AtomFieldError, ValueError):
    pass


class RepresentationMismatch(AtomFieldError, TypeError):
    """A wavefunction is in the wrong representation (position vs fock)."""


class DimensionMismatch(AtomFieldError, ValueError):
    pass


class NotConverged(AtomFieldError, RuntimeError):
    """Observables still drift at the largest Fock cutoff tried."""


class NotParallel(AtomFieldError, ValueError):
    """The branch vectors A and B are not parallel, so G is not a scalar."""


class ZeroCoupling(AtomFieldError, ValueError):
    pass


class ConfigError(AtomFieldError, ValueError):
    pass
