"""Exception hierarchy shared by the library and the CLI."""


class WorldfieldError(Exception):
    """Base class for all library errors."""


class DomainError(WorldfieldError, ValueError):
    """A parameter lies outside a worldline domain, or a support leaves it."""


class NonTimelikeError(WorldfieldError, ValueError):
    """A curve segment failed the timelike test g(u, u) < 0."""


class InterpolationError(WorldfieldError, ValueError):
    """Tabulated data is too coarse for the requested interpolation tolerance."""


class OrderError(WorldfieldError, ValueError):
    """Requested jet order is not supported on this worldline or grid."""


class DirectionError(WorldfieldError, ValueError):
    """A direction field could not be decomposed in the adapted tetrad."""


class GridMismatchError(WorldfieldError, ValueError):
    """One-particle vectors live on different mode grids."""


class WorldlineKindError(WorldfieldError, ValueError):
    """The operation needs a different kind of worldline (e.g. inertial at rest)."""


class NumericalError(WorldfieldError, RuntimeError):
    """Quadrature or fitting failed to converge within its budget."""


class QuadratureError(NumericalError):
    pass


class FitError(NumericalError):
    pass


class ValidationError(WorldfieldError, RuntimeError):
    """A positivity or consistency check failed after all escalations."""


class ConfigError(WorldfieldError, ValueError):
    """Malformed or inconsistent run configuration."""
