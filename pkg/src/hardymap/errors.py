"""Exception types shared across the toolkit."""


class HardyMapError(Exception):
    """Base class for package-specific failures."""


class OutsideDiskError(HardyMapError, ValueError):
    """A point that must lie in the open unit disk does not."""


class PoleError(HardyMapError, ValueError):
    """Evaluation exactly at a logarithmic pole."""


class UnknownMapError(HardyMapError, ValueError):
    """Requested catalog map name does not exist."""


class ParameterRangeError(HardyMapError, ValueError):
    """Catalog map parameters outside their documented range."""


class BranchDomainError(HardyMapError, ValueError):
    """Inverse evaluated at a point outside the image domain."""


class InverseUnavailableError(HardyMapError, ValueError):
    """The map carries no closed-form inverse."""


class EmptyLevelSetError(HardyMapError):
    """No point of the level set was found inside the searchable disk."""


class FitInconclusiveError(HardyMapError):
    """Tail fit residual too large to trust the fitted exponent."""


class QuadratureError(HardyMapError):
    """A quadrature failed to reach its requested tolerance."""
