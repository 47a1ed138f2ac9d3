"""Exception types shared across the package."""


class WarpbifError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(WarpbifError):
    """Run configuration is malformed or out of range."""


class SingularBasis(WarpbifError):
    """Basis matrix is singular (or numerically indistinguishable from it)."""


class CutoffTooLarge(WarpbifError):
    """Spectrum enumeration would exceed the configured entry limit."""


class DegeneratePath(WarpbifError):
    """The deformation path is constant (one-dimensional torus factor)."""


class InvalidEps(WarpbifError):
    """Oblateness parameter yields non-positive curvature somewhere."""


class ModeTooLarge(WarpbifError):
    """Requested Fourier mode exceeds the configured limit."""


class NonPositiveCurvature(WarpbifError):
    """Base manifold has non-positive scalar curvature somewhere."""


class GroundStateSignFailure(WarpbifError):
    """Computed ground state changes sign; discretization is unreliable."""


class SolverFailure(WarpbifError):
    """Eigenvalue or linear solve failed to converge or factorize."""


class NoNondegenerateEndpoint(WarpbifError):
    """Endpoint adjustment ran out of steps without clearing the threshold."""
