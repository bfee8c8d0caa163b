"""Exception hierarchy shared across the package.

``DomainError`` covers user-facing parameter-domain violations (mapped to
exit code 2 by the CLI); everything else signals an internal problem.
"""


class PointGasError(Exception):
    """Base class for all package-specific errors."""


class DomainError(PointGasError, ValueError):
    """A parameter lies outside the mathematically admissible domain."""


class DimensionTooLargeError(PointGasError):
    """Combinatorial routine called above its size cap."""


class FugacityDomainError(DomainError):
    """Fugacity z outside I_alpha, or a density outside the solvable range."""


class SupercriticalDensityError(FugacityDomainError):
    """Boson-family density at or above its critical density."""


class UnreachableParticleNumberError(FugacityDomainError):
    """Finite spectrum cannot hold N particles (alpha > 0 saturation)."""


class SupportError(DomainError):
    """Test-function support (or potential well) escapes the box."""


class ContourRadiusError(DomainError):
    """Contour radius violates the convergence condition r*alpha*g0 < 1."""


class SingularityError(PointGasError):
    """Evaluation point hits a zero of a Fredholm determinant factor."""


class ConvergenceDomainError(DomainError):
    """Series summed outside its convergence domain."""


class DegenerateVarianceError(DomainError):
    """Saddle-point variance too small for the normalized limit."""
