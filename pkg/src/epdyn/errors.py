"""Exception types shared across the package."""


class EpdynError(Exception):
    """Base class for all package errors."""


class ValidationError(EpdynError, ValueError):
    """Invalid parameters or inputs."""


class NumericalError(EpdynError, ArithmeticError):
    """A numerical routine could not deliver the requested quality."""


class BudgetExceeded(NumericalError):
    """Adaptive quadrature ran out of function evaluations."""


class DegenerateLeadingCoefficient(ValidationError):
    """Leading polynomial coefficient vanishes."""


class InsufficientSamples(ValidationError):
    """Too few samples in a fitting window."""


class NonpositiveProbability(ValidationError):
    """A log-log fit was requested on non-positive data."""


class NearEP(NumericalError):
    """Biorthogonal normalization is ill-conditioned close to an exceptional point."""


class BranchAmbiguity(NumericalError):
    """The physical branch of lambda(E) cannot be chosen reliably."""


class LightConeViolation(ValidationError):
    """Finite chain too short for the requested times."""


class StepTooCoarse(NumericalError):
    """Branch continuation could not match eigenvalues between steps."""


class UnimplementedOrder(ValidationError):
    """Requested order is beyond what is implemented."""


class RouteInvalid(ValidationError):
    """Integration route is not valid for the given parameters."""
