"""Exception hierarchy for todakit."""


class TodakitError(Exception):
    """Base class for every error raised by the package."""


class InputError(TodakitError, ValueError):
    """Malformed or inconsistent user input."""


class OrderingViolation(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class BranchPointHit(InputError):
    pass


class CoincidentPoints(InputError):
    pass


class NegativeEndpoint(InputError):
    pass


class NumericalError(TodakitError, ArithmeticError):
    """A computation could not be completed to the requested accuracy."""


class QuadratureNotConverged(NumericalError):
    pass


class SingularPeriodMatrix(NumericalError):
    pass


class PeriodInvariantViolation(NumericalError):
    """Riemann matrix failed the symmetry / positivity check."""


class DenominatorVanishes(NumericalError):
    pass


class PoleHit(NumericalError):
    pass


class NewtonDiverged(NumericalError):
    pass


class SingularJacobian(NumericalError):
    pass


class RealityLost(NumericalError):
    pass


class NotRational(NumericalError):
    pass


class NotPerfectSquare(NumericalError):
    pass


class ParityViolation(NumericalError):
    pass


class ThetaDivisorHit(NumericalError):
    pass
