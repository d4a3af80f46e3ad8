"""Exception hierarchy shared by all modules."""


class NAPhaseError(Exception):
    """Base class for every error raised by naphase."""


class ConfigMismatch(NAPhaseError):
    pass


class PrecisionExhausted(NAPhaseError):
    pass


class NoSquareRoot(NAPhaseError):
    pass


class DenominatorNotUnit(NAPhaseError):
    pass


class NonzeroConstantTerm(NAPhaseError):
    pass


class SingularJacobian(NAPhaseError):
    pass


class NonIntegralRescale(NAPhaseError):
    pass


class NonIntegralCoefficient(NAPhaseError):
    pass


class BadConstantTerm(NAPhaseError):
    pass


class ConvergenceDomain(NAPhaseError):
    pass


class PrimeMismatch(NAPhaseError):
    pass


class OverlappingCells(NAPhaseError):
    pass


class DepthOverflow(NAPhaseError):
    pass


class ConstantNotScalar(NAPhaseError):
    pass


class DegenerateCriticalClass(NAPhaseError):
    pass


class NotCritical(NAPhaseError):
    pass


class DegenerateHessian(NAPhaseError):
    pass


class GradientVanishes(NAPhaseError):
    pass


class BudgetExhausted(NAPhaseError):
    pass


class NotCriticalOverQ(NAPhaseError):
    pass


class DegenerateHessianOverQ(NAPhaseError):
    pass


class BadPrime(NAPhaseError):
    pass


class NonPolynomial(NAPhaseError):
    def __init__(self, msg, line=1, col=1):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.line = line
        self.col = col


class ExpressionSyntaxError(NAPhaseError):
    def __init__(self, msg, line=1, col=1):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.line = line
        self.col = col


class DivisionByZero(NAPhaseError, ZeroDivisionError):
    pass
