"""
Exception hierarchy for the Big -1 Jacobi toolkit
Every failure carries the offending data so reports can name a witness
"""


class MinusOneJacobiError(Exception):
    """Base class for all toolkit errors"""


class InvalidParameters(MinusOneJacobiError, ValueError):
    """A parameter record violates its validity constraints"""


class RegimeMismatch(MinusOneJacobiError, ValueError):
    """Requested regime does not match |c| or |delta|"""

    def __init__(self, regime: str, value):
        self.regime = regime
        self.value = value
        super().__init__(f"regime '{regime}' is not valid for |{value}|")


class OutsideSupport(MinusOneJacobiError, ValueError):
    """Weight evaluated away from the interior of its support"""

    def __init__(self, point, regime: str):
        self.point = point
        self.regime = regime
        super().__init__(f"point {point} is outside the {regime} support")


class NegativeExponentResidue(MinusOneJacobiError, ArithmeticError):
    """A Laurent expression that should be a polynomial kept a negative power"""

    def __init__(self, exponent, coefficient):
        self.exponent = exponent
        self.coefficient = coefficient
        super().__init__(
            f"negative exponent {exponent} survived with coefficient {coefficient}"
        )


class NonzeroRemainder(MinusOneJacobiError, ArithmeticError):
    """Synthetic division left a remainder"""

    def __init__(self, remainder):
        self.remainder = remainder
        super().__init__(f"division left remainder {remainder}")


class PoleAtZero(MinusOneJacobiError, ZeroDivisionError):
    """Negative exponent evaluated at a zero coordinate"""

    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(f"negative power of {variable} evaluated at {variable}=0")


class PochhammerPole(MinusOneJacobiError, ZeroDivisionError):
    """A denominator Pochhammer factor vanished before truncation"""

    def __init__(self, parameter, index: int):
        self.parameter = parameter
        self.index = index
        super().__init__(f"({parameter})_j vanishes at j={index}")


class ParameterPole(MinusOneJacobiError, ZeroDivisionError):
    """Polynomial construction hit a pole in its parameters"""


class GammaPole(MinusOneJacobiError, ZeroDivisionError):
    """Gamma evaluated at a nonpositive integer"""

    def __init__(self, argument):
        self.argument = argument
        super().__init__(f"Gamma has a pole at {argument}")


class QPochhammerPole(MinusOneJacobiError, ZeroDivisionError):
    """A denominator q-Pochhammer factor vanished"""

    def __init__(self, parameter, index: int):
        self.parameter = parameter
        self.index = index
        super().__init__(f"({parameter};q)_j vanishes at j={index}")


class DegenerateDenominator(MinusOneJacobiError, ZeroDivisionError):
    """A recurrence coefficient denominator is zero"""


class KernelPole(MinusOneJacobiError, ZeroDivisionError):
    """Christoffel transform with a vanishing monic value at nu"""

    def __init__(self, n: int, nu):
        self.n = n
        self.nu = nu
        super().__init__(f"monic J_{n} vanishes at nu={nu}")


class SingularPoint(MinusOneJacobiError, ValueError):
    """A weight factor vanishes at the evaluation point"""

    def __init__(self, point):
        self.point = point
        super().__init__(f"weight factor vanishes at {point}")


class QuadratureFailure(MinusOneJacobiError, RuntimeError):
    """Quadrature could not produce a usable value"""


class NoConvergence(QuadratureFailure):
    """Level doubling hit level_max before meeting the tolerance"""

    def __init__(self, value, err_est, level: int):
        self.value = value
        self.err_est = err_est
        self.level = level
        super().__init__(
            f"no convergence at level {level}: value={value}, err_est={err_est}"
        )
