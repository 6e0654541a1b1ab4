"""
Hypergeometric and q-series building blocks
Exact Pochhammer / terminating 2F1, Gamma via scipy, numeric q-series
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

import numpy as np
from scipy import special

from errors import GammaPole, PochhammerPole, QPochhammerPole
from exactalg import LaurentPoly1, exact

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class HalfInteger:
    """Exact k/2, stored as its double"""

    twice_value: int

    @classmethod
    def of(cls, value) -> "HalfInteger":
        doubled = exact(value) * 2
        if Fraction(doubled).denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return cls(int(doubled))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __add__(self, other):
        if isinstance(other, HalfInteger):
            return HalfInteger(self.twice_value + other.twice_value)
        return self.value + exact(other)

    __radd__ = __add__

    def __float__(self):
        return self.twice_value / 2

    def __str__(self):
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"


def pochhammer(a, n: int):
    """Rising factorial (a)_n; exact for Fraction/int input"""
    if n < 0:
        raise ValueError("pochhammer order must be nonnegative")
    a = exact(a)
    result = Fraction(1) if isinstance(a, Fraction) else 1.0
    for j in range(n):
        result *= a + j
    return result


def gauss_2f1_terminating(neg_n: int, b, c) -> LaurentPoly1:
    """
    2F1(-n, b; c; z) as an exact polynomial in z.
    The coefficient of z^j is (-n)_j (b)_j / ((c)_j j!).
    """
    if neg_n < 0:
        raise ValueError("terminating order must be nonnegative")
    b, c = exact(b), exact(c)
    terms = {0: Fraction(1)}
    coeff = Fraction(1) if isinstance(b, Fraction) and isinstance(c, Fraction) else 1.0
    for j in range(neg_n):
        denominator = (c + j) * (j + 1)
        if c + j == 0:
            raise PochhammerPole(c, j)
        coeff = coeff * (-neg_n + j) * (b + j) / denominator
        terms[j + 1] = coeff
    return LaurentPoly1(terms)


def gamma_real(x: float) -> float:
    """Gamma for real arguments; poles at nonpositive integers raise"""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise GammaPole(x)
    return float(special.gamma(x))


def log_abs_gamma(x: float) -> float:
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise GammaPole(x)
    return float(special.gammaln(x))


def qpochhammer(a, q, n: int):
    """(a; q)_n = prod_{j<n} (1 - a q^j); vectorized over array a"""
    if n < 0:
        raise ValueError("q-Pochhammer order must be nonnegative")
    if n == 0:
        return np.ones_like(np.asarray(a, dtype=float))[()]
    powers = np.power(float(q), np.arange(n))
    factors = 1.0 - np.multiply.outer(np.asarray(a, dtype=float), powers)
    return np.prod(factors, axis=-1)[()]


def qseries_coefficients(
    n: int, uppers: Sequence[float], lowers: Sequence[float], q: float, z: float = 1.0
) -> List[float]:
    """
    Term coefficients of a terminating r+1 phi r series with upper q^{-n}:
    (q^{-n};q)_j prod (u;q)_j / ((q;q)_j prod (l;q)_j) z^j for j = 0..n.
    """
    q = float(q)
    result = [1.0]
    coeff = 1.0
    for j in range(n):
        for lower in lowers:
            if abs(1.0 - lower * q ** j) == 0.0:
                raise QPochhammerPole(lower, j)
        numerator = (1.0 - q ** (j - n)) * math.prod(1.0 - u * q ** j for u in uppers)
        denominator = (1.0 - q ** (j + 1)) * math.prod(1.0 - l * q ** j for l in lowers)
        coeff = coeff * numerator / denominator * z
        result.append(coeff)
    return result


def phi32_terminating(n: int, a2: float, a3: float, b1: float, b2: float, q: float) -> LaurentPoly1:
    """3phi2(q^{-n}, a2, a3; b1, b2; q, z) as a polynomial in z (double coefficients)"""
    coeffs = qseries_coefficients(n, (a2, a3), (b1, b2), q)
    return LaurentPoly1({j: c for j, c in enumerate(coeffs)})
