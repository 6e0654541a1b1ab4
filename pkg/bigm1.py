"""
Univariate Big -1 Jacobi polynomials J_n(x; a, b, c) and the Little -1
Jacobi polynomials j_n(x; a, b): exact construction, recurrence,
the reflection operator L, weights, and normalization constants
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from errors import (
    DegenerateDenominator,
    InvalidParameters,
    OutsideSupport,
    ParameterPole,
    PochhammerPole,
    RegimeMismatch,
)
from exactalg import T, LaurentPoly1, Scalar, exact
from hyper import HalfInteger, gamma_real, gauss_2f1_terminating, pochhammer
from quad import IntervalUnion, QuadratureSpec, gram_from_values, integrate_union, unpack_gram

logger = logging.getLogger(__name__)


class UniRegime(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"

    @classmethod
    def for_c(cls, c) -> "UniRegime":
        if abs(c) == 1:
            raise RegimeMismatch("inside/outside", c)
        return cls.INSIDE if abs(c) < 1 else cls.OUTSIDE


@dataclass(frozen=True)
class UniParams:
    a: Scalar
    b: Scalar
    c: Scalar

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, exact(getattr(self, name)))
        if not (self.a > -1 and self.b > -1):
            raise InvalidParameters(f"need a, b > -1 (got a={self.a}, b={self.b})")
        if abs(self.c) == 1:
            raise InvalidParameters("|c| = 1 is excluded")

    @property
    def regime(self) -> UniRegime:
        return UniRegime.for_c(self.c)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in (self.a, self.b, self.c))

    def as_float(self) -> Tuple[float, float, float]:
        return float(self.a), float(self.b), float(self.c)

    def __str__(self):
        return f"(a={self.a}, b={self.b}, c={self.c})"


@dataclass(frozen=True)
class JacobiSkeleton:
    """
    J_n = first(z) + factor * (1 - x)/(1 + c) * second(z),
    z = (1 - x^2)/(1 - c^2). Independent of c.
    """

    n: int
    first: LaurentPoly1
    second: LaurentPoly1
    factor: Scalar


def half_shift(offset: int, s):
    """offset/2 + s/2, the integer part carried as a HalfInteger"""
    return HalfInteger(offset) + exact(s) / 2


@lru_cache(maxsize=None)
def jacobi_skeleton(n: int, a, b) -> JacobiSkeleton:
    if n < 0:
        raise ValueError("degree must be nonnegative")
    a, b = exact(a), exact(b)
    if a + 1 == 0:
        raise ParameterPole("a = -1 makes the prefactor singular")
    try:
        if n % 2 == 0:
            m = n // 2
            upper = half_shift(n + 2, a + b)
            first = gauss_2f1_terminating(m, upper, half_shift(1, a))
            second = gauss_2f1_terminating(m - 1, upper, half_shift(3, a)) if n else LaurentPoly1.zero()
            factor = n / (a + 1)
        else:
            m = (n - 1) // 2
            first = gauss_2f1_terminating(m, half_shift(n + 1, a + b), half_shift(1, a))
            second = gauss_2f1_terminating(m, half_shift(n + 3, a + b), half_shift(3, a))
            factor = -(n + a + b + 1) / (a + 1)
    except PochhammerPole as e:
        raise ParameterPole(f"J_{n} has a parameter pole: {e}") from e
    return JacobiSkeleton(n, first, second, exact(factor))


@lru_cache(maxsize=None)
def bigm1_coeffs(n: int, p: UniParams) -> LaurentPoly1:
    """Exact J_n(x; a, b, c) as a degree-n polynomial in x"""
    skeleton = jacobi_skeleton(n, p.a, p.b)
    z = (1 - T * T).scale(1 / (1 - p.c * p.c))
    result = skeleton.first.compose(z)
    if skeleton.second:
        prefactor = (1 - T).scale(skeleton.factor / (1 + p.c))
        result = result + prefactor * skeleton.second.compose(z)
    result.assert_polynomial()
    if result.degree() != n:
        raise ParameterPole(f"J_{n} degenerated to degree {result.degree()} at {p}")
    return result


@lru_cache(maxsize=None)
def little_m1_coeffs(n: int, a, b) -> LaurentPoly1:
    """j_n(x; a, b): argument 1 - x^2, prefactor (1 - x)/(a + 1)"""
    skeleton = jacobi_skeleton(n, a, b)
    z = 1 - T * T
    result = skeleton.first.compose(z)
    if skeleton.second:
        result = result + (1 - T).scale(skeleton.factor) * skeleton.second.compose(z)
    return result.assert_polynomial()


def recurrence_coeffs(n: int, p: UniParams) -> Tuple[Scalar, Scalar]:
    """(A_n, C_n) of x J_n = A_n J_{n+1} + (1 - A_n - C_n) J_n + C_n J_{n-1}"""
    a, b, c = p.a, p.b, p.c
    upper = 2 * n + a + b + 2
    if upper == 0:
        raise DegenerateDenominator(f"2n+a+b+2 = 0 at n={n}")
    if n % 2 == 0:
        A = (n + a + 1) * (c + 1) / upper
    else:
        A = (1 - c) * (n + a + b + 1) / upper
    if n == 0:
        return A, exact(0)
    lower = 2 * n + a + b
    if lower == 0:
        raise DegenerateDenominator(f"2n+a+b = 0 at n={n}")
    if n % 2 == 0:
        C = n * (1 - c) / lower
    else:
        C = (n + b) * (1 + c) / lower
    return A, C


def monic_kappa(n: int, p: UniParams) -> Scalar:
    """kappa_n with kappa_n J_n monic"""
    a, b, c = p.a, p.b, p.c
    if n % 2 == 0:
        m = n // 2
        return (1 - c * c) ** m * pochhammer(half_shift(1, a), m) / pochhammer(half_shift(n + 2, a + b), m)
    m = (n - 1) // 2
    return (
        (1 + c) * (1 - c * c) ** m * pochhammer(half_shift(1, a), m + 1)
        / pochhammer(half_shift(n + 1, a + b), m + 1)
    )


def monic(n: int, p: UniParams) -> LaurentPoly1:
    return bigm1_coeffs(n, p).scale(monic_kappa(n, p))


def operator_L_apply(p: UniParams, f: LaurentPoly1) -> LaurentPoly1:
    """
    L = [(x+c)(x-1)/x] d/dx R + [c/(2x^2) + (ca-b)/(2x)](R - I) + (a+b+1)/2 R.
    The rightmost factor acts first: d/dx R f = (R f)'.
    """
    a, b, c = p.a, p.b, p.c
    reflected = f.reflect("x")
    drift = LaurentPoly1({1: 1, 0: c - 1, -1: -c})
    jump = LaurentPoly1({-2: c / 2, -1: (c * a - b) / 2})
    result = (
        drift * reflected.differentiate("x")
        + jump * (reflected - f)
        + reflected.scale((a + b + 1) / 2)
    )
    if f.is_polynomial():
        result.assert_polynomial()
    return result


def eigenvalue_lambda(n: int, p: UniParams) -> Scalar:
    return (-1) ** n * (n + (p.a + p.b + 1) / 2)


def support(p: UniParams, regime: Optional[UniRegime] = None) -> IntervalUnion:
    """C = [-1,-|c|] U [|c|,1] inside, C~ = [-|c|,-1] U [1,|c|] outside"""
    regime = UniRegime(regime or p.regime)
    if regime != p.regime:
        raise RegimeMismatch(regime.value, p.c)
    c = abs(float(p.c))
    if regime is UniRegime.INSIDE:
        return IntervalUnion.symmetric(c, 1.0)
    return IntervalUnion.symmetric(1.0, c)


def power_product(sign, terms):
    """sign * prod |base| ** exponent, accumulated in log space"""
    with np.errstate(divide="ignore"):
        log_total = sum(exponent * np.log(np.abs(base)) for base, exponent in terms)
    return sign * np.exp(log_total)


def weight_from_distances(x, d_small, d_large, p: UniParams, regime: UniRegime):
    """
    Weight built from distances to the support endpoints:
    d_small to the endpoint of smaller |x|, d_large to the larger one.
    """
    a, b, c = p.as_float()
    ea, eb = (a - 1) / 2, (b - 1) / 2
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    sx = np.sign(x)
    if regime is UniRegime.INSIDE:
        one_plus_x = np.where(x < 0, d_large, 1.0 + x)
        x_minus_c = np.where(sx == np.sign(c), sx * d_small, x - c) if c != 0 else x
        sign = sx * np.sign(one_plus_x) * np.sign(x_minus_c)
        terms = [(one_plus_x, 1), (x_minus_c, 1), (d_small, eb), (ax + abs(c), eb), (d_large, ea), (1.0 + ax, ea)]
        return power_product(sign, terms)
    one_plus_x = np.where(x < 0, -d_small, 1.0 + x)
    c_minus_x = np.where(sx == np.sign(c), np.sign(c) * d_large, c - x)
    sign = np.sign(c) * sx * np.sign(one_plus_x) * np.sign(c_minus_x)
    terms = [(one_plus_x, 1), (c_minus_x, 1), (d_large, eb), (abs(c) + ax, eb), (d_small, ea), (ax + 1.0, ea)]
    return power_product(sign, terms)


def weight_uni(x, p: UniParams, regime: Optional[UniRegime] = None):
    """omega (inside) or omega~ (outside) at interior points of the support"""
    regime = UniRegime(regime or p.regime)
    u = support(p, regime)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    for value in xs:
        if not u.contains(value, interior=True):
            raise OutsideSupport(float(value), regime.value)
    c = abs(float(p.c))
    ax = np.abs(xs)
    if regime is UniRegime.INSIDE:
        d_small, d_large = ax - c, 1.0 - ax
    else:
        d_small, d_large = ax - 1.0, c - ax
    result = weight_from_distances(xs, d_small, d_large, p, regime)
    return result if np.ndim(x) else float(result[0])


def bare_norm_h(n: int, a, b) -> float:
    """h_n(a, b); the outside-regime h~_n has the same expression"""
    a, b = float(a), float(b)
    if n % 2 == 0:
        m = n // 2
        return (
            2 * gamma_real((n + b + 1) / 2) * gamma_real((n + a + 3) / 2) * gamma_real(m + 1)
            / ((n + a + 1) * gamma_real((n + a + b + 2) / 2) * pochhammer((a + 1) / 2, m) ** 2)
        )
    m = (n - 1) // 2
    return (
        (n + a + b + 1) * gamma_real((n + b + 2) / 2) * gamma_real((n + a + 2) / 2) * gamma_real(m + 1)
        / (2 * gamma_real((n + a + b + 3) / 2) * pochhammer((a + 1) / 2, m + 1) ** 2)
    )


def norm_prefactor(a, b, c, regime: UniRegime) -> float:
    a, b, c = float(a), float(b), float(c)
    if UniRegime(regime) is UniRegime.INSIDE:
        return (1 - c * c) ** ((a + b + 2) / 2) / (1 + c)
    return float(np.sign(c)) * (c * c - 1) ** ((a + b + 2) / 2) / (1 + c)


def norm_h(n: int, a, b, regime, c) -> float:
    """Full right-hand side of the orthogonality relation"""
    regime = UniRegime(regime)
    if UniRegime.for_c(c) != regime:
        raise RegimeMismatch(regime.value, c)
    return norm_prefactor(a, b, c, regime) * bare_norm_h(n, a, b)


def _float_coefficients(poly: LaurentPoly1) -> np.ndarray:
    return np.array([float(v) for v in poly.coefficients()])


def gram_matrix(
    n_max: int, p: UniParams, regime: Optional[UniRegime] = None, spec: Optional[QuadratureSpec] = None
):
    """Gram matrix of J_0..J_n_max under the regime's weight, by quadrature"""
    regime = UniRegime(regime or p.regime)
    u = support(p, regime)
    coeffs = [_float_coefficients(bigm1_coeffs(n, p)) for n in range(n_max + 1)]

    def integrand(x, d_small, d_large):
        values = np.array([np.polynomial.polynomial.polyval(x, c) for c in coeffs])
        return gram_from_values(values, weight_from_distances(x, d_small, d_large, p, regime))

    result = integrate_union(integrand, u, spec, scalar=False, distances=True)
    gram = unpack_gram(np.asarray(result.value), n_max + 1)
    expected = np.array([norm_h(n, p.a, p.b, regime, p.c) for n in range(n_max + 1)])
    return gram, expected, result


def norm_by_quadrature(n: int, p: UniParams, spec: Optional[QuadratureSpec] = None) -> float:
    gram, _, _ = gram_matrix(n, p, spec=spec)
    return float(gram[n, n])
