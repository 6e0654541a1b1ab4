"""
Chihara polynomials and the kernel-polynomial route to the Big -1 Jacobi
normalization constants (an independent oracle for bigm1.norm_h)
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from bigm1 import UniParams, UniRegime, monic, monic_kappa, norm_prefactor, power_product
from errors import InvalidParameters, KernelPole, ParameterPole, PochhammerPole, RegimeMismatch
from exactalg import T, LaurentPoly1, Scalar, exact
from hyper import gamma_real, gauss_2f1_terminating, pochhammer
from quad import IntervalUnion, QuadratureSpec, gram_from_values, integrate_union, unpack_gram
import config
from reports import OpReport, ResidualTracker

logger = logging.getLogger(__name__)

RELATION_POINTS = 25


@dataclass(frozen=True)
class ChiharaParams:
    alpha: Scalar
    beta: Scalar
    gamma: Scalar

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, exact(getattr(self, name)))
        if not (self.alpha > -1 and self.beta > -1):
            raise InvalidParameters("Chihara parameters need alpha, beta > -1")

    @classmethod
    def kernel_partner(cls, p: UniParams) -> "ChiharaParams":
        """Parameters of the Chihara family matching K~_n(x; a, b, c), |c| < 1"""
        s = math.sqrt(1 - float(p.c) ** 2)
        return cls((p.b - 1) / 2, (p.a + 1) / 2, -float(p.c) / s)


@lru_cache(maxsize=None)
def chihara_coeffs(n: int, p: ChiharaParams) -> LaurentPoly1:
    """Monic C_n(x; alpha, beta, gamma), argument x^2 - gamma^2 substituted exactly"""
    al, be, ga = p.alpha, p.beta, p.gamma
    m = n // 2
    z = T * T - ga * ga
    try:
        if n % 2 == 0:
            scale = (-1) ** m * pochhammer(al + 1, m) / pochhammer(m + al + be + 1, m)
            series = gauss_2f1_terminating(m, m + al + be + 1, al + 1)
            result = series.compose(z).scale(scale)
        else:
            scale = (-1) ** m * pochhammer(al + 2, m) / pochhammer(m + al + be + 2, m)
            series = gauss_2f1_terminating(m, m + al + be + 2, al + 2)
            result = (T - ga) * series.compose(z).scale(scale)
    except (PochhammerPole, ZeroDivisionError) as e:
        raise ParameterPole(f"C_{n} has a parameter pole: {e}") from e
    return result


def chihara_norm_eta(n: int, p: ChiharaParams) -> float:
    al, be = float(p.alpha), float(p.beta)
    m = n // 2
    if n % 2 == 0:
        return (
            gamma_real(m + al + 1) * gamma_real(m + be + 1) / gamma_real(m + al + be + 1)
            * math.factorial(m) / ((2 * m + al + be + 1) * pochhammer(m + al + be + 1, m) ** 2)
        )
    return (
        gamma_real(m + al + 2) * gamma_real(m + be + 1) / gamma_real(m + al + be + 2)
        * math.factorial(m) / ((2 * m + al + be + 2) * pochhammer(m + al + be + 2, m) ** 2)
    )


def chihara_support(p: ChiharaParams) -> IntervalUnion:
    ga = abs(float(p.gamma))
    return IntervalUnion.symmetric(ga, math.sqrt(1 + ga * ga))


def chihara_weight(x, d_small, d_large, p: ChiharaParams):
    """theta(x)(x+gamma)(x^2-gamma^2)^alpha (1+gamma^2-x^2)^beta from endpoint distances"""
    al, be, ga = float(p.alpha), float(p.beta), float(p.gamma)
    x = np.asarray(x, dtype=float)
    ax, sx = np.abs(x), np.sign(x)
    edge = math.sqrt(1 + ga * ga)
    x_plus_g = np.where((sx != np.sign(ga)) & (ga != 0), sx * d_small, x + ga)
    sign = sx * np.sign(x_plus_g)
    return power_product(sign, [(x_plus_g, 1), (d_small, al), (ax + abs(ga), al), (d_large, be), (edge + ax, be)])


def chihara_gram(n_max: int, p: ChiharaParams, spec: Optional[QuadratureSpec] = None):
    """Quadrature Gram matrix of C_0..C_n_max and the expected diagonal eta_n"""
    coeffs = [np.array([float(v) for v in chihara_coeffs(n, p).coefficients()]) for n in range(n_max + 1)]

    def integrand(x, d_small, d_large):
        values = np.array([np.polynomial.polynomial.polyval(x, c) for c in coeffs])
        return gram_from_values(values, chihara_weight(x, d_small, d_large, p))

    result = integrate_union(integrand, chihara_support(p), spec, scalar=False, distances=True)
    gram = unpack_gram(np.asarray(result.value), n_max + 1)
    expected = np.array([chihara_norm_eta(n, p) for n in range(n_max + 1)])
    return gram, expected, result


def christoffel_kernel(n: int, p: UniParams, nu=1) -> LaurentPoly1:
    """
    K~_n = [J^_{n+1}(x) - (J^_{n+1}(nu)/J^_n(nu)) J^_n(x)] / (x - nu),
    by exact synthetic division.
    """
    nu = exact(nu)
    upper, lower = monic(n + 1, p), monic(n, p)
    at_nu = lower.exact_value(nu)
    if at_nu == 0:
        raise KernelPole(n, nu)
    numerator = upper - lower.scale(upper.exact_value(nu) / at_nu)
    return numerator.exact_divide_linear(nu)


def _require_inside(p: UniParams) -> None:
    if p.regime is not UniRegime.INSIDE:
        raise RegimeMismatch("inside", p.c)


def chihara_relation_check(n: int, p: UniParams) -> OpReport:
    """K~_n(x) against s^n C_n(x/s; (b-1)/2, (a+1)/2, -c/s), s = sqrt(1-c^2)"""
    _require_inside(p)
    tracker = ResidualTracker(f"chihara-relation n={n} {p}", config.TOLERANCES["chihara_relation"])
    s = math.sqrt(1 - float(p.c) ** 2)
    kernel = christoffel_kernel(n, p).to_float()
    partner = chihara_coeffs(n, ChiharaParams.kernel_partner(p)).to_float()
    for x in np.linspace(-1.2, 1.2, RELATION_POINTS):
        left = float(kernel.evaluate(x))
        right = s ** n * float(partner.evaluate(x / s))
        tracker.record((left - right) / max(1.0, abs(left)), f"x={x:.4f}")
    return tracker.report()


def derive_full_norm_via_kernel(n: int, p: UniParams) -> float:
    """
    Orthogonality constant of J_n from the Chihara side, nu = 1:
    h^_n = -eta~_n J^_n(1)/J^_{n+1}(1), with eta~_n = -s^(a+b+2+2n) eta_n
    from the substitution x -> x/s, and J^_m(1) = kappa_m.
    """
    _require_inside(p)
    a, b = float(p.a), float(p.b)
    s = math.sqrt(1 - float(p.c) ** 2)
    kappa_n, kappa_next = float(monic_kappa(n, p)), float(monic_kappa(n + 1, p))
    if kappa_n == 0:
        raise KernelPole(n, 1)
    eta_tilde = -s ** (a + b + 2 + 2 * n) * chihara_norm_eta(n, ChiharaParams.kernel_partner(p))
    h_monic = -eta_tilde * kappa_n / kappa_next
    return h_monic / kappa_n ** 2


def derive_h_via_kernel(n: int, p: UniParams) -> float:
    """Bare h_n(a, b): the kernel-route constant with the c-prefactor removed"""
    return derive_full_norm_via_kernel(n, p) / norm_prefactor(p.a, p.b, p.c, UniRegime.INSIDE)
