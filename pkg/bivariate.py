"""
Bivariate Big -1 Jacobi polynomials J_{n,k}(x, y; alpha, beta, gamma, delta)

Construction, weights and domains in both delta regimes, the commuting
operators L1 and L2, the nine-term recurrence with its exact expansion
oracle, quadrature projections and Gram matrices, and the Pearson-type
system satisfied by the weight.
"""

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from bigm1 import UniParams, bare_norm_h, bigm1_coeffs, jacobi_skeleton, little_m1_coeffs, power_product
from errors import (
    DegenerateDenominator,
    InvalidParameters,
    OutsideSupport,
    ParameterPole,
    RegimeMismatch,
    SingularPoint,
)
from exactalg import T, LaurentPoly1, LaurentPoly2, Scalar, X, Y, exact, expand_in_graded_basis
from quad import (
    BivDomain,
    IntervalUnion,
    QuadratureSpec,
    gram_from_values,
    integrate_biv,
    sample_interior,
    unpack_gram,
)

logger = logging.getLogger(__name__)

PROJECTION_CUTOFF = 1e-9
FLOAT_AGREEMENT = 1e-12

PEARSON_EQUATIONS = ("A", "B", "B-y", "B-xy", "D", "C", "last")
STEPWISE_EQUATIONS = ("reduced", "f1-symmetry", "f2-separation", "f3-ode", "f3-closed")

# (m - n, l - k) -> coefficient name
STENCIL_NAMES = {
    "x": {
        (1, -1): "e_nk", (1, 0): "f_nk", (1, 1): "g_nk",
        (0, -1): "r_nk", (0, 0): "s_nk", (0, 1): "t_nk",
        (-1, -1): "u_nk", (-1, 0): "v_nk", (-1, 1): "w_nk",
    },
    "y": {(1, 0): "a_nk", (0, 0): "b_nk", (-1, 0): "c_nk"},
}


class BivRegime(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"

    @classmethod
    def for_delta(cls, delta) -> "BivRegime":
        if abs(delta) == 1:
            raise RegimeMismatch("inside/outside", delta)
        return cls.INSIDE if abs(delta) < 1 else cls.OUTSIDE


@dataclass(frozen=True)
class BivParams:
    alpha: Scalar
    beta: Scalar
    gamma: Scalar
    delta: Scalar

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, exact(getattr(self, name)))
        if not (self.alpha > -1 and self.beta > -1 and self.gamma > -1):
            raise InvalidParameters(
                f"need alpha, beta, gamma > -1 (got {self.alpha}, {self.beta}, {self.gamma})"
            )
        if abs(self.delta) == 1:
            raise InvalidParameters("|delta| = 1 is excluded")

    @property
    def regime(self) -> BivRegime:
        return BivRegime.for_delta(self.delta)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in (self.alpha, self.beta, self.gamma, self.delta))

    def as_float(self) -> Tuple[float, float, float, float]:
        return float(self.alpha), float(self.beta), float(self.gamma), float(self.delta)

    def __str__(self):
        return f"(alpha={self.alpha}, beta={self.beta}, gamma={self.gamma}, delta={self.delta})"


@dataclass(frozen=True, order=True)
class BivIndex:
    n: int
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise InvalidParameters(f"need 0 <= k <= n (got n={self.n}, k={self.k})")

    def __str__(self):
        return f"({self.n},{self.k})"


@dataclass(frozen=True)
class BivRecurrenceSet:
    a_nk: Scalar
    b_nk: Scalar
    c_nk: Scalar
    e_nk: Scalar
    f_nk: Scalar
    g_nk: Scalar
    r_nk: Scalar
    s_nk: Scalar
    t_nk: Scalar
    u_nk: Scalar
    v_nk: Scalar
    w_nk: Scalar
    sigma_k: Scalar
    tau_k: Scalar
    z_n: Scalar
    phi_k: int
    delta_n: Scalar

    def entries(self, idx: BivIndex, multiplier: str) -> Dict[BivIndex, Tuple[str, Scalar]]:
        """Stencil positions that exist (0 <= l <= m) with coefficient name and value"""
        result = {}
        for (dn, dk), name in STENCIL_NAMES[multiplier].items():
            m, l = idx.n + dn, idx.k + dk
            if 0 <= l <= m:
                result[BivIndex(m, l)] = (name, getattr(self, name))
        return result

    def as_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class GCoefficients:
    """Coefficients of L1 as exact Laurent data; there is no G4"""

    g1: LaurentPoly2
    g2: LaurentPoly2
    g3: LaurentPoly2
    g5: LaurentPoly2
    g6: LaurentPoly2
    g7: LaurentPoly2
    g8: LaurentPoly2

    @property
    def identity(self) -> LaurentPoly2:
        return -(self.g1 + self.g2 + self.g3)


@dataclass
class CoefficientDeviation:
    """A recurrence coefficient whose closed-form formula disagrees with the expansion"""

    name: str
    index: BivIndex
    multiplier: str
    params: str
    formula_value: Scalar
    validated_value: Scalar

    def to_dict(self) -> Dict:
        return {
            "coefficient": self.name,
            "n": self.index.n,
            "k": self.index.k,
            "multiplier": self.multiplier,
            "params": self.params,
            "formula": str(self.formula_value),
            "validated": str(self.validated_value),
            "formula_float": float(self.formula_value),
            "validated_float": float(self.validated_value),
        }


# Construction

def rho_k(k: int, delta) -> LaurentPoly1:
    """rho_k as a polynomial in y (stored in the variable slot x)"""
    delta = exact(delta)
    result = (T * T - delta * delta) ** (k // 2)
    if k % 2:
        result = result * (T + delta)
    return result


def _inner_factor(k: int, gamma, beta, delta) -> LaurentPoly2:
    """
    rho_k(y) J_k(x/y; gamma, beta, delta/y). With c = delta/y the argument
    z = (1 - x^2/y^2)/(1 - delta^2/y^2); every term is written as
    y^k times powers of (1 - delta^2/y^2), (1 -+ delta/y), (1 - x/y), (1 - x^2/y^2).
    """
    skeleton = jacobi_skeleton(k, gamma, beta)
    half = k // 2
    shrink = 1 - LaurentPoly2.monomial(delta * delta, 0, -2)
    chord = 1 - LaurentPoly2.monomial(1, 2, -2)
    slope = 1 - LaurentPoly2.monomial(1, 1, -1)
    plus = 1 + LaurentPoly2.monomial(delta, 0, -1)
    minus = 1 - LaurentPoly2.monomial(delta, 0, -1)

    result = LaurentPoly2.zero()
    for (j,), coeff in skeleton.first.items():
        term = shrink ** (half - j) * chord ** j
        if k % 2:
            term = term * plus
        result = result + term.scale(coeff)
    for (j,), coeff in skeleton.second.items():
        if k % 2:
            term = shrink ** (half - j) * slope * chord ** j
        else:
            term = shrink ** (half - 1 - j) * minus * slope * chord ** j
        result = result + term.scale(coeff * skeleton.factor)
    return result.shift(0, k).assert_polynomial()


@lru_cache(maxsize=None)
def biv_coeffs(idx: BivIndex, p: BivParams) -> LaurentPoly2:
    """J_{n-k}(y; alpha, 2k+beta+gamma+1, (-1)^k delta) rho_k(y) J_k(x/y; gamma, beta, delta/y)"""
    n, k = idx.n, idx.k
    outer_params = UniParams(p.alpha, 2 * k + p.beta + p.gamma + 1, (-1) ** k * p.delta)
    outer = bigm1_coeffs(n - k, outer_params).lift("y")
    result = (outer * _inner_factor(k, p.gamma, p.beta, p.delta)).assert_polynomial()
    if result.degree() != n or result.degree_in("x") != k:
        raise ParameterPole(
            f"J_{idx} has degree {result.degree()} / x-degree {result.degree_in('x')} at {p}"
        )
    return result


@lru_cache(maxsize=None)
def little_biv_coeffs(idx: BivIndex, alpha, beta, gamma) -> LaurentPoly2:
    """j_{n-k}(y; alpha, 2k+beta+gamma+1) y^k j_k(x/y; gamma, beta)"""
    alpha, beta, gamma = exact(alpha), exact(beta), exact(gamma)
    n, k = idx.n, idx.k
    outer = little_m1_coeffs(n - k, alpha, 2 * k + beta + gamma + 1).lift("y")
    inner = little_m1_coeffs(k, gamma, beta)
    homogenized = LaurentPoly2({(i, k - i): c for (i,), c in inner.items()})
    return outer * homogenized


# Weights and domains

def _check_regime(p: BivParams, regime) -> BivRegime:
    regime = BivRegime(regime or p.regime)
    if regime != p.regime:
        raise RegimeMismatch(regime.value, p.delta)
    return regime


def _quadrant_copies(vertices) -> Tuple:
    return tuple(
        tuple((sx * vx, sy * vy) for vx, vy in vertices)
        for sx, sy in ((1, 1), (-1, 1), (-1, -1), (1, -1))
    )


def domain_biv(p: BivParams, regime: Optional[BivRegime] = None) -> BivDomain:
    """D: |delta| <= |x| <= |y| <= 1 (inside) or D~: 1 <= |y| <= |x| <= |delta| (outside)"""
    regime = _check_regime(p, regime)
    d = abs(p.delta)
    if regime is BivRegime.INSIDE:
        y_support = IntervalUnion.symmetric(float(d), 1.0)

        def x_support_of(y):
            return IntervalUnion.symmetric(float(d), abs(float(y)))

        if d == 0:
            zero, one = exact(0), exact(1)
            triangles = (
                ((zero, zero), (one, one), (-one, one)),
                ((zero, zero), (one, -one), (-one, -one)),
            )
        else:
            triangles = _quadrant_copies(((d, d), (exact(1), exact(1)), (d, exact(1))))
    else:
        y_support = IntervalUnion.symmetric(1.0, float(d))

        def x_support_of(y):
            return IntervalUnion.symmetric(abs(float(y)), float(d))

        triangles = _quadrant_copies(((exact(1), exact(1)), (d, exact(1)), (d, d)))
    return BivDomain(y_support, x_support_of, triangles)


def weight_biv_from_distances(x, y, dx_small, dx_large, dy_small, dy_large, p: BivParams, regime: BivRegime):
    """
    W or W~ with every vanishing factor taken from endpoint distances.
    Inside: dx = (|x|-|delta|, |y|-|x|), dy = (|y|-|delta|, 1-|y|).
    Outside: dx = (|x|-|y|, |delta|-|x|), dy = (|y|-1, |delta|-|y|).
    """
    al, be, ga, de = p.as_float()
    ea, eb, eg = (al - 1) / 2, (be - 1) / 2, (ga - 1) / 2
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ax, ay = np.abs(x), np.abs(y)
    sx, sy = np.sign(x), np.sign(y)
    ad, sd = abs(de), math.copysign(1.0, de) if de else 0.0
    if BivRegime(regime) is BivRegime.INSIDE:
        one_plus_y = np.where(y < 0, dy_large, 1.0 + y)
        one_plus_ratio = np.where(sx != sy, dx_large / ay, 1.0 + x / y)
        shifted = np.where((sx == sd) & (de != 0), sx * dx_small, x - de)
        terms = [
            (dy_large, ea), (1.0 + ay, ea),
            (dx_large, eg), (ay + ax, eg),
            (dx_small, eb), (ax + ad, eb),
        ]
        sign = sx * np.sign(one_plus_y) * np.sign(one_plus_ratio) * np.sign(shifted)
    else:
        one_plus_y = np.where(y < 0, -dy_small, 1.0 + y)
        one_plus_ratio = np.where(sx != sy, -dx_small / ay, 1.0 + x / y)
        shifted = np.where(sx == sd, sd * dx_large, de - x)
        terms = [
            (dy_small, ea), (ay + 1.0, ea),
            (dx_small, eg), (ax + ay, eg),
            (dx_large, eb), (ad + ax, eb),
        ]
        sign = sd * sx * np.sign(one_plus_y) * np.sign(one_plus_ratio) * np.sign(shifted)
    # |y|^(beta+gamma) / |y| / (y^2)^(eb+eg) collapses to |y|
    terms += [(one_plus_y, 1), (one_plus_ratio, 1), (shifted, 1), (ay, 1)]
    return power_product(sign, terms)


def _distances(x, y, d: float, regime: BivRegime):
    ax, ay = np.abs(x), np.abs(y)
    if regime is BivRegime.INSIDE:
        return ax - d, ay - ax, ay - d, 1.0 - ay
    return ax - ay, d - ax, ay - 1.0, d - ay


def weight_biv(x, y, p: BivParams, regime: Optional[BivRegime] = None):
    """W (inside) or W~ (outside) at interior points of the domain"""
    regime = _check_regime(p, regime)
    domain = domain_biv(p, regime)
    xs, ys = np.broadcast_arrays(np.atleast_1d(np.asarray(x, dtype=float)), np.atleast_1d(np.asarray(y, dtype=float)))
    for px, py in zip(xs.ravel(), ys.ravel()):
        if not domain.contains(px, py, interior=True):
            raise OutsideSupport((float(px), float(py)), regime.value)
    result = weight_biv_from_distances(xs, ys, *_distances(xs, ys, abs(float(p.delta)), regime), p, regime)
    return result if np.ndim(x) or np.ndim(y) else float(result.reshape(-1)[0])


def sample_domain(domain: BivDomain, count: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Random interior points: y uniform on its support, then x uniform on the slice"""
    ys = sample_interior(domain.y_support, count, rng)
    xs = np.array([sample_interior(domain.x_support_of(y), 1, rng)[0] for y in ys])
    return xs, ys


def norm_H(idx: BivIndex, p: BivParams, regime: Optional[BivRegime] = None) -> float:
    """H_{n,k} (inside) or H~_{n,k} (outside)"""
    regime = _check_regime(p, regime)
    al, be, ga, de = p.as_float()
    n, k = idx.n, idx.k
    power = (2 * k + al + be + ga + 3) / 2
    bare = bare_norm_h(k, ga, be) * bare_norm_h(n - k, al, 2 * k + be + ga + 1)
    denominator = 1 + (-1) ** k * de
    if regime is BivRegime.INSIDE:
        return (1 - de * de) ** power / denominator * bare
    return (-1) ** k * math.copysign(1.0, de) * (de * de - 1) ** power / denominator * bare


# Operators

@lru_cache(maxsize=None)
def g_coefficients(p: BivParams) -> GCoefficients:
    al, be, ga, de = p.alpha, p.beta, p.gamma, p.delta
    quarter, half = Fraction(1, 4), Fraction(1, 2)
    xy = X * Y
    g1 = (X.scale(1 + be + ga) - xy.scale(al + be + ga + 2) - Y.scale(de * (al + ga + 1)) + de * ga)
    g1 = g1 * LaurentPoly2.monomial(quarter, -1, -1)
    g2 = (X * X).scale(be + ga + 1) - xy.scale(be) + Y.scale(de) + X.scale(de * ga)
    g2 = -g2 * LaurentPoly2.monomial(quarter, -2, -1)
    g3 = X + xy.scale(al) - (Y * Y).scale(al + ga + 1) + Y.scale(ga)
    g3 = -g3.scale(de) * LaurentPoly2.monomial(quarter, -1, -2)
    g5 = (X + de) * (Y - 1) * LaurentPoly2.monomial(half, -1, 0)
    g6 = ((X - Y) * (Y - 1)).scale(de) * LaurentPoly2.monomial(half, -1, -1)
    g7 = (X + de) * (Y - 1) * LaurentPoly2.monomial(half, 0, -1)
    g8 = (X + de) * (X - Y) * LaurentPoly2.monomial(half, -1, -1)
    return GCoefficients(g1, g2, g3, g5, g6, g7, g8)


def L1_apply(p: BivParams, f: LaurentPoly2) -> LaurentPoly2:
    """Each term G R d acts right to left: differentiate, reflect, multiply"""
    g = g_coefficients(p)
    fx, fy = f.differentiate("x"), f.differentiate("y")
    result = (
        g.g5 * fy.reflect("both")
        + g.g6 * fy.reflect("y")
        + g.g7 * fx.reflect("both")
        + g.g8 * fx.reflect("x")
        + g.g1 * f.reflect("both")
        + g.g2 * f.reflect("x")
        + g.g3 * f.reflect("y")
        + g.identity * f
    )
    if f.is_polynomial():
        result.assert_polynomial()
    return result


def L2_apply(p: BivParams, f: LaurentPoly2) -> LaurentPoly2:
    be, ga, de = p.beta, p.gamma, p.delta
    drift = (Y - X) * (X + de) * LaurentPoly2.monomial(2, -1, 0)
    jump = (X * X).scale(ga + be + 1) + X.scale(de * ga) - (X * Y).scale(be) + Y.scale(de)
    jump = jump * LaurentPoly2.monomial(1, -2, 0)
    reflected = f.reflect("x")
    result = drift * f.differentiate("x").reflect("x") + jump * (reflected - f)
    if f.is_polynomial():
        result.assert_polynomial()
    return result


def mu_n(n: int, p: BivParams) -> Scalar:
    if n % 2 == 0:
        return Fraction(-n, 2)
    return (n + p.alpha + p.beta + p.gamma + 2) / 2


def nu_k(k: int, p: BivParams) -> Scalar:
    if k % 2 == 0:
        return exact(2 * k)
    return -2 * (k + p.beta + p.gamma + 1)


def eigen_residual(idx: BivIndex, p: BivParams, operator: str) -> LaurentPoly2:
    """L1 J - mu_n J or L2 J - nu_k J"""
    f = biv_coeffs(idx, p)
    if operator == "L1":
        return L1_apply(p, f) - f.scale(mu_n(idx.n, p))
    return L2_apply(p, f) - f.scale(nu_k(idx.k, p))


def commutator(p: BivParams, f: LaurentPoly2) -> LaurentPoly2:
    return L1_apply(p, L2_apply(p, f)) - L2_apply(p, L1_apply(p, f))


# Recurrence

def _ratio(numerator, denominator, label: str):
    if numerator == 0:
        return exact(0)
    if denominator == 0:
        raise DegenerateDenominator(f"{label} vanishes")
    return numerator / denominator


def biv_recurrence_coeffs(idx: BivIndex, p: BivParams) -> BivRecurrenceSet:
    """The twelve closed-form coefficients; the branch follows the parity of n + k"""
    n, k = idx.n, idx.k
    al, be, ga, de = p.alpha, p.beta, p.gamma, p.delta
    S = al + be + ga
    even = (n + k) % 2 == 0
    phi = k % 2
    delta_n, delta_k = (-1) ** n * de, (-1) ** k * de
    delta_next = (-1) ** (n + 1) * de

    tau = _ratio(k + be * phi, 2 * k + be + ga, "2k+beta+gamma")
    sigma = _ratio(k + be * phi + ga + 1, 2 * k + be + ga + 2, "2k+beta+gamma+2")
    z = _ratio((-1) ** n - de * (2 * n + S + 2), (2 * n + S + 1) * (2 * n + S + 3), "z_n denominator")
    upper = 2 * n + S + 3
    lower = 2 * n + S + 1

    a_nk = _ratio((1 + delta_n) * (n - k + al + 1 if even else n + k + S + 2), upper, "2n+S+3")
    c_nk = _ratio((1 + delta_next) * (n - k if even else n + k + be + ga + 1), lower, "2n+S+1")
    b_nk = 1 - a_nk - c_nk
    e_nk = _ratio(tau * (1 - delta_k) * (1 + delta_n) * (n - k + al + 1 if even else n - k + al + 2), upper, "2n+S+3")
    g_nk = _ratio(
        sigma * (1 + delta_n) * (n + k + S + 3 if even else n + k + S + 2),
        (1 + delta_k) * upper, "(1+delta_k)(2n+S+3)",
    )
    r_nk = 2 * tau * z * ((-1) ** k - de) * (n - k + al + 1 if even else n + k + be + ga + 1)
    t_nk = _ratio(2 * (-1) ** (k + 1) * sigma * z * (n - k if even else n + k + S + 2), 1 + delta_k, "1+delta_k")
    u_nk = _ratio(tau * (1 - delta_k) * (1 - delta_n) * (n + k + be + ga if even else n + k + be + ga + 1), lower, "2n+S+1")
    w_nk = _ratio(
        sigma * (1 - delta_n) * (n - k if even else n - k - 1),
        (1 + delta_k) * lower, "(1+delta_k)(2n+S+1)",
    )
    shift = 1 - sigma - tau
    f_nk = a_nk * shift
    s_nk = b_nk * shift - delta_k * (sigma - tau)
    v_nk = c_nk * shift
    return BivRecurrenceSet(
        a_nk, b_nk, c_nk, e_nk, f_nk, g_nk, r_nk, s_nk, t_nk, u_nk, v_nk, w_nk,
        sigma, tau, z, phi, delta_n,
    )


def _multiplier_poly(multiplier: str) -> LaurentPoly2:
    if multiplier not in ("x", "y"):
        raise InvalidParameters(f"multiplier must be 'x' or 'y' (got '{multiplier}')")
    return X if multiplier == "x" else Y


def expand_in_basis(target: LaurentPoly2, p: BivParams) -> Dict[BivIndex, Scalar]:
    """Exact coefficients of a polynomial in the J_{m,l} basis"""
    raw = expand_in_graded_basis(target, lambda m, l: biv_coeffs(BivIndex(m, l), p))
    return {BivIndex(m, l): v for (m, l), v in raw.items() if v != 0}


def recurrence_oracle(idx: BivIndex, p: BivParams, multiplier: str) -> Dict[BivIndex, Scalar]:
    target = biv_coeffs(idx, p) * _multiplier_poly(multiplier)
    return expand_in_basis(target, p)


def _agrees(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= FLOAT_AGREEMENT * max(1.0, abs(float(a)), abs(float(b)))


def adjudicate_recurrence(
    idx: BivIndex, p: BivParams, multiplier: str
) -> Tuple[Dict[BivIndex, Scalar], List[CoefficientDeviation]]:
    """
    Compare the closed-form coefficients with the exact expansion.
    Returns the validated stencil (formula where it agrees, expansion
    otherwise) and the list of disagreements.
    """
    formulas = biv_recurrence_coeffs(idx, p).entries(idx, multiplier)
    oracle = recurrence_oracle(idx, p, multiplier)
    validated: Dict[BivIndex, Scalar] = {}
    deviations = []
    for target, (name, value) in sorted(formulas.items()):
        expected = oracle.get(target, exact(0))
        if _agrees(value, expected):
            validated[target] = value
        else:
            validated[target] = expected
            deviations.append(CoefficientDeviation(name, idx, multiplier, str(p), value, expected))
    for target, value in sorted(oracle.items()):
        if target not in formulas:
            validated[target] = value
            deviations.append(
                CoefficientDeviation(f"outside-stencil{target}", idx, multiplier, str(p), exact(0), value)
            )
    for deviation in deviations:
        logger.warning(
            f"recurrence {multiplier}*J{idx}: {deviation.name} formula {deviation.formula_value} "
            f"!= expansion {deviation.validated_value}"
        )
    return validated, deviations


def recurrence_coefficients(
    idx: BivIndex, p: BivParams, multiplier: str, use_paper_formulas: bool = False
) -> Dict[BivIndex, Scalar]:
    if use_paper_formulas:
        entries = biv_recurrence_coeffs(idx, p).entries(idx, multiplier)
        return {target: value for target, (_, value) in entries.items()}
    validated, _ = adjudicate_recurrence(idx, p, multiplier)
    return validated


def recurrence_residual(
    idx: BivIndex, p: BivParams, multiplier: str, coefficients: Dict[BivIndex, Scalar]
) -> LaurentPoly2:
    residual = biv_coeffs(idx, p) * _multiplier_poly(multiplier)
    for target, value in coefficients.items():
        residual = residual - biv_coeffs(target, p).scale(value)
    return residual


# Quadrature

def _evaluate_dense(dense: np.ndarray, x, y) -> np.ndarray:
    xs, ys = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return npoly.polyval2d(xs, ys, dense)


def biv_gram_matrix(
    n_max: int, p: BivParams, regime: Optional[BivRegime] = None, spec: Optional[QuadratureSpec] = None
):
    """Gram matrix of {J_{n,k}: n <= n_max} under the regime's weight"""
    regime = _check_regime(p, regime)
    domain = domain_biv(p, regime)
    indices = [BivIndex(n, k) for n in range(n_max + 1) for k in range(n + 1)]
    denses = [biv_coeffs(i, p).dense() for i in indices]

    def integrand(x, y, dxs, dxl, dys, dyl):
        w = weight_biv_from_distances(x, y, dxs, dxl, dys, dyl, p, regime)
        values = np.array([_evaluate_dense(d, x, y) for d in denses])
        return gram_from_values(values, w)

    result = integrate_biv(integrand, domain, spec, with_offsets=True)
    gram = unpack_gram(np.atleast_1d(result.value), len(indices))
    expected = np.array([norm_H(i, p, regime) for i in indices])
    logger.info(f"bivariate Gram n_max={n_max} {p}: level {result.level}, err_est {result.err_est:.2e}")
    return gram, expected, indices, result


def _projections(
    targets: List[Tuple[str, BivIndex]], basis: List[BivIndex], p: BivParams, spec: Optional[QuadratureSpec]
) -> Dict[Tuple[str, BivIndex], Dict[BivIndex, float]]:
    """One nested integration for every <multiplier J_t, J_b> / H_b"""
    regime = p.regime
    domain = domain_biv(p, regime)
    basis_dense = [biv_coeffs(b, p).dense() for b in basis]
    target_dense = [(biv_coeffs(t, p) * _multiplier_poly(m)).dense() for m, t in targets]

    def integrand(x, y, dxs, dxl, dys, dyl):
        w = weight_biv_from_distances(x, y, dxs, dxl, dys, dyl, p, regime)
        left = np.array([_evaluate_dense(d, x, y) * w for d in target_dense])
        right = np.array([_evaluate_dense(d, x, y) for d in basis_dense])
        return (left[:, None, :] * right[None, :, :]).reshape(-1, np.size(x))

    result = integrate_biv(integrand, domain, spec, with_offsets=True)
    values = np.atleast_1d(result.value).reshape(len(targets), len(basis))
    norms = np.array([norm_H(b, p, regime) for b in basis])
    table = {}
    for target, row in zip(targets, values / norms):
        table[target] = {b: float(v) for b, v in zip(basis, row) if abs(v) >= PROJECTION_CUTOFF}
    return table


def project_coefficients(
    idx: BivIndex, p: BivParams, multiplier: str, spec: Optional[QuadratureSpec] = None
) -> Dict[BivIndex, float]:
    """<multiplier J_{n,k}, J_{m,l}> / H_{m,l} for m <= n+1, entries below the cutoff dropped"""
    basis = [BivIndex(m, l) for m in range(idx.n + 2) for l in range(m + 1)]
    return _projections([(multiplier, idx)], basis, p, spec)[(multiplier, idx)]


def projection_table(
    n_max: int, p: BivParams, spec: Optional[QuadratureSpec] = None
) -> Dict[Tuple[str, BivIndex], Dict[BivIndex, float]]:
    """project_coefficients for both multipliers and every index with n <= n_max"""
    indices = [BivIndex(n, k) for n in range(n_max + 1) for k in range(n + 1)]
    basis = [BivIndex(m, l) for m in range(n_max + 2) for l in range(m + 1)]
    targets = [(m, i) for m in ("x", "y") for i in indices]
    return _projections(targets, basis, p, spec)


# Pearson system

def _weight_with_log_derivatives(x: float, y: float, p: BivParams, alpha_shift: float = 0.0):
    """W at any point off the factor zeros, with d/dx log|W| and d/dy log|W|"""
    al, be, ga, de = p.as_float()
    ea, eb, eg = (al + alpha_shift - 1) / 2, (be - 1) / 2, (ga - 1) / 2
    factors = (x, y, 1 + y, x + y, x - de, 1 - y * y, y * y - x * x, x * x - de * de)
    if any(f == 0 for f in factors):
        raise SingularPoint((x, y))
    w = (
        math.copysign(1.0, x * y) * abs(y) ** (be + ga) * (1 + y) * (1 + x / y) * (x - de) / y
        * abs(1 - y * y) ** ea * abs(1 - x * x / (y * y)) ** eg * abs((x * x - de * de) / (y * y)) ** eb
    )
    dx = 1 / (x + y) + 1 / (x - de) - 2 * x * eg / (y * y - x * x) + 2 * x * eb / (x * x - de * de)
    dy = (
        (be + ga) / y + 1 / (1 + y) + 1 / (x + y) - 2 / y
        - 2 * y * ea / (1 - y * y) + eg * (2 * y / (y * y - x * x) - 2 / y) - 2 * eb / y
    )
    return w, dx, dy


def pearson_residuals(p: BivParams, x: float, y: float, alpha_shift: float = 0.0) -> List[float]:
    """
    Relative residuals of the seven equations, ordered as PEARSON_EQUATIONS.
    Derivative terms d/dx[V(-x, .)] are taken through the chain rule,
    V = W G and dV = W (G dlog W + dG).
    alpha_shift perturbs the exponent of (1 - y^2) only.
    """
    if p.regime is not BivRegime.INSIDE:
        raise RegimeMismatch("inside", p.delta)
    x, y = float(x), float(y)
    g = g_coefficients(p)

    def at(poly, px, py):
        return float(poly.evaluate(px, py))

    def weight(px, py):
        return _weight_with_log_derivatives(px, py, p, alpha_shift)[0]

    def d_product(poly, px, py, var):
        w, dx, dy = _weight_with_log_derivatives(px, py, p, alpha_shift)
        return w * (at(poly, px, py) * (dx if var == "x" else dy) + at(poly.differentiate(var), px, py))

    w0 = weight(x, y)
    w_x, w_y, w_xy = weight(-x, y), weight(x, -y), weight(-x, -y)
    equations = [
        (w0 * at(g.g8, x, y), [w_x * at(g.g8, -x, y)]),
        (w0 * at(g.g7, x, y), [w_xy * at(g.g7, -x, -y)]),
        (w0 * at(g.g6, x, y), [w_y * at(g.g6, x, -y)]),
        (w0 * at(g.g5, x, y), [w_xy * at(g.g5, -x, -y)]),
        # -d/dy[V(x, -y)] = +V_y(x, -y)
        (w0 * at(g.g3, x, y), [w_y * at(g.g3, x, -y), d_product(g.g6, x, -y, "y")]),
        (w0 * at(g.g2, x, y), [w_x * at(g.g2, -x, y), d_product(g.g8, -x, y, "x")]),
        (
            w0 * at(g.g1, x, y),
            [w_xy * at(g.g1, -x, -y), d_product(g.g7, -x, -y, "x"), d_product(g.g5, -x, -y, "y")],
        ),
    ]
    residuals = []
    for lhs, rhs in equations:
        scale = max([abs(lhs)] + [abs(t) for t in rhs])
        residuals.append(abs(lhs - sum(rhs)) / scale if scale > 0 else 0.0)
    return residuals


def _relative_gap(lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale > 0 else 0.0


def pearson_stepwise_residuals(p: BivParams, x: float, y: float, alpha_shift: float = 0.0) -> List[float]:
    """
    Residuals of the intermediate equations that reduce the Pearson system
    to the weight, ordered as STEPWISE_EQUATIONS. f1, f2 and f3 are peeled
    off W itself:

        W  = theta(x) (x - delta) (x + y) f1(x^2, y)
        f1 = theta(y) (y + 1) f2(x^2, y^2)
        f2 = (x^2 - delta^2)^((beta-1)/2) (y^2 - x^2)^((gamma-1)/2) f3(y^2)

    and their derivatives come from the log-derivatives of W.
    """
    if p.regime is not BivRegime.INSIDE:
        raise RegimeMismatch("inside", p.delta)
    x, y = float(x), float(y)
    al, be, ga, de = p.as_float()
    eb, eg = (be - 1) / 2, (ga - 1) / 2
    w, dx, dy = _weight_with_log_derivatives(x, y, p, alpha_shift)
    w_x = _weight_with_log_derivatives(-x, y, p, alpha_shift)[0]
    w_y = _weight_with_log_derivatives(x, -y, p, alpha_shift)[0]
    sx = math.copysign(1.0, x)

    f1 = w / (sx * (x - de) * (x + y))
    f1_flip = w_y / (sx * (x - de) * (x - y))
    f2 = f1 / (math.copysign(1.0, y) * (1 + y))
    f3 = f2 / (abs(x * x - de * de) ** eb * abs(y * y - x * x) ** eg)

    # d/dx log f2 and d/dy log f3
    f2_dx = dx - 1 / (x - de) - 1 / (x + y)
    f3_dy = dy - 1 / (x + y) - 1 / (1 + y) - 2 * y * eg / (y * y - x * x)

    return [
        _relative_gap((x + de) * (x - y) * w, -(x - de) * (x + y) * w_x),
        _relative_gap((y - 1) * f1, (y + 1) * f1_flip),
        _relative_gap((2 * eb / (x * x - de * de) + 2 * eg / (x * x - y * y)) * x * f2, f2_dx * f2),
        _relative_gap(y * (al - 1) * f3, (y * y - 1) * f3_dy * f3),
        _relative_gap(f3, abs(1 - y * y) ** ((al - 1) / 2)),
    ]


def pearson_grid(p: BivParams, grid: int) -> List[Tuple[float, float]]:
    """grid x grid interior points with 0 < y < 1 and |delta| < |x| < y, both signs of x"""
    d = abs(float(p.delta))
    points = []
    for i in range(grid):
        y = d + (1 - d) * (i + 0.5) / grid
        for j in range(grid):
            magnitude = d + (y - d) * (j + 0.5) / grid
            points.append((magnitude if j % 2 == 0 else -magnitude, y))
    return points
