"""
Big q-Jacobi polynomials in one and two variables, the q-difference
operator Omega and the two recurrences of the bivariate family.
Everything here is double precision; q = -e^eps is irrational.
"""

import logging
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence

from bigm1 import UniParams, bigm1_coeffs
from bivariate import BivIndex, BivParams, L1_apply, biv_coeffs
from errors import DegenerateDenominator, InvalidParameters
from exactalg import LaurentPoly1, LaurentPoly2, X, Y
from hyper import qpochhammer, qseries_coefficients

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QParams:
    a: float
    b: float
    c: float
    d: float
    q: float

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "q"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.q in (0.0, 1.0, -1.0):
            raise InvalidParameters(f"q must avoid 0 and +-1 (got {self.q})")

    @classmethod
    def near_minus_one(cls, alpha, beta, gamma, delta, eps: float) -> "QParams":
        """(-e^(eps alpha), -e^(eps beta), -e^(eps gamma), delta, -e^eps)"""
        eps = float(eps)
        return cls(
            -math.exp(eps * float(alpha)),
            -math.exp(eps * float(beta)),
            -math.exp(eps * float(gamma)),
            float(delta),
            -math.exp(eps),
        )

    @classmethod
    def from_entry(cls, entry: Dict) -> "QParams":
        """Build from a params.yaml entry; kind 'minus_exp' means a=-e^a etc."""
        if entry.get("kind") == "minus_exp":
            return cls(
                -math.exp(float(entry["a"])),
                -math.exp(float(entry["b"])),
                -math.exp(float(entry["c"])),
                float(entry["d"]),
                -math.exp(float(entry["q"])),
            )
        return cls(*(float(entry[k]) for k in ("a", "b", "c", "d", "q")))


@dataclass(frozen=True)
class QRecurrenceSet:
    a_nk: float
    b_nk: float
    c_nk: float
    e_nk: float
    f_nk: float
    g_nk: float
    r_nk: float
    s_nk: float
    t_nk: float
    u_nk: float
    v_nk: float
    w_nk: float
    sigma_k: float
    tau_k: float
    z_n: float

    def x_stencil(self, n: int, k: int) -> Dict:
        """{(m, l): coefficient} for the nine-term x-recurrence"""
        return {
            (n + 1, k - 1): self.e_nk, (n + 1, k): self.f_nk, (n + 1, k + 1): self.g_nk,
            (n, k - 1): self.r_nk, (n, k): self.s_nk, (n, k + 1): self.t_nk,
            (n - 1, k - 1): self.u_nk, (n - 1, k): self.v_nk, (n - 1, k + 1): self.w_nk,
        }

    def y_stencil(self, n: int, k: int) -> Dict:
        return {(n + 1, k): self.a_nk, (n, k): self.b_nk, (n - 1, k): self.c_nk}

    def as_dict(self) -> Dict:
        return asdict(self)


def q_factorial_poly(q: float, j: int) -> LaurentPoly1:
    """(x; q)_j expanded in powers of x"""
    x = LaurentPoly1.variable("x")
    result = LaurentPoly1.constant(1.0)
    for i in range(j):
        result = result * (1.0 - x.scale(q ** i))
    return result


@lru_cache(maxsize=None)
def bigq_uni_coeffs(n: int, a: float, b: float, c: float, q: float) -> LaurentPoly1:
    """P_n(x; a, b, c; q) = 3phi2(q^-n, abq^(n+1), x; aq, cq; q, q)"""
    terms = qseries_coefficients(n, (a * b * q ** (n + 1),), (a * q, c * q), q, z=q)
    result = LaurentPoly1.zero()
    for j, coeff in enumerate(terms):
        result = result + q_factorial_poly(q, j).scale(coeff)
    return result


@lru_cache(maxsize=None)
def bigq_biv_coeffs(n: int, k: int, p: QParams) -> LaurentPoly2:
    """
    P_{n-k}(y; a, bcq^(2k+1), dq^k) y^k (dq/y; q)_k P_k(x/y; c, b, d/y).
    Dividing (dq/y; q)_k by the (dq/y; q)_j of the inner series leaves
    (dq^(j+1)/y; q)_(k-j); assembled in Laurent form.
    """
    if not 0 <= k <= n:
        raise InvalidParameters(f"need 0 <= k <= n (got n={n}, k={k})")
    a, b, c, d, q = p.a, p.b, p.c, p.d, p.q
    outer = bigq_uni_coeffs(n - k, a, b * c * q ** (2 * k + 1), d * q ** k, q).lift("y")
    inv_y = LaurentPoly2.monomial(1.0, 0, -1)
    x_over_y = LaurentPoly2.monomial(1.0, 1, -1)
    series = qseries_coefficients(k, (b * c * q ** (k + 1),), (c * q,), q, z=q)
    inner = LaurentPoly2.zero()
    for j, coeff in enumerate(series):
        term = LaurentPoly2.constant(coeff)
        for i in range(k - j):
            term = term * (1.0 - inv_y.scale(d * q ** (j + 1 + i)))
        for i in range(j):
            term = term * (1.0 - x_over_y.scale(q ** i))
        inner = inner + term
    inner = inner.shift(0, k).assert_polynomial()
    return (outer * inner).assert_polynomial()


def q_derivative(f: LaurentPoly2, var: str, q: float) -> LaurentPoly2:
    """D_{q,var} f = [f(q var) - f] / (var (q - 1)); x^m -> [m]_q x^(m-1)"""
    idx = 0 if var == "x" else 1
    terms = {}
    for exp, coeff in f.items():
        m = exp[idx]
        if m == 0:
            continue
        new = list(exp)
        new[idx] = m - 1
        terms[tuple(new)] = coeff * (q ** m - 1.0) / (q - 1.0)
    return LaurentPoly2(terms)


def omega_apply(p: QParams, f: LaurentPoly2) -> LaurentPoly2:
    """The six-term q-difference operator; in each product the right factor acts first"""
    a, b, c, d, q = p.a, p.b, p.c, p.d, p.q
    Dx = lambda g: q_derivative(g, "x", q)
    Dxi = lambda g: q_derivative(g, "x", 1.0 / q)
    Dy = lambda g: q_derivative(g, "y", q)
    Dyi = lambda g: q_derivative(g, "y", 1.0 / q)
    abc = a * b * c
    result = (X - d * q) * (X - a * c * q ** 2) * Dx(Dxi(f))
    result = result + (Y - a * q) * (Y - d * q) * Dy(Dyi(f))
    result = result + ((X - d * q) * (Y - a * q)).scale(1.0 / q) * Dxi(Dyi(f))
    result = result + ((X.scale(b) - d) * (Y - 1.0)).scale(a * c * q ** 3) * Dx(Dy(f))
    drift_x = ((X - 1.0).scale(abc * q ** 3 - 1.0) - (a * c * q ** 2 - 1.0) * (d * q - 1.0)).scale(1.0 / (q - 1.0))
    drift_y = ((Y - 1.0).scale(abc * q ** 3 - 1.0) - (a * q - 1.0) * (d * q - 1.0)).scale(1.0 / (q - 1.0))
    return result + drift_x * Dx(f) + drift_y * Dy(f)


def omega_eigenvalue(n: int, p: QParams) -> float:
    q = p.q
    return q ** (1 - n) * (q ** n - 1.0) * (p.a * p.b * p.c * q ** (n + 2) - 1.0) / (q - 1.0) ** 2


def _nonzero(value: float, label: str) -> float:
    if value == 0.0:
        raise DegenerateDenominator(f"{label} vanishes")
    return value


def q_recurrence_coeffs(n: int, k: int, p: QParams) -> QRecurrenceSet:
    """All twelve coefficients of the y- and x-recurrences plus sigma_k, tau_k, z_n"""
    if not 0 <= k <= n:
        raise InvalidParameters(f"need 0 <= k <= n (got n={n}, k={k})")
    a, b, c, d, q = p.a, p.b, p.c, p.d, p.q
    abc, bc = a * b * c, b * c
    up2 = _nonzero(qpochhammer(abc * q ** (2 * n + 2), q, 2), "(abcq^(2n+2);q)_2")
    up1 = _nonzero(qpochhammer(abc * q ** (2 * n + 1), q, 2), "(abcq^(2n+1);q)_2")
    d_k1 = _nonzero(1.0 - d * q ** (k + 1), "1 - dq^(k+1)")

    sigma = (1 - c * q ** (k + 1)) * (1 - bc * q ** (k + 1)) / _nonzero(
        qpochhammer(bc * q ** (2 * k + 1), q, 2), "(bcq^(2k+1);q)_2")
    tau = -c * q ** (k + 1) * (1 - q ** k) * (1 - b * q ** k) / _nonzero(
        qpochhammer(bc * q ** (2 * k), q, 2), "(bcq^(2k);q)_2")
    z = (abc * q ** (n + 1) * (1 + q - d * q ** (n + 1)) - d) / _nonzero(
        (1 - abc * q ** (2 * n + 1)) * (1 - abc * q ** (2 * n + 3)), "z_n denominator")

    a_nk = (1 - a * q ** (n - k + 1)) * (1 - abc * q ** (n + k + 2)) * (1 - d * q ** (n + 1)) / up2
    # a d q^(n+1) (1 - abc q^(n+1)/d) without dividing by d
    c_nk = (a * q ** (n + 1) * (q ** (n - k) - 1) * (1 - bc * q ** (n + k + 1))
            * (d - abc * q ** (n + 1)) / up1)
    b_nk = 1 - a_nk - c_nk
    shift = bc * q ** k * tau - sigma + 1
    e_nk = (tau * bc * q ** k * (d * q ** k - 1) * (1 - d * q ** (n + 1))
            * qpochhammer(a * q ** (n - k + 1), q, 2) / up2)
    f_nk = a_nk * shift
    g_nk = (sigma * (1 - d * q ** (n + 1)) * qpochhammer(abc * q ** (n + k + 2), q, 2)
            / (d_k1 * up2))
    r_nk = tau * z * (d * q ** k - 1) * (1 - a * q ** (n - k + 1)) * (1 - bc * q ** (n + k + 1))
    s_nk = b_nk * shift + d * (q ** (k + 1) * sigma - tau)
    t_nk = q ** (k + 1) * sigma * z * (1 - q ** (n - k)) * (1 - abc * q ** (n + k + 2)) / d_k1
    u_nk = (tau * a * q ** (n - k + 1) * (d * q ** k - 1) * (abc * q ** (n + 1) - d)
            * qpochhammer(bc * q ** (n + k), q, 2) / up1)
    v_nk = c_nk * shift
    w_nk = (abc * sigma * q ** (n + 2 * k + 3) * (abc * q ** (n + 1) - d)
            * qpochhammer(q ** (n - k - 1), q, 2) / (d_k1 * up1))
    return QRecurrenceSet(
        a_nk, b_nk, c_nk, e_nk, f_nk, g_nk, r_nk, s_nk, t_nk, u_nk, v_nk, w_nk,
        sigma, tau, z,
    )


def recurrence_residual(n: int, k: int, p: QParams, multiplier: str) -> float:
    """Max coefficient of (multiplier * P_nk - stencil sum), relative to max |P_nk|"""
    coeffs = q_recurrence_coeffs(n, k, p)
    stencil = coeffs.x_stencil(n, k) if multiplier == "x" else coeffs.y_stencil(n, k)
    target = bigq_biv_coeffs(n, k, p)
    residual = target * (X if multiplier == "x" else Y)
    for (m, l), value in stencil.items():
        if 0 <= l <= m:
            residual = residual - bigq_biv_coeffs(m, l, p).scale(value)
    return residual.max_abs_coefficient() / max(target.max_abs_coefficient(), 1.0)


def eigen_residual(n: int, k: int, p: QParams) -> float:
    f = bigq_biv_coeffs(n, k, p)
    residual = omega_apply(p, f) - f.scale(omega_eigenvalue(n, p))
    return residual.max_abs_coefficient() / max(f.max_abs_coefficient(), 1.0)


# q -> -1 limits

def uni_limit_deviation(n: int, p: UniParams, eps: float) -> float:
    """max |coeff| of P_n(x; -e^(eps a), -e^(eps b), c; -e^eps) - J_n(x; a, b, c)"""
    a, b, c = p.as_float()
    approx = bigq_uni_coeffs(n, -math.exp(eps * a), -math.exp(eps * b), c, -math.exp(eps))
    return (approx - bigm1_coeffs(n, p).to_float()).max_abs_coefficient()


def biv_limit_deviation(idx: BivIndex, p: BivParams, eps: float) -> float:
    qp = QParams.near_minus_one(p.alpha, p.beta, p.gamma, p.delta, eps)
    approx = bigq_biv_coeffs(idx.n, idx.k, qp)
    return (approx - biv_coeffs(idx, p).to_float()).max_abs_coefficient()


def empirical_orders(deviations: Sequence[float], epsilons: Sequence[float]) -> List[Optional[float]]:
    """Slopes log(dev_i/dev_(i+1)) / log(eps_i/eps_(i+1)); None where a deviation is zero"""
    orders = [None]
    for i in range(1, len(deviations)):
        prev, cur = deviations[i - 1], deviations[i]
        if prev > 0 and cur > 0:
            orders.append(math.log(prev / cur) / math.log(epsilons[i - 1] / epsilons[i]))
        else:
            orders.append(None)
    return orders


def limit_rows(family: str, indices, params, epsilons: Sequence[float]) -> List[Dict]:
    """One row per (index, eps) with the deviation and the empirical order"""
    rows = []
    for idx in indices:
        if family == "uni":
            devs = [uni_limit_deviation(idx, params, eps) for eps in epsilons]
            n, k = idx, 0
        else:
            devs = [biv_limit_deviation(idx, params, eps) for eps in epsilons]
            n, k = idx.n, idx.k
        for eps, dev, order in zip(epsilons, devs, empirical_orders(devs, epsilons)):
            rows.append({"n": n, "k": k, "eps": eps, "deviation": dev, "order": order})
            logger.debug(f"limit {family} ({n},{k}) eps={eps:g}: deviation {dev:.3e}")
    return rows


def omega_l1_deviation(p: BivParams, f: LaurentPoly2, eps: float) -> float:
    """Relative max-coefficient gap between Omega f/(1+q) and L1 f at q = -e^eps"""
    qp = QParams.near_minus_one(p.alpha, p.beta, p.gamma, p.delta, eps)
    scaled = omega_apply(qp, f.to_float()).scale(1.0 / (1.0 + qp.q))
    target = L1_apply(p, f).to_float()
    return (scaled - target).max_abs_coefficient() / max(1.0, target.max_abs_coefficient())
