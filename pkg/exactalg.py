"""
Sparse Laurent polynomials in one and two variables
Exponent-tuple -> coefficient maps with exact Fraction arithmetic
(float coefficients are accepted for the q-deformed objects)
"""

import logging
from fractions import Fraction
from numbers import Number
from typing import Callable, Dict, Iterable, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from errors import DegenerateDenominator, NegativeExponentResidue, NonzeroRemainder, PoleAtZero

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, int, float]
Exponent = Tuple[int, ...]

VARIABLES = ("x", "y")


def exact(value) -> Scalar:
    """Coerce ints and 'p/q' strings to Fraction; floats pass through"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    return value


def _var_index(var: str) -> int:
    try:
        return VARIABLES.index(var)
    except ValueError:
        raise ValueError(f"unknown variable '{var}'") from None


class LaurentPoly:
    """
    Immutable sparse Laurent polynomial.
    Zero coefficients are never stored.
    """

    nvars = 0
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Dict] = None):
        clean: Dict[Exponent, Scalar] = {}
        for exp, coeff in (terms or {}).items():
            key = self._key(exp)
            value = exact(coeff)
            if key in clean:
                value = clean[key] + value
            if value == 0:
                clean.pop(key, None)
            else:
                clean[key] = value
        self._terms = clean
        self._hash = None

    # construction helpers

    def _key(self, exp) -> Exponent:
        if isinstance(exp, int):
            exp = (exp,)
        exp = tuple(int(e) for e in exp)
        if len(exp) != self.nvars:
            raise ValueError(f"expected {self.nvars} exponents, got {exp}")
        return exp

    @classmethod
    def _from_clean(cls, terms: Dict[Exponent, Scalar]) -> "LaurentPoly":
        poly = cls.__new__(cls)
        poly._terms = terms
        poly._hash = None
        return poly

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls._from_clean({})

    @classmethod
    def constant(cls, value) -> "LaurentPoly":
        return cls({(0,) * cls.nvars: value})

    @classmethod
    def monomial(cls, coeff, *exps: int) -> "LaurentPoly":
        return cls({tuple(exps): coeff})

    @classmethod
    def variable(cls, var: str = "x") -> "LaurentPoly":
        exp = [0] * cls.nvars
        exp[_var_index(var)] = 1
        return cls({tuple(exp): 1})

    # read access

    @property
    def terms(self) -> Dict[Exponent, Scalar]:
        return dict(self._terms)

    def items(self) -> Iterable[Tuple[Exponent, Scalar]]:
        return self._terms.items()

    def coefficient(self, *exps: int) -> Scalar:
        return self._terms.get(tuple(exps), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial"""
        if not self._terms:
            return -1
        return max(sum(exp) for exp in self._terms)

    def degree_in(self, var: str) -> int:
        idx = _var_index(var)
        if not self._terms:
            return -1
        return max(exp[idx] for exp in self._terms)

    def valuation_in(self, var: str) -> int:
        idx = _var_index(var)
        if not self._terms:
            return 0
        return min(exp[idx] for exp in self._terms)

    def is_polynomial(self) -> bool:
        return all(e >= 0 for exp in self._terms for e in exp)

    def max_abs_coefficient(self) -> float:
        if not self._terms:
            return 0.0
        return float(max(abs(c) for c in self._terms.values()))

    # arithmetic

    def _coerce(self, other) -> Optional["LaurentPoly"]:
        if isinstance(other, LaurentPoly):
            if other.nvars != self.nvars:
                raise TypeError("cannot mix univariate and bivariate polynomials")
            return other
        if isinstance(other, (Number, str)):
            return self.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for exp, coeff in other._terms.items():
            value = terms.get(exp, 0) + coeff
            if value == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = value
        return self._from_clean(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._from_clean({exp: -c for exp, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, factor) -> "LaurentPoly":
        factor = exact(factor)
        if factor == 0:
            return self.zero()
        return self._from_clean({exp: c * factor for exp, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (Number, str)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms: Dict[Exponent, Scalar] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                terms[exp] = terms.get(exp, 0) + c1 * c2
        return self._from_clean({e: c for e, c in terms.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, power: int):
        if not isinstance(power, int) or power < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = self.constant(1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def shift(self, *exps: int) -> "LaurentPoly":
        """Multiply by the monomial with the given exponents"""
        return self._from_clean(
            {tuple(a + b for a, b in zip(e, exps)): c for e, c in self._terms.items()}
        )

    def __eq__(self, other):
        if isinstance(other, (Number, str)):
            other = self.constant(other)
        if not isinstance(other, LaurentPoly) or other.nvars != self.nvars:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return f"{type(self).__name__}(0)"
        parts = []
        for exp in sorted(self._terms, key=lambda e: (sum(e), e)):
            mono = "*".join(
                f"{v}^{e}" if e != 1 else v
                for v, e in zip(VARIABLES, exp)
                if e != 0
            )
            coeff = self._terms[exp]
            parts.append(f"{coeff}*{mono}" if mono else f"{coeff}")
        return f"{type(self).__name__}({' + '.join(parts)})"

    # structural maps

    def map_coefficients(self, fn: Callable[[Scalar], Scalar]) -> "LaurentPoly":
        return type(self)({exp: fn(c) for exp, c in self._terms.items()})

    def to_float(self) -> "LaurentPoly":
        return self.map_coefficients(float)

    def reflect(self, axes: str = "x") -> "LaurentPoly":
        """f(x, y) -> f(-x, y), f(x, -y) or f(-x, -y)"""
        flips = {"x": (0,), "y": (1,), "both": (0, 1)}[axes]
        if any(i >= self.nvars for i in flips):
            raise ValueError(f"axes '{axes}' not available in {self.nvars} variable(s)")
        terms = {}
        for exp, coeff in self._terms.items():
            sign = (-1) ** sum(exp[i] for i in flips)
            terms[exp] = coeff if sign > 0 else -coeff
        return self._from_clean(terms)

    def differentiate(self, var: str = "x") -> "LaurentPoly":
        idx = _var_index(var)
        terms = {}
        for exp, coeff in self._terms.items():
            e = exp[idx]
            if e == 0:
                continue
            new = list(exp)
            new[idx] = e - 1
            terms[tuple(new)] = coeff * e
        return self._from_clean(terms)

    def dilate(self, var: str, factor) -> "LaurentPoly":
        """f(x) -> f(factor*x) in the given variable; the q-shift when factor=q"""
        idx = _var_index(var)
        factor = exact(factor)
        return type(self)(
            {exp: c * factor ** exp[idx] for exp, c in self._terms.items()}
        )

    def assert_polynomial(self) -> "LaurentPoly":
        for exp, coeff in self._terms.items():
            if any(e < 0 for e in exp):
                raise NegativeExponentResidue(exp, coeff)
        return self

    # numeric bridge

    def dense(self) -> np.ndarray:
        """Dense double coefficient array, indexed by exponent (polynomials only)"""
        self.assert_polynomial()
        shape = tuple(self.degree_in(v) + 1 for v in VARIABLES[: self.nvars])
        dense = np.zeros(shape, dtype=float)
        for exp, coeff in self._terms.items():
            dense[exp] += float(coeff)
        return dense

    def evaluate(self, *point):
        """Double-precision value; accepts scalars or numpy arrays"""
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates")
        coords = [np.asarray(p, dtype=float) for p in point]
        if not self._terms:
            return np.zeros(np.broadcast(*coords).shape)[()]
        if self.is_polynomial():
            dense = self.dense()
            if self.nvars == 1:
                return npoly.polyval(coords[0], dense)
            xs, ys = np.broadcast_arrays(coords[0], coords[1])
            return npoly.polyval2d(xs, ys, dense)
        for var, coord in zip(VARIABLES, coords):
            if self.valuation_in(var) < 0 and np.any(coord == 0):
                raise PoleAtZero(var)
        total = 0.0
        for exp, coeff in self._terms.items():
            term = float(coeff)
            for coord, e in zip(coords, exp):
                term = term * coord ** e
            total = total + term
        return total

    def __call__(self, *point):
        return self.evaluate(*point)


class LaurentPoly1(LaurentPoly):
    """Laurent polynomial in x"""

    nvars = 1
    __slots__ = ()

    def leading_coefficient(self) -> Scalar:
        if not self._terms:
            return Fraction(0)
        return self._terms[(self.degree(),)]

    def coefficients(self) -> list:
        """Ascending coefficient list of a true polynomial"""
        self.assert_polynomial()
        return [self.coefficient(i) for i in range(self.degree() + 1)]

    def exact_value(self, point) -> Scalar:
        """Evaluate in the coefficient field (Horner on exponents)"""
        point = exact(point)
        total = Fraction(0)
        for (e,), coeff in self._terms.items():
            if e < 0 and point == 0:
                raise PoleAtZero("x")
            total += coeff * point ** e
        return total

    def compose(self, inner: LaurentPoly) -> LaurentPoly:
        """p(inner) for a polynomial p, inner in any number of variables"""
        self.assert_polynomial()
        result = type(inner).zero()
        for power in range(self.degree(), -1, -1):
            result = result * inner + self.coefficient(power)
        return result

    def divide_linear(self, nu) -> Tuple["LaurentPoly1", Scalar]:
        """Synthetic division by (x - nu): quotient and remainder"""
        self.assert_polynomial()
        nu = exact(nu)
        deg = self.degree()
        if deg <= 0:
            return self.zero(), self.coefficient(0) if deg == 0 else Fraction(0)
        carry = Fraction(0)
        quotient = {}
        for power in range(deg, 0, -1):
            carry = carry * nu + self.coefficient(power)
            quotient[(power - 1,)] = carry
        remainder = carry * nu + self.coefficient(0)
        return LaurentPoly1(quotient), remainder

    def exact_divide_linear(self, nu) -> "LaurentPoly1":
        quotient, remainder = self.divide_linear(nu)
        if remainder != 0:
            raise NonzeroRemainder(remainder)
        return quotient

    def lift(self, var: str = "x") -> "LaurentPoly2":
        """Embed as a bivariate polynomial in the given variable"""
        idx = _var_index(var)
        terms = {}
        for (e,), coeff in self._terms.items():
            exp = [0, 0]
            exp[idx] = e
            terms[tuple(exp)] = coeff
        return LaurentPoly2._from_clean(terms)


class LaurentPoly2(LaurentPoly):
    """Laurent polynomial in x, y"""

    nvars = 2
    __slots__ = ()


X = LaurentPoly2.variable("x")
Y = LaurentPoly2.variable("y")
T = LaurentPoly1.variable("x")


def arith(p: LaurentPoly, q, op: str) -> LaurentPoly:
    """Binary arithmetic by name: add, sub, mul or scale (q a scalar)"""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "scale":
        return p.scale(q)
    raise ValueError(f"unknown operation '{op}'")


def reflect(p: LaurentPoly, axes: str = "x") -> LaurentPoly:
    return p.reflect(axes)


def differentiate(p: LaurentPoly, var: str = "x") -> LaurentPoly:
    return p.differentiate(var)


def assert_polynomial(p: LaurentPoly) -> LaurentPoly:
    return p.assert_polynomial()


def evaluate(p: LaurentPoly, *point):
    return p.evaluate(*point)


def max_coefficient_residual(p: LaurentPoly, q: LaurentPoly) -> float:
    return (p - q).max_abs_coefficient()


def expand_in_graded_basis(
    target: LaurentPoly2, basis: Callable[[int, int], LaurentPoly2]
) -> Dict[Tuple[int, int], Scalar]:
    """
    Coefficients of a polynomial in a triangular basis b(m, l) whose
    highest monomial of total degree m (largest x-power first) is x^l y^(m-l).
    Each step removes the current top monomial exactly.
    """
    remainder = dict(target.assert_polynomial().items())
    result: Dict[Tuple[int, int], Scalar] = {}
    while remainder:
        i, j = max(remainder, key=lambda e: (e[0] + e[1], e[0]))
        m, l = i + j, i
        element = basis(m, l)
        lead = element.coefficient(l, m - l)
        if lead == 0:
            raise DegenerateDenominator(f"basis element ({m}, {l}) has no x^{l} y^{m - l} term")
        coeff = remainder.pop((i, j)) / lead
        result[(m, l)] = result.get((m, l), 0) + coeff
        for exp, value in element.items():
            if exp == (i, j):
                continue
            updated = remainder.get(exp, 0) - coeff * value
            if updated == 0:
                remainder.pop(exp, None)
            else:
                remainder[exp] = updated
    return result
