"""Tests for the sparse Laurent polynomial layer"""

import logging
import math
import unittest
from fractions import Fraction

import numpy as np

import config
from errors import DegenerateDenominator, NegativeExponentResidue, NonzeroRemainder, PoleAtZero
from exactalg import (
    LaurentPoly1,
    LaurentPoly2,
    T,
    X,
    Y,
    arith,
    exact,
    expand_in_graded_basis,
    max_coefficient_residual,
)

logging.basicConfig(level=logging.WARNING)


def random_laurent(rng, terms=4):
    """Random LaurentPoly2 with exponents in -3..3 and small rational coefficients"""
    result = {}
    for _ in range(terms):
        exp = (int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
        sign = 1 if rng.random() < 0.5 else -1
        result[exp] = Fraction(sign * int(rng.integers(1, 10)), int(rng.integers(1, 7)))
    return LaurentPoly2(result)


class ExactCoercionTests(unittest.TestCase):
    def test_strings_and_ints_become_fractions(self):
        self.assertEqual(exact("1/5"), Fraction(1, 5))
        self.assertEqual(exact(3), Fraction(3))
        self.assertIsInstance(exact(3), Fraction)

    def test_floats_pass_through(self):
        self.assertIsInstance(exact(0.25), float)


class ArithmeticTests(unittest.TestCase):
    def test_zero_coefficients_are_dropped(self):
        p = LaurentPoly2({(1, 0): 1, (0, 1): 2}) - LaurentPoly2({(1, 0): 1})
        self.assertEqual(p, LaurentPoly2({(0, 1): 2}))
        self.assertEqual(len(p), 1)

    def test_product_with_negative_exponents(self):
        # (x + 1/x)(x - 1/x) = x^2 - x^-2
        p = (T + LaurentPoly1({-1: 1})) * (T - LaurentPoly1({-1: 1}))
        self.assertEqual(p, LaurentPoly1({2: 1, -2: -1}))
        self.assertFalse(p.is_polynomial())

    def test_arith_by_name(self):
        self.assertEqual(arith(X, Y, "add"), X + Y)
        self.assertEqual(arith(X, Y, "mul"), LaurentPoly2({(1, 1): 1}))
        self.assertEqual(arith(X, "1/2", "scale"), LaurentPoly2({(1, 0): Fraction(1, 2)}))
        with self.assertRaises(ValueError):
            arith(X, Y, "divide")

    def test_mixing_variable_counts_is_rejected(self):
        with self.assertRaises(TypeError):
            T + X

    def test_power(self):
        self.assertEqual((X + 1) ** 2, X * X + X.scale(2) + 1)
        self.assertEqual(X ** 0, LaurentPoly2.constant(1))

    def test_degrees(self):
        p = LaurentPoly2({(2, 1): 1, (0, 4): 3})
        self.assertEqual(p.degree(), 4)
        self.assertEqual(p.degree_in("x"), 2)
        self.assertEqual(p.degree_in("y"), 4)
        self.assertEqual(LaurentPoly2.zero().degree(), -1)

    def test_distributivity_on_random_polynomials(self):
        rng = np.random.default_rng(config.RANDOM_SEED)
        for _ in range(25):
            p, q, r = random_laurent(rng), random_laurent(rng), random_laurent(rng)
            self.assertEqual(p * (q + r), p * q + p * r)
            self.assertEqual((q - r) * p, q * p - r * p)


class StructuralMapTests(unittest.TestCase):
    def test_reflect_axes(self):
        p = LaurentPoly2({(1, 2): 1, (2, 1): 1})
        self.assertEqual(p.reflect("x"), LaurentPoly2({(1, 2): -1, (2, 1): 1}))
        self.assertEqual(p.reflect("y"), LaurentPoly2({(1, 2): 1, (2, 1): -1}))
        self.assertEqual(p.reflect("both"), LaurentPoly2({(1, 2): -1, (2, 1): -1}))
        with self.assertRaises(ValueError):
            T.reflect("y")

    def test_differentiate_laurent(self):
        p = LaurentPoly2({(3, 1): 2, (-1, 0): 1})
        self.assertEqual(p.differentiate("x"), LaurentPoly2({(2, 1): 6, (-2, 0): -1}))
        self.assertEqual(p.differentiate("y"), LaurentPoly2({(3, 0): 2}))

    def test_dilate(self):
        p = LaurentPoly2({(2, 1): 1})
        self.assertEqual(p.dilate("x", 3), LaurentPoly2({(2, 1): 9}))

    def test_assert_polynomial_reports_the_offending_term(self):
        p = LaurentPoly2({(1, 0): 1, (0, -2): Fraction(3, 4)})
        with self.assertRaises(NegativeExponentResidue) as ctx:
            p.assert_polynomial()
        self.assertEqual(ctx.exception.exponent, (0, -2))
        self.assertEqual(ctx.exception.coefficient, Fraction(3, 4))

    def test_lift_and_compose(self):
        self.assertEqual(T.lift("y"), Y)
        # (1 + x)^2 composed with y
        self.assertEqual(((1 + T) * (1 + T)).compose(Y), (1 + Y) * (1 + Y))

    def test_reflection_is_an_involution(self):
        rng = np.random.default_rng(config.RANDOM_SEED + 1)
        for _ in range(25):
            p = random_laurent(rng)
            for axis in ("x", "y", "both"):
                self.assertEqual(p.reflect(axis).reflect(axis), p)

    def test_leibniz_rule(self):
        rng = np.random.default_rng(config.RANDOM_SEED + 2)
        for _ in range(25):
            p, q = random_laurent(rng), random_laurent(rng)
            for var in ("x", "y"):
                self.assertEqual((p * q).differentiate(var), p.differentiate(var) * q + p * q.differentiate(var))


class EvaluationTests(unittest.TestCase):
    def test_evaluate_matches_exact_value(self):
        p = LaurentPoly1({0: Fraction(-1, 3), 2: Fraction(5, 2), 3: 1})
        self.assertAlmostEqual(float(p.evaluate(0.7)), float(p.exact_value(Fraction(7, 10))), places=14)

    def test_vectorized_bivariate_evaluation(self):
        p = X * Y + Y.scale(2)
        xs = np.array([0.5, -1.0])
        ys = np.array([2.0, 3.0])
        np.testing.assert_allclose(p.evaluate(xs, ys), xs * ys + 2 * ys)

    def test_pole_at_zero(self):
        with self.assertRaises(PoleAtZero):
            LaurentPoly2({(0, -1): 1}).evaluate(1.0, 0.0)

    def test_evaluation_respects_sum_and_product(self):
        rng = np.random.default_rng(config.RANDOM_SEED + 3)
        for _ in range(25):
            p, q = random_laurent(rng), random_laurent(rng)
            x = float(rng.uniform(0.5, 1.5)) * (1 if rng.random() < 0.5 else -1)
            y = float(rng.uniform(0.5, 1.5)) * (1 if rng.random() < 0.5 else -1)
            pv, qv = float(p.evaluate(x, y)), float(q.evaluate(x, y))
            self.assertTrue(math.isclose(float((p + q).evaluate(x, y)), pv + qv, rel_tol=1e-9, abs_tol=1e-9))
            self.assertTrue(math.isclose(float((p * q).evaluate(x, y)), pv * qv, rel_tol=1e-9, abs_tol=1e-9))


class DivisionTests(unittest.TestCase):
    def test_synthetic_division(self):
        p = (T - 2) * (T * T + 1)
        self.assertEqual(p.exact_divide_linear(2), T * T + 1)
        quotient, remainder = (T * T).divide_linear(1)
        self.assertEqual(quotient, T + 1)
        self.assertEqual(remainder, 1)

    def test_nonzero_remainder_raises(self):
        with self.assertRaises(NonzeroRemainder):
            (T * T + 1).exact_divide_linear(1)


class GradedExpansionTests(unittest.TestCase):
    @staticmethod
    def basis(m, l):
        # x^l y^(m-l) plus lower-order junk
        return LaurentPoly2.monomial(2, l, m - l) + LaurentPoly2.constant(m)

    def test_expansion_reconstructs_target(self):
        target = LaurentPoly2({(1, 1): 3, (0, 2): -1, (0, 0): Fraction(1, 2)})
        coeffs = expand_in_graded_basis(target, self.basis)
        rebuilt = LaurentPoly2.zero()
        for (m, l), c in coeffs.items():
            rebuilt = rebuilt + self.basis(m, l).scale(c)
        self.assertEqual(rebuilt, target)
        self.assertEqual(coeffs[(2, 1)], Fraction(3, 2))

    def test_missing_pivot(self):
        with self.assertRaises(DegenerateDenominator):
            expand_in_graded_basis(X, lambda m, l: LaurentPoly2.monomial(1, 0, m))

    def test_max_coefficient_residual(self):
        self.assertEqual(max_coefficient_residual(X + Y.scale(3), X), 3.0)


if __name__ == "__main__":
    unittest.main(verbosity=2)
