"""Tests for Pochhammer symbols, terminating series and Gamma"""

import logging
import math
import unittest
from fractions import Fraction

import numpy as np

import config
from errors import GammaPole, PochhammerPole, QPochhammerPole
from exactalg import LaurentPoly1
from hyper import (
    HalfInteger,
    gamma_real,
    gauss_2f1_terminating,
    log_abs_gamma,
    phi32_terminating,
    pochhammer,
    qpochhammer,
    qseries_coefficients,
)

logging.basicConfig(level=logging.WARNING)


class PochhammerTests(unittest.TestCase):
    def test_exact_values(self):
        self.assertEqual(pochhammer(Fraction(1, 2), 3), Fraction(15, 8))
        self.assertEqual(pochhammer(5, 0), 1)
        self.assertEqual(pochhammer(1, 4), 24)

    def test_negative_order_rejected(self):
        with self.assertRaises(ValueError):
            pochhammer(1, -1)

    def test_order_splits(self):
        rng = np.random.default_rng(config.RANDOM_SEED)
        for _ in range(30):
            a = Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 8)))
            m, n = int(rng.integers(0, 6)), int(rng.integers(0, 6))
            self.assertEqual(pochhammer(a, m + n), pochhammer(a, m) * pochhammer(a + m, n))


class Gauss2F1Tests(unittest.TestCase):
    def test_coefficients(self):
        # 2F1(-2, 1; 1; z) = (1 - z)^2
        self.assertEqual(gauss_2f1_terminating(2, 1, 1), LaurentPoly1({0: 1, 1: -2, 2: 1}))

    def test_chu_vandermonde(self):
        # 2F1(-n, b; c; 1) = (c - b)_n / (c)_n
        n, b, c = 3, Fraction(1, 3), Fraction(5, 2)
        series = gauss_2f1_terminating(n, b, c)
        self.assertEqual(series.exact_value(1), pochhammer(c - b, n) / pochhammer(c, n))

    def test_order_zero_is_one(self):
        self.assertEqual(gauss_2f1_terminating(0, 2, 3), LaurentPoly1.constant(1))

    def test_pole_before_truncation(self):
        with self.assertRaises(PochhammerPole):
            gauss_2f1_terminating(3, 1, -1)

    def test_value_at_origin_is_one(self):
        rng = np.random.default_rng(config.RANDOM_SEED + 1)
        for _ in range(20):
            n = int(rng.integers(0, 7))
            b = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
            c = Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 5)))
            self.assertEqual(gauss_2f1_terminating(n, b, c).exact_value(0), 1)

    def test_basic_series_tends_to_gauss_series(self):
        # 3phi2(q^-n, q^b, t; q^c, t; q, z) = 2phi1(q^-n, q^b; q^c; q, z) -> 2F1(-n, b; c; z) as q -> 1
        q = 1 - 1e-4
        rng = np.random.default_rng(config.RANDOM_SEED + 2)
        for _ in range(10):
            n = int(rng.integers(1, 5))
            b, c = float(rng.uniform(0.2, 3.0)), float(rng.uniform(0.2, 3.0))
            basic = phi32_terminating(n, q ** b, 0.3, q ** c, 0.3, q)
            classical = gauss_2f1_terminating(n, b, c)
            np.testing.assert_allclose(
                [basic.coefficient(j) for j in range(n + 1)],
                [float(classical.coefficient(j)) for j in range(n + 1)],
                rtol=1e-2,
            )


class GammaTests(unittest.TestCase):
    def test_values(self):
        self.assertAlmostEqual(gamma_real(0.5), math.sqrt(math.pi), places=14)
        self.assertAlmostEqual(gamma_real(5), 24.0, places=12)
        self.assertAlmostEqual(log_abs_gamma(10), math.log(362880), places=12)

    def test_poles(self):
        for x in (0, -1, -3):
            with self.assertRaises(GammaPole):
                gamma_real(x)
        with self.assertRaises(GammaPole):
            log_abs_gamma(-2)

    def test_functional_equation(self):
        for x in np.linspace(0.1, 20.0, 200):
            self.assertTrue(math.isclose(gamma_real(x + 1), x * gamma_real(x), rel_tol=1e-12), x)


class HalfIntegerTests(unittest.TestCase):
    def test_arithmetic(self):
        h = HalfInteger.of(Fraction(3, 2))
        self.assertFalse(h.is_integer)
        self.assertEqual(str(h), "3/2")
        self.assertEqual(h + HalfInteger.of(Fraction(1, 2)), HalfInteger(4))
        self.assertEqual(float(h), 1.5)

    def test_rejects_thirds(self):
        with self.assertRaises(ValueError):
            HalfInteger.of(Fraction(1, 3))


class QSeriesTests(unittest.TestCase):
    def test_qpochhammer(self):
        q = 0.5
        self.assertAlmostEqual(qpochhammer(0.3, q, 3), (1 - 0.3) * (1 - 0.15) * (1 - 0.075), places=15)
        self.assertEqual(qpochhammer(0.3, q, 0), 1.0)

    def test_q_chu_vandermonde(self):
        # 2phi1(q^-n, b; c; q, q) = (c/b; q)_n / (c; q)_n * b^n
        n, b, c, q = 3, 0.4, 0.7, 0.3
        total = sum(qseries_coefficients(n, (b,), (c,), q, z=q))
        expected = qpochhammer(c / b, q, n) / qpochhammer(c, q, n) * b ** n
        self.assertAlmostEqual(total, expected, places=12)

    def test_pole(self):
        with self.assertRaises(QPochhammerPole):
            qseries_coefficients(2, (0.5,), (1.0,), 0.5)

    def test_phi32_length(self):
        poly = phi32_terminating(4, 0.2, 0.3, 0.4, 0.5, 0.6)
        self.assertEqual(poly.degree(), 4)
        self.assertEqual(poly.coefficient(0), 1.0)

    def test_qpochhammer_order_splits(self):
        rng = np.random.default_rng(config.RANDOM_SEED + 3)
        for _ in range(30):
            a, q = float(rng.uniform(0.05, 0.95)), float(rng.uniform(-0.9, 0.9))
            m, n = int(rng.integers(0, 6)), int(rng.integers(0, 6))
            whole = float(qpochhammer(a, q, m + n))
            split = float(qpochhammer(a, q, m)) * float(qpochhammer(a * q ** m, q, n))
            self.assertTrue(math.isclose(whole, split, rel_tol=1e-12, abs_tol=1e-14))


if __name__ == "__main__":
    unittest.main(verbosity=2)
