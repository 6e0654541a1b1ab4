"""Tests for the Chihara polynomials and the kernel route to h_n"""

import logging
import unittest
from fractions import Fraction

import numpy as np

import config
from bigm1 import UniParams, UniRegime, bare_norm_h, norm_h
from chihara import (
    ChiharaParams,
    chihara_coeffs,
    chihara_gram,
    chihara_norm_eta,
    chihara_relation_check,
    chihara_weight,
    christoffel_kernel,
    derive_full_norm_via_kernel,
    derive_h_via_kernel,
)
from errors import InvalidParameters, RegimeMismatch
from exactalg import T, LaurentPoly1

logging.basicConfig(level=logging.WARNING)

INSIDE_SETS = [UniParams(0, 0, 0), UniParams("1/2", "1/3", "1/4"), UniParams("3/2", "-1/3", "-2/5")]


class ChiharaPolynomialTests(unittest.TestCase):
    def test_low_degrees(self):
        p = ChiharaParams(0, 0, "1/3")
        self.assertEqual(chihara_coeffs(0, p), LaurentPoly1.constant(1))
        self.assertEqual(chihara_coeffs(1, p), T - Fraction(1, 3))

    def test_second_degree_is_monic(self):
        self.assertEqual(chihara_coeffs(2, ChiharaParams(0, 0, 0)), T * T - Fraction(1, 2))

    def test_eta_values(self):
        self.assertAlmostEqual(chihara_norm_eta(0, ChiharaParams(0, 0, 0)), 1.0, places=14)
        for p in (ChiharaParams(0, 0, "1/2"), ChiharaParams("1/2", "1/3", "-1/4")):
            self.assertTrue(all(chihara_norm_eta(n, p) > 0 for n in range(11)))

    def test_invalid(self):
        with self.assertRaises(InvalidParameters):
            ChiharaParams(-1, 0, 0)

    def test_gram_matrix(self):
        gram, expected, _ = chihara_gram(3, ChiharaParams(0, 0, "1/2"))
        np.testing.assert_allclose(np.diag(gram), expected, rtol=config.TOLERANCES["uni_orthogonality"])
        off = gram - np.diag(np.diag(gram))
        self.assertLess(np.max(np.abs(off)) / np.max(expected), 1e-8)

    def test_gram_matrix_with_zero_gamma(self):
        p = ChiharaParams("-1/2", "1/2", 0)
        gram, expected, result = chihara_gram(3, p)
        self.assertTrue(result.converged)
        np.testing.assert_allclose(np.diag(gram), expected, rtol=config.TOLERANCES["uni_orthogonality"])
        off = gram - np.diag(np.diag(gram))
        self.assertLess(np.max(np.abs(off)) / np.max(expected), 1e-8)

    def test_weight_finite_next_to_the_origin(self):
        tiny = np.array([6.1e-276, -6.1e-276])
        values = chihara_weight(tiny, np.abs(tiny), 1.0 - np.abs(tiny), ChiharaParams("-1/2", "1/2", 0))
        np.testing.assert_allclose(values, [1.0, 1.0], rtol=1e-10)


class KernelTests(unittest.TestCase):
    def test_kernel_is_monic_with_exact_division(self):
        for p in INSIDE_SETS:
            self.assertEqual(christoffel_kernel(0, p), LaurentPoly1.constant(1))
            for n in range(7):
                kernel = christoffel_kernel(n, p)
                self.assertEqual(kernel.degree(), n)
                self.assertEqual(kernel.leading_coefficient(), 1)

    def test_first_kernel_at_origin(self):
        self.assertEqual(christoffel_kernel(1, UniParams(0, 0, 0)), T)

    def test_relation_pointwise(self):
        for p in INSIDE_SETS:
            for n in range(5):
                report = chihara_relation_check(n, p)
                self.assertTrue(report.passed, f"{report.check_name}: {report.max_residual} at {report.witness}")

    def test_relation_needs_inside_regime(self):
        with self.assertRaises(RegimeMismatch):
            chihara_relation_check(1, UniParams(0, 0, 2))


class KernelNormalizationTests(unittest.TestCase):
    def test_kernel_route_matches_formula(self):
        for p in INSIDE_SETS:
            for n in range(7):
                formula = norm_h(n, p.a, p.b, UniRegime.INSIDE, p.c)
                self.assertAlmostEqual(derive_full_norm_via_kernel(n, p) / formula, 1.0, delta=1e-8)

    def test_bare_constant(self):
        p = UniParams("1/2", "1/3", "1/4")
        for n in range(5):
            self.assertAlmostEqual(derive_h_via_kernel(n, p) / bare_norm_h(n, p.a, p.b), 1.0, delta=1e-8)


if __name__ == "__main__":
    unittest.main(verbosity=2)
