"""Tests for the bivariate Big -1 Jacobi polynomials"""

import logging
import unittest
from fractions import Fraction

import numpy as np

import config
from bivariate import (
    PEARSON_EQUATIONS,
    STEPWISE_EQUATIONS,
    BivIndex,
    BivParams,
    BivRegime,
    L1_apply,
    L2_apply,
    adjudicate_recurrence,
    biv_coeffs,
    biv_gram_matrix,
    biv_recurrence_coeffs,
    commutator,
    domain_biv,
    eigen_residual,
    expand_in_basis,
    little_biv_coeffs,
    mu_n,
    norm_H,
    nu_k,
    pearson_grid,
    pearson_residuals,
    pearson_stepwise_residuals,
    project_coefficients,
    projection_table,
    recurrence_coefficients,
    recurrence_oracle,
    recurrence_residual,
    rho_k,
    sample_domain,
    weight_biv,
    weight_biv_from_distances,
)
from errors import InvalidParameters, OutsideSupport, RegimeMismatch
from exactalg import T, LaurentPoly2, X, Y

logging.basicConfig(level=logging.WARNING)

INSIDE = BivParams("1/2", "1/2", "1/2", "1/5")
INSIDE_NEG = BivParams("1/3", "2/3", "1/4", "-1/3")
OUTSIDE = BivParams("1/2", "1/2", "1/2", 3)
EXACT_SETS = [INSIDE, INSIDE_NEG, OUTSIDE]


def indices(n_max):
    return [BivIndex(n, k) for n in range(n_max + 1) for k in range(n + 1)]


class ParameterTests(unittest.TestCase):
    def test_regimes(self):
        self.assertIs(INSIDE.regime, BivRegime.INSIDE)
        self.assertIs(OUTSIDE.regime, BivRegime.OUTSIDE)
        self.assertTrue(INSIDE.is_exact)
        self.assertFalse(BivParams(0.5, 0.5, 0.5, 0.2).is_exact)

    def test_validation(self):
        with self.assertRaises(InvalidParameters):
            BivParams(-1, 0, 0, 0)
        with self.assertRaises(InvalidParameters):
            BivParams(0, 0, 0, -1)
        with self.assertRaises(InvalidParameters):
            BivIndex(1, 2)


class ConstructionTests(unittest.TestCase):
    def test_rho(self):
        self.assertEqual(rho_k(0, "1/5"), T ** 0)
        self.assertEqual(rho_k(1, "1/5"), T + Fraction(1, 5))
        self.assertEqual(rho_k(2, "1/5"), T * T - Fraction(1, 25))

    def test_constant(self):
        self.assertEqual(biv_coeffs(BivIndex(0, 0), INSIDE), LaurentPoly2.constant(1))

    def test_polynomial_with_expected_degrees(self):
        for p in EXACT_SETS:
            for idx in indices(4):
                f = biv_coeffs(idx, p)
                self.assertTrue(f.is_polynomial())
                self.assertEqual(f.degree(), idx.n)
                self.assertEqual(f.degree_in("x"), idx.k)

    def test_little_specialization(self):
        p = BivParams("1/2", "1/3", "1/4", 0)
        for idx in indices(3):
            self.assertEqual(little_biv_coeffs(idx, p.alpha, p.beta, p.gamma), biv_coeffs(idx, p), str(idx))


class OperatorTests(unittest.TestCase):
    def test_eigenvalues(self):
        self.assertEqual(mu_n(0, INSIDE), 0)
        self.assertEqual(mu_n(2, INSIDE), -1)
        self.assertEqual(mu_n(1, INSIDE), Fraction(9, 4))
        self.assertEqual(nu_k(0, INSIDE), 0)
        self.assertEqual(nu_k(1, INSIDE), -6)
        pairs = {(mu_n(n, INSIDE), nu_k(k, INSIDE)) for n in range(7) for k in range(n + 1)}
        self.assertEqual(len(pairs), len(indices(6)))

    def test_eigen_equations_are_exact(self):
        for p in EXACT_SETS:
            for idx in indices(3):
                self.assertTrue(eigen_residual(idx, p, "L1").is_zero(), f"L1 {idx} {p}")
                self.assertTrue(eigen_residual(idx, p, "L2").is_zero(), f"L2 {idx} {p}")

    def test_operators_commute_and_preserve_degree(self):
        for p in (INSIDE, OUTSIDE):
            for total in range(5):
                for i in range(total + 1):
                    f = LaurentPoly2.monomial(1, i, total - i)
                    self.assertTrue(commutator(p, f).is_zero(), f"x^{i} y^{total - i}")
                    for image in (L1_apply(p, f), L2_apply(p, f)):
                        self.assertTrue(image.is_polynomial())
                        self.assertLessEqual(image.degree(), total)

    def test_constants_are_annihilated(self):
        one = LaurentPoly2.constant(1)
        self.assertTrue(L1_apply(INSIDE, one).is_zero())
        self.assertTrue(L2_apply(INSIDE, one).is_zero())


class RecurrenceTests(unittest.TestCase):
    def test_expansion_reconstructs(self):
        target = X * X * Y + Y.scale(Fraction(1, 3)) - 2
        coeffs = expand_in_basis(target, INSIDE)
        rebuilt = LaurentPoly2.zero()
        for idx, value in coeffs.items():
            rebuilt = rebuilt + biv_coeffs(idx, INSIDE).scale(value)
        self.assertEqual(rebuilt, target)

    def test_oracle_stencils(self):
        for p in EXACT_SETS:
            for idx in indices(3):
                y_terms = set(recurrence_oracle(idx, p, "y"))
                self.assertTrue(y_terms <= {BivIndex(idx.n + d, idx.k) for d in (-1, 0, 1) if idx.n + d >= idx.k})
                x_terms = recurrence_oracle(idx, p, "x")
                self.assertTrue(all(abs(t.n - idx.n) <= 1 and abs(t.k - idx.k) <= 1 for t in x_terms))

    def test_validated_recurrences_are_exact(self):
        for p in EXACT_SETS:
            for idx in indices(3):
                for multiplier in ("x", "y"):
                    coefficients = recurrence_coefficients(idx, p, multiplier)
                    residual = recurrence_residual(idx, p, multiplier, coefficients)
                    self.assertTrue(residual.is_zero(), f"{multiplier} {idx} {p}")

    def test_deviations_carry_the_expansion_value(self):
        for idx in indices(2):
            for multiplier in ("x", "y"):
                validated, deviations = adjudicate_recurrence(idx, INSIDE, multiplier)
                oracle = recurrence_oracle(idx, INSIDE, multiplier)
                for d in deviations:
                    self.assertNotEqual(d.formula_value, d.validated_value)
                    row = d.to_dict()
                    self.assertEqual(row["multiplier"], multiplier)
                    self.assertEqual((row["n"], row["k"]), (idx.n, idx.k))
                for target, value in validated.items():
                    self.assertEqual(value, oracle.get(target, 0))

    def test_closed_form_coefficients_are_exact(self):
        coeffs = biv_recurrence_coeffs(BivIndex(2, 1), INSIDE)
        self.assertIsInstance(coeffs.a_nk, Fraction)
        self.assertEqual(coeffs.b_nk, 1 - coeffs.a_nk - coeffs.c_nk)
        self.assertEqual(len(coeffs.entries(BivIndex(2, 1), "x")), 8)
        self.assertEqual(len(biv_recurrence_coeffs(BivIndex(3, 1), INSIDE).entries(BivIndex(3, 1), "x")), 9)
        self.assertEqual(len(coeffs.entries(BivIndex(0, 0), "x")), 3)


class DomainTests(unittest.TestCase):
    def test_inside_triangles(self):
        domain = domain_biv(INSIDE)
        self.assertEqual(len(domain.triangles), 4)
        self.assertIn(
            ((Fraction(1, 5), Fraction(1, 5)), (1, 1), (Fraction(1, 5), 1)), domain.triangles
        )
        self.assertAlmostEqual(domain.area, 2 * (1 - 0.2) ** 2)

    def test_degenerate_and_outside(self):
        self.assertEqual(len(domain_biv(BivParams(0, 0, 0, 0)).triangles), 2)
        self.assertAlmostEqual(domain_biv(BivParams(0, 0, 0, 0)).area, 2.0)
        outside = domain_biv(OUTSIDE)
        self.assertEqual(len(outside.triangles), 4)
        self.assertAlmostEqual(outside.area, 2 * (3 - 1) ** 2)
        self.assertTrue(outside.contains(2.5, 1.5))
        self.assertFalse(outside.contains(1.5, 2.5))

    def test_regime_mismatch(self):
        with self.assertRaises(RegimeMismatch):
            domain_biv(INSIDE, BivRegime.OUTSIDE)


class WeightTests(unittest.TestCase):
    def test_positive_on_samples(self):
        rng = np.random.default_rng(config.RANDOM_SEED)
        for p in EXACT_SETS:
            xs, ys = sample_domain(domain_biv(p), 300, rng)
            self.assertTrue(np.all(weight_biv(xs, ys, p) > 0), str(p))

    def test_outside_support(self):
        with self.assertRaises(OutsideSupport):
            weight_biv(0.1, 0.5, INSIDE)

    def test_finite_next_to_the_origin(self):
        p = BivParams("1/2", "1/2", "1/2", 0)
        x, y = np.array([1e-280, -1e-280]), np.array([2e-280, 2e-280])
        ax, ay = np.abs(x), np.abs(y)
        values = weight_biv_from_distances(x, y, ax, ay - ax, ay, 1.0 - ay, p, BivRegime.INSIDE)
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertTrue(np.all(values > 0))

    def test_norms_positive(self):
        for p in EXACT_SETS:
            for idx in indices(4):
                self.assertGreater(norm_H(idx, p), 0)


class QuadratureTests(unittest.TestCase):
    def test_gram_inside(self):
        gram, expected, idx, _ = biv_gram_matrix(1, INSIDE)
        self.assertEqual(idx, indices(1))
        np.testing.assert_allclose(np.diag(gram), expected, rtol=config.TOLERANCES["biv_orthogonality"])
        scale = np.sqrt(np.outer(np.diag(gram), np.diag(gram)))
        off = np.abs(gram) / scale - np.eye(len(idx))
        self.assertLess(np.max(np.abs(off)), config.TOLERANCES["biv_orthogonality"])

    def test_gram_at_zero_delta(self):
        gram, expected, _, _ = biv_gram_matrix(1, BivParams("1/2", "1/2", "1/2", 0))
        tolerance = config.TOLERANCES["biv_orthogonality"]
        np.testing.assert_allclose(np.diag(gram), expected, rtol=tolerance)
        scale = np.sqrt(np.outer(np.diag(gram), np.diag(gram)))
        self.assertLess(np.max(np.abs(np.abs(gram) / scale - np.eye(len(expected)))), tolerance)

    def test_gram_outside(self):
        gram, expected, _, _ = biv_gram_matrix(1, OUTSIDE)
        np.testing.assert_allclose(np.diag(gram), expected, rtol=config.TOLERANCES["biv_orthogonality"])

    def test_y_times_constant_has_two_projections(self):
        projections = project_coefficients(BivIndex(0, 0), INSIDE, "y")
        tolerance = config.TOLERANCES["projection"]
        significant = {target for target, value in projections.items() if abs(value) > tolerance}
        self.assertEqual(significant, {BivIndex(1, 0), BivIndex(0, 0)})
        validated = recurrence_coefficients(BivIndex(0, 0), INSIDE, "y")
        for target in significant:
            self.assertAlmostEqual(projections[target], float(validated.get(target, 0)), delta=tolerance)

    def test_projections_match_recurrence(self):
        table = projection_table(1, INSIDE)
        for (multiplier, idx), projections in table.items():
            validated = recurrence_coefficients(idx, INSIDE, multiplier)
            for target in set(projections) | set(validated):
                expected = float(validated.get(target, 0))
                got = projections.get(target, 0.0)
                self.assertLess(
                    abs(got - expected) / max(1.0, abs(expected)), config.TOLERANCES["projection"],
                    f"{multiplier}*J{idx} onto J{target}",
                )


class PearsonTests(unittest.TestCase):
    def test_grid_points_lie_in_domain(self):
        domain = domain_biv(INSIDE)
        points = pearson_grid(INSIDE, 4)
        self.assertEqual(len(points), 16)
        self.assertTrue(all(domain.contains(x, y, interior=True) for x, y in points))

    def test_residuals_vanish(self):
        for x, y in pearson_grid(INSIDE, 3):
            residuals = pearson_residuals(INSIDE, x, y)
            self.assertEqual(len(residuals), len(PEARSON_EQUATIONS))
            self.assertLess(max(residuals), config.TOLERANCES["pearson"], f"({x}, {y})")

    def test_negative_control(self):
        perturbed = pearson_residuals(INSIDE, 0.4, 0.7, alpha_shift=0.1)
        self.assertGreaterEqual(max(perturbed), 1e-3)

    def test_stepwise_reduction_holds(self):
        for p in (INSIDE, INSIDE_NEG, BivParams(2, "3/2", 3, 0)):
            for x, y in pearson_grid(p, 3):
                residuals = pearson_stepwise_residuals(p, x, y)
                self.assertEqual(len(residuals), len(STEPWISE_EQUATIONS))
                self.assertLess(max(residuals), config.TOLERANCES["pearson"], f"({x}, {y}) {p}")

    def test_stepwise_reduction_sees_alpha_shift(self):
        perturbed = dict(zip(STEPWISE_EQUATIONS, pearson_stepwise_residuals(INSIDE, 0.4, 0.7, alpha_shift=0.1)))
        self.assertLess(perturbed["reduced"], 1e-10)
        self.assertLess(perturbed["f2-separation"], 1e-10)
        self.assertGreater(perturbed["f3-ode"], 1e-2)
        self.assertGreater(perturbed["f3-closed"], 1e-3)

    def test_outside_regime_rejected(self):
        with self.assertRaises(RegimeMismatch):
            pearson_residuals(OUTSIDE, 2.0, 1.5)


if __name__ == "__main__":
    unittest.main(verbosity=2)
