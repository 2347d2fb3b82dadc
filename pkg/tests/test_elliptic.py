"""
Tests for the Jacobi elliptic kernel against scipy.special and direct quadrature.
"""
import math
import unittest

import numpy as np
from scipy import special
from scipy.integrate import quad
from scipy.optimize import brentq

from kgalerkin.core.elliptic import (
    complete_K,
    jacobi_cn,
    jacobi_dn,
    jacobi_sn,
    jacobi_sncndn,
    modulus,
)
from kgalerkin.utils.errors import DomainError

MODULI = [0.0, 0.1, 0.267, 0.5, 0.73, 0.78, 0.87, 0.993]


def incomplete_F(phi, k):
    return quad(lambda theta: 1.0 / math.sqrt(1.0 - (k * math.sin(theta)) ** 2), 0.0, phi, epsabs=1e-14, epsrel=1e-14)[0]


class TestCompleteK(unittest.TestCase):
    def test_k_zero_is_half_pi(self):
        self.assertEqual(complete_K(0.0), math.pi / 2)

    def test_against_scipy(self):
        for k in MODULI:
            with self.subTest(k=k):
                expected = special.ellipk(k * k)
                self.assertLess(abs(complete_K(k) - expected) / expected, 1e-13)

    def test_against_quadrature(self):
        for k in (1 / math.sqrt(2.0), 0.5, 0.993):
            with self.subTest(k=k):
                self.assertAlmostEqual(complete_K(k), incomplete_F(math.pi / 2, k), places=11)

    def test_monotone(self):
        values = [complete_K(k) for k in MODULI]
        self.assertTrue(all(b > a for a, b in zip(values, values[1:])))

    def test_rejects_out_of_range(self):
        for k in (-0.1, 1.0, 1.5, float("nan")):
            with self.subTest(k=k), self.assertRaises(DomainError):
                complete_K(k)


class TestJacobiFunctions(unittest.TestCase):
    def setUp(self):
        self.u = np.linspace(-7.0, 11.0, 301)

    def test_against_scipy(self):
        for k in MODULI:
            sn, cn, dn = jacobi_sncndn(self.u, k)
            sn_ref, cn_ref, dn_ref, _ = special.ellipj(self.u, k * k)
            with self.subTest(k=k):
                np.testing.assert_allclose(sn, sn_ref, rtol=0, atol=1e-12)
                np.testing.assert_allclose(cn, cn_ref, rtol=0, atol=1e-12)
                np.testing.assert_allclose(dn, dn_ref, rtol=0, atol=1e-12)

    def test_pythagorean_identities(self):
        for k in MODULI:
            sn, cn, dn = jacobi_sncndn(self.u, k)
            with self.subTest(k=k):
                np.testing.assert_allclose(sn**2 + cn**2, 1.0, rtol=0, atol=1e-12)
                np.testing.assert_allclose(dn**2 + (k * sn) ** 2, 1.0, rtol=0, atol=1e-12)

    def test_derivative_identities(self):
        h = 1e-5
        for k in (0.267, 0.78, 0.993):
            sn_p, cn_p, _ = jacobi_sncndn(self.u + h, k)
            sn_m, cn_m, _ = jacobi_sncndn(self.u - h, k)
            sn, cn, dn = jacobi_sncndn(self.u, k)
            with self.subTest(k=k):
                np.testing.assert_allclose((sn_p - sn_m) / (2 * h), cn * dn, rtol=0, atol=1e-5)
                np.testing.assert_allclose((cn_p - cn_m) / (2 * h), -sn * dn, rtol=0, atol=1e-5)

    def test_second_order_equations(self):
        # sn'' + (1 + k^2) sn - 2 k^2 sn^3 = 0 and cn'' - (2 k^2 - 1) cn + 2 k^2 cn^3 = 0
        h = 1e-4
        for k in (0.1, 0.267, 0.5, 0.73, 0.78, 0.87, 0.993):
            sn_p, cn_p, _ = jacobi_sncndn(self.u + h, k)
            sn_m, cn_m, _ = jacobi_sncndn(self.u - h, k)
            sn, cn, _ = jacobi_sncndn(self.u, k)
            sn_second = (sn_p - 2 * sn + sn_m) / h**2
            cn_second = (cn_p - 2 * cn + cn_m) / h**2
            with self.subTest(k=k):
                sn_residual = sn_second + (1 + k * k) * sn - 2 * k * k * sn**3
                cn_residual = cn_second - (2 * k * k - 1) * cn + 2 * k * k * cn**3
                self.assertLessEqual(float(np.max(np.abs(sn_residual))), 1e-5)
                self.assertLessEqual(float(np.max(np.abs(cn_residual))), 1e-5)

    def test_zeros(self):
        K = complete_K(0.7)
        for n in (2, 3):
            with self.subTest(n=n):
                self.assertLess(abs(jacobi_sn(2 * n * K, 0.7)), 1e-11)
        K = complete_K(0.8)
        for n in (0, 1, 2):
            with self.subTest(n=n):
                self.assertLess(abs(jacobi_cn((2 * n + 1) * K, 0.8)), 1e-11)

    def test_periodicity(self):
        for k in (0.267, 0.78, 0.993):
            period = 4 * complete_K(k)
            with self.subTest(k=k):
                np.testing.assert_allclose(jacobi_sn(self.u + period, k), jacobi_sn(self.u, k), rtol=0, atol=1e-11)
                np.testing.assert_allclose(jacobi_cn(self.u + period, k), jacobi_cn(self.u, k), rtol=0, atol=1e-11)

    def test_inverse_of_elliptic_integral(self):
        k, u = 0.5, 1.0
        phi = brentq(lambda p: incomplete_F(p, k) - u, 0.0, math.pi / 2, xtol=1e-15)
        self.assertAlmostEqual(jacobi_sn(u, k), math.sin(phi), places=11)
        self.assertAlmostEqual(jacobi_cn(u, k), math.cos(phi), places=11)

    def test_quarter_period(self):
        for k in (0.267, 0.78, 0.87, 0.993):
            K = complete_K(k)
            with self.subTest(k=k):
                self.assertAlmostEqual(jacobi_sn(K, k), 1.0, places=12)
                self.assertAlmostEqual(jacobi_cn(K, k), 0.0, places=12)
                self.assertAlmostEqual(jacobi_sn(2 * K, k), 0.0, places=12)
                self.assertAlmostEqual(jacobi_dn(K, k), math.sqrt(1 - k * k), places=12)

    def test_k_zero_is_circular(self):
        np.testing.assert_allclose(jacobi_sn(self.u, 0.0), np.sin(self.u), rtol=0, atol=1e-15)
        np.testing.assert_allclose(jacobi_cn(self.u, 0.0), np.cos(self.u), rtol=0, atol=1e-15)

    def test_scalar_input_returns_floats(self):
        sn, cn, dn = jacobi_sncndn(0.3, 0.5)
        self.assertIsInstance(sn, float)
        self.assertIsInstance(cn, float)
        self.assertIsInstance(dn, float)


class TestModulus(unittest.TestCase):
    def test_complementary_modulus(self):
        m = modulus(0.6)
        self.assertAlmostEqual(m.k_prime, 0.8, places=15)

    def test_rejects_unit_modulus(self):
        with self.assertRaises(DomainError):
            modulus(1.0)


if __name__ == "__main__":
    unittest.main()
