"""
Tests for lattices, harmonic forms and the grid calculus
"""

import os
import sys
import math
import unittest

import numpy

# Allow unittests to be run from within the project base.
if os.path.exists("src"):
    sys.path.append("src")
if os.path.exists("../src"):
    sys.path.append("../src")

from quatspec.torus import (HarmonicForm, Lattice, MonodromyRep, dual_basis,
                            dual_point, dual_window, fourier_coefficients,
                            grid_partials, grid_points, is_real, monodromy_of,
                            reduce_mod_dual, rho_conjugate, synthesize)
from quatspec.utils.errors import DegenerateLattice


class TestLattice(unittest.TestCase):

    def test_square(self):
        lat = Lattice.square()
        self.assertAlmostEqual(lat.area, 4 * math.pi ** 2)
        self.assertEqual(Lattice.from_dict(lat.to_dict()), lat)

    def test_degenerate(self):
        with self.assertRaises(DegenerateLattice):
            Lattice(1.0, 2.0)
        with self.assertRaises(DegenerateLattice):
            Lattice(1j, 1.0)
        with self.assertRaises(DegenerateLattice):
            Lattice(0.0, 1j)


class TestDualLattice(unittest.TestCase):

    def setUp(self):
        self.lat = Lattice.square()

    def test_square_dual_basis(self):
        eta1, eta2 = dual_basis(self.lat)
        self.assertTrue(eta1.eta.isclose(HarmonicForm(0.5j, 0.5j)))
        self.assertTrue(eta2.eta.isclose(HarmonicForm(0.5, -0.5)))

    def test_periods(self):
        lat = Lattice(2.0, 0.7 + 1.9j)
        eta1, eta2 = dual_basis(lat)
        self.assertAlmostEqual(eta1.eta.period(lat.gamma1), 2j * math.pi)
        self.assertAlmostEqual(eta1.eta.period(lat.gamma2), 0.0)
        self.assertAlmostEqual(eta2.eta.period(lat.gamma2), 2j * math.pi)
        self.assertTrue(monodromy_of(lat, dual_point(lat, 3, -2).eta).isclose(MonodromyRep(1.0, 1.0)))

    def test_window_order(self):
        window = dual_window(self.lat, 1)
        self.assertEqual(len(window), 9)
        self.assertEqual([(p.m, p.n) for p in window[:3]], [(-1, -1), (-1, 0), (-1, 1)])

    def test_reduce(self):
        omega = HarmonicForm(0.1 + 0.05j, -0.2j)
        shifted = omega + dual_point(self.lat, 1, 2).eta
        self.assertTrue(reduce_mod_dual(self.lat, shifted).isclose(omega, tol=1e-10))
        self.assertTrue(monodromy_of(self.lat, shifted).isclose(monodromy_of(self.lat, omega)))

    def test_real_structure(self):
        omega = HarmonicForm(0.1 + 0.2j, 0.3)
        self.assertTrue(rho_conjugate(omega).isclose(HarmonicForm(0.3, 0.1 - 0.2j)))
        self.assertTrue(monodromy_of(self.lat, rho_conjugate(omega)).isclose(
            monodromy_of(self.lat, omega).conjugate()))
        self.assertFalse(is_real(self.lat, omega))
        self.assertTrue(is_real(self.lat, HarmonicForm(0.1, 0.1)))
        # half periods have monodromy -1
        self.assertTrue(is_real(self.lat, HarmonicForm(0.25j, 0.25j)))


class TestGridCalculus(unittest.TestCase):

    def setUp(self):
        self.lat = Lattice.square()
        self.z = grid_points(self.lat, 32, 32)

    def test_spectral_derivative(self):
        x, y = self.z.real, self.z.imag
        fx, fy = grid_partials(numpy.sin(x) * numpy.cos(2 * y), self.lat, "spectral")
        numpy.testing.assert_allclose(fx, numpy.cos(x) * numpy.cos(2 * y), atol=1e-10)
        numpy.testing.assert_allclose(fy, -2 * numpy.sin(x) * numpy.sin(2 * y), atol=1e-10)

    def test_central_derivative(self):
        h = 2 * math.pi / 32
        fx, fy = grid_partials(numpy.exp(1j * self.z.real), self.lat, "central")
        numpy.testing.assert_allclose(fx, 1j * math.sin(h) / h * numpy.exp(1j * self.z.real), atol=1e-10)
        numpy.testing.assert_allclose(fy, 0.0, atol=1e-10)

    def test_unknown_scheme(self):
        with self.assertRaises(ValueError):
            grid_partials(self.z, self.lat, "forward")

    def test_fourier(self):
        coeffs = numpy.zeros((5, 5), dtype=complex)
        coeffs[1 + 2, -2 + 2] = 0.5 - 0.25j
        values = synthesize(coeffs, 16, 16)
        chi = dual_point(self.lat, 1, -2).eta.character(grid_points(self.lat, 16, 16))
        numpy.testing.assert_allclose(values, (0.5 - 0.25j) * chi, atol=1e-12)
        numpy.testing.assert_allclose(fourier_coefficients(values, 2), coeffs, atol=1e-12)
        with self.assertRaises(ValueError):
            fourier_coefficients(values, 8)


if __name__ == '__main__':
    unittest.main()
