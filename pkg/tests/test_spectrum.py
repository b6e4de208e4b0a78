"""
Tests for the spectrum engine
"""

import os
import sys
import math
import unittest

import numpy
import pytest

# Allow unittests to be run from within the project base.
if os.path.exists("src"):
    sys.path.append("src")
if os.path.exists("../src"):
    sys.path.append("../src")

from quatspec.holo import HoloData, from_model, mode_index
from quatspec.oracle import HomogeneousModel, homogeneous_fiber, vacuum_fiber
from quatspec.spectrum import (ScanWindow, SpectrumTolerances, classify_collision,
                               fiber_roots, kernel_at, matching_distance,
                               quaternionic_spectrum, rho_closure, scan,
                               truncation_convergence, vacuum_compare,
                               vacuum_double_points)
from quatspec.torus import HarmonicForm, Lattice
from quatspec.utils.errors import NotOnSpectrum


class TestTolerances(unittest.TestCase):

    def test_overrides(self):
        tol = SpectrumTolerances(fiber_tol=1e-5, fiber_method="qz")
        self.assertEqual(tol.fiber_tol, 1e-5)
        self.assertEqual(tol.fiber_method, "qz")
        self.assertEqual(tol.sheet_samples, 12)
        with self.assertRaises(TypeError):
            SpectrumTolerances(fiber_toll=1e-5)
        with self.assertRaises(ValueError):
            SpectrumTolerances(fiber_method="lu")
        tol = SpectrumTolerances.from_table({"handle_tol": 0.01, "cross_tol": 0.5})
        self.assertEqual(tol.handle_tol, 0.01)


class TestFiberRoots(unittest.TestCase):

    def setUp(self):
        self.lat = Lattice.square()

    def test_vacuum(self):
        hd = HoloData(self.lat, N=3)
        res = fiber_roots(hd, 0.3 + 0.1j, 2.0)
        self.assertFalse(res.a_sheet)
        self.assertEqual(res.method, "schur")
        oracle = vacuum_fiber(HomogeneousModel(self.lat), 0.3 + 0.1j, 2.0, window=3)
        self.assertEqual(len(res.roots), len(oracle.roots))
        self.assertLess(matching_distance(res.roots, oracle.roots, 2.0, 0.0), 1e-10)
        self.assertIn(0j, [complex(round(b.real, 10), round(b.imag, 10)) for b in res.roots])

    def test_vacuum_sheet(self):
        hd = HoloData(self.lat, N=2)
        self.assertTrue(fiber_roots(hd, 0.0, 2.0).a_sheet)
        self.assertTrue(fiber_roots(hd, 0.5j, 2.0).a_sheet)

    def test_constant_potential(self):
        hd = from_model(self.lat, 0.3, N=4)
        res = fiber_roots(hd, 0.3, 2.0)
        self.assertLess(min(abs(b + 0.3) for b in res.roots), 1e-10)
        oracle = homogeneous_fiber(HomogeneousModel(self.lat, 0.3), 0.3, 2.0, window=4)
        self.assertLess(matching_distance(res.roots, oracle.roots, 2.0, 0.25), 1e-8)

    def test_qz_agrees(self):
        hd = from_model(self.lat, 0.2 + 0.1j, N=3)
        schur = fiber_roots(hd, 0.4 - 0.3j, 2.0)
        qz = fiber_roots(hd, 0.4 - 0.3j, 2.0, SpectrumTolerances(fiber_method="qz"))
        self.assertEqual(qz.method, "qz")
        self.assertLess(matching_distance(schur.roots, qz.roots, 2.0, 0.25), 1e-8)

    def test_spin_potential(self):
        hd = from_model(self.lat, 0.25, kappa=(1, 0), N=6)
        a = 0.3 + 0.2j
        res = fiber_roots(hd, a, 2.0)
        spin = HarmonicForm(0.25j, 0.25j)
        model = HomogeneousModel(self.lat, 0.25, -spin.a, spin)
        oracle = homogeneous_fiber(model, a, 2.0)
        self.assertLess(matching_distance(res.roots, oracle.roots, 2.0, 0.25), 1e-8)

    def test_bad_cutoff(self):
        with self.assertRaises(ValueError):
            fiber_roots(HoloData(self.lat, N=1), 0.3, 0.0)


class TestKernel(unittest.TestCase):

    def setUp(self):
        self.lat = Lattice.square()

    def test_vacuum_kernel(self):
        hd = HoloData(self.lat, N=2)
        sample = kernel_at(hd, HarmonicForm(0.3, 0.0))
        self.assertEqual(sample.kernel_dim, 1)
        self.assertAlmostEqual(abs(sample.kernel[mode_index(2, 0, 0)]), 1.0)
        with self.assertRaises(NotOnSpectrum):
            kernel_at(hd, HarmonicForm(0.3, 0.1))

    def test_homogeneous_kernel(self):
        hd = from_model(self.lat, 0.3, N=2)
        sample = kernel_at(hd, HarmonicForm(0.3, -0.3))
        k = mode_index(2, 0, 0)
        expected = numpy.zeros(2 * hd.M, dtype=complex)
        expected[k] = 1 / math.sqrt(2)
        expected[hd.M + k] = -1 / math.sqrt(2)
        self.assertAlmostEqual(abs(numpy.vdot(expected, sample.kernel)), 1.0)


class TestCollisions(unittest.TestCase):
    """
    The double point of the vacuum at the trivial representation, and its
    resolution into a handle by a constant potential.
    """

    def setUp(self):
        self.lat = Lattice.square()

    def _keep(self, hd):
        k = mode_index(hd.N, 0, 0)
        idx = numpy.array([k, hd.M + k])
        return idx, idx

    def test_vacuum_double_point(self):
        hd = HoloData(self.lat, N=2)
        points = vacuum_double_points(hd, ScanWindow(-0.25, 0.25, -0.25, 0.25), 0.25)
        self.assertEqual(len(points), 1)
        a, b, v_mode, u_mode = points[0]
        self.assertEqual((a, b, v_mode, u_mode), (0j, 0j, (0, 0), (0, 0)))

        sample = kernel_at(hd, HarmonicForm(0.0, 0.0))
        self.assertEqual(sample.kernel_dim, 2)

        col = classify_collision(hd, 0.0, 0.0, self._keep(hd), 0.05)
        self.assertEqual(col.kind, "double_point")
        self.assertLess(col.gap, 1e-6)

    def test_handle_gap(self):
        for c in (0.1, 0.2, 0.3):
            hd = from_model(self.lat, c, N=2)
            col = classify_collision(hd, 0.0, 0.0, self._keep(hd), 0.05)
            self.assertEqual(col.kind, "handle")
            self.assertAlmostEqual(col.gap, c * math.sqrt(2), places=8)
            self.assertGreaterEqual(col.gap, c)
            self.assertLess(abs(col.a) + abs(col.b), 1e-8)
        # (0, 0) is no longer on the spectrum
        with self.assertRaises(NotOnSpectrum):
            kernel_at(from_model(self.lat, 0.3, N=2), HarmonicForm(0.0, 0.0))


class TestVacuumCompare(unittest.TestCase):

    def setUp(self):
        self.lat = Lattice.square()

    def test_vacuum_is_its_own_limit(self):
        hd = HoloData(self.lat, N=3)
        report = vacuum_compare(hd, [(0.3, 0.6)], cutoff=1.0, n_radial=2, n_angle=8)
        self.assertEqual(len(report), 1)
        self.assertEqual(sorted(report[0]), ["max", "mean", "r_hi", "r_lo", "samples"])
        self.assertGreater(report[0]["samples"], 0)
        self.assertLess(report[0]["max"], 1e-10)

    def test_constant_potential_moves_roots(self):
        hd = from_model(self.lat, 0.2, N=3)
        report = vacuum_compare(hd, [(0.3, 0.6)], cutoff=1.0, n_radial=2, n_angle=8)
        self.assertGreater(report[0]["samples"], 0)
        self.assertGreater(report[0]["max"], 1e-3)


class TestRealStructure(unittest.TestCase):

    def setUp(self):
        self.lat = Lattice.square()

    def test_rho_closure(self):
        hd = from_model(self.lat, 0.3, N=3)
        a = 0.3 + 0.1j
        samples = [(a, b) for b in fiber_roots(hd, a, 1.0).roots]
        self.assertLess(rho_closure(hd, samples, cutoff=2.0), 1e-8)

    def test_quaternionic_spectrum(self):
        omega = HarmonicForm(0.1 + 0.2j, 0.3)
        forms = [omega, omega + HarmonicForm(0.5j, 0.5j), HarmonicForm(0.3, 0.1 - 0.2j)]
        self.assertEqual(len(quaternionic_spectrum(self.lat, forms)), 1)


class TestScan(unittest.TestCase):

    def test_truncation_exact_for_constant(self):
        hd = from_model(Lattice.square(), 0.3, N=3)
        self.assertLess(truncation_convergence(hd, [0.3, 0.2 + 0.2j], 1.5), 1e-8)

    @pytest.mark.slow
    def test_constant_handle(self):
        hd = from_model(Lattice.square(), 0.3, N=4)
        branches = scan(hd, ScanWindow(-0.25, 0.25, -0.25, 0.25), 5)
        self.assertIn("handle", branches.kinds())
        self.assertGreater(len(branches.branches), 0)

    def test_scan_needs_samples(self):
        with self.assertRaises(ValueError):
            scan(HoloData(Lattice.square(), N=1), ScanWindow(), 1)


if __name__ == '__main__':
    unittest.main()
