"""
Tests for holomorphic structures and the truncated operator
"""

import os
import sys
import math
import tempfile
import unittest

import numpy

# Allow unittests to be run from within the project base.
if os.path.exists("src"):
    sys.path.append("src")
if os.path.exists("../src"):
    sys.path.append("../src")

from quatspec.holo import (HoloData, assemble, from_model, log_abs_det,
                           mode_arrays, mode_index, sigma_min, willmore_energy)
from quatspec.torus import HarmonicForm, Lattice
from quatspec.utils.errors import NonZeroDegree, PotentialUnderResolved


class TestHoloData(unittest.TestCase):

    def setUp(self):
        self.lat = Lattice.square()

    def test_errors(self):
        with self.assertRaises(NonZeroDegree):
            HoloData(self.lat, degree=1)
        with self.assertRaises(ValueError):
            HoloData(self.lat, N=0)
        with self.assertRaises(PotentialUnderResolved):
            HoloData(self.lat, qcoeffs={(3, 0): 0.1}, N=2)

    def test_zero_coefficients_dropped(self):
        hd = HoloData(self.lat, qcoeffs={(0, 0): 0.0, (1, 0): 0.2}, N=2)
        self.assertEqual(list(hd.qcoeffs), [(1, 0)])
        self.assertFalse(hd.is_vacuum())
        self.assertTrue(hd.vacuum().is_vacuum())
        self.assertEqual(hd.M, 25)

    def test_json(self):
        hd = HoloData(self.lat, 0.1 - 0.2j, {(1, -1): 0.3 + 0.1j, (0, 0): -0.05}, N=3)
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = os.path.join(tmp_dir, "holo.json")
            hd.dump(path)
            loaded = HoloData.load(path)
        self.assertEqual(loaded.lat, hd.lat)
        self.assertEqual(loaded.alpha, hd.alpha)
        self.assertEqual(loaded.qcoeffs, hd.qcoeffs)
        self.assertEqual(loaded.N, 3)

    def test_willmore(self):
        hd = from_model(self.lat, 0.3, N=2)
        self.assertAlmostEqual(willmore_energy(hd), 4 * 0.09 * 4 * math.pi ** 2)
        self.assertAlmostEqual(hd.scaled(2.0).potential_l2(), 4 * hd.potential_l2())
        self.assertEqual(willmore_energy(hd.vacuum()), 0.0)


class TestOperator(unittest.TestCase):

    def setUp(self):
        self.lat = Lattice.square()

    def test_vacuum_is_diagonal(self):
        hd = HoloData(self.lat, N=1)
        omega = HarmonicForm(0.1, 0.2)
        op = assemble(hd, omega)
        self.assertEqual(op.size, 18)
        _, _, ep, epp = mode_arrays(hd)
        numpy.testing.assert_allclose(op.matrix, numpy.diag(numpy.concatenate([epp + 0.2, ep + 0.1])))
        expected = numpy.sum(numpy.log(numpy.abs(epp + 0.2))) + numpy.sum(numpy.log(numpy.abs(ep + 0.1)))
        self.assertAlmostEqual(log_abs_det(op), expected)

    def test_constant_potential_coupling(self):
        c = 0.3 + 0.1j
        hd = from_model(self.lat, c, N=1)
        op = assemble(hd, HarmonicForm())
        k = op.mode_index(1, -1)
        self.assertEqual(op.matrix[op.M + k, k], c)
        self.assertEqual(op.matrix[k, op.M + k], -c.conjugate())
        with self.assertRaises(IndexError):
            mode_index(1, 2, 0)

    def test_sigma_min_on_spectrum(self):
        hd = HoloData(self.lat, N=2)
        self.assertLess(sigma_min(assemble(hd, HarmonicForm(0.1, 0.0))), 1e-12)
        self.assertGreater(sigma_min(assemble(hd, HarmonicForm(0.1, 0.1))), 1e-3)


if __name__ == '__main__':
    unittest.main()
