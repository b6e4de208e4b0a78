"""
Tests for grid immersions and the extraction of their holomorphic structure
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

from quatspec import immersion
from quatspec.holo import assemble, singular_values, willmore_energy
from quatspec.quaternion import ONE, HPoint, Quaternion
from quatspec.torus import HarmonicForm, Lattice, grid_points
from quatspec.utils.errors import (BranchPointOnGrid, ChartSingularity,
                                   DegenerateMetric)


class TestImmersionGrid(unittest.TestCase):

    def test_bad_values(self):
        lat = Lattice.square()
        with self.assertRaises(ValueError):
            immersion.ImmersionGrid(lat, numpy.zeros((16, 16, 3)))
        values = numpy.zeros((16, 16, 4))
        values[3, 4, 1] = float("inf")
        with self.assertRaises(ChartSingularity):
            immersion.ImmersionGrid(lat, values)

    def test_infinity_on_image(self):
        g = immersion.clifford(16, 16)
        with self.assertRaises(ChartSingularity):
            immersion.ImmersionGrid(g.lat, g.values, HPoint(g.values[2, 5], ONE))

    def test_quotient_coordinate(self):
        g = immersion.clifford(16, 16)
        numpy.testing.assert_allclose(g.quotient_coordinate(g.lines()), 0.0, atol=1e-12)

    def test_json(self):
        g = immersion.homogeneous_torus(0.6, 16, 20)
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = os.path.join(tmp_dir, "grid.json")
            g.dump(path)
            loaded = immersion.ImmersionGrid.load(path)
        self.assertEqual(loaded.lat, g.lat)
        self.assertEqual((loaded.nx, loaded.ny), (16, 20))
        numpy.testing.assert_array_equal(loaded.values, g.values)
        self.assertEqual(loaded.infinity_point, g.infinity_point)

    def test_homogeneous_arguments(self):
        with self.assertRaises(ValueError):
            immersion.homogeneous_torus(0.0)
        with self.assertRaises(ValueError):
            immersion.homogeneous_torus(math.pi / 2)
        with self.assertRaises(ValueError):
            immersion.homogeneous_torus(0.5, 8, 32)


class TestGeometry(unittest.TestCase):

    def test_clifford_willmore(self):
        g = immersion.clifford(32, 32)
        self.assertAlmostEqual(immersion.classical_willmore(g, "spectral") / (2 * math.pi ** 2), 1.0, places=8)
        central = immersion.classical_willmore(immersion.clifford(128, 128), "central")
        self.assertLess(abs(central - 2 * math.pi ** 2) / (2 * math.pi ** 2), 0.01)

    def test_homogeneous_willmore(self):
        theta = 0.6
        g = immersion.homogeneous_torus(theta, 32, 32)
        expected = 2 * math.pi ** 2 / math.sin(2 * theta)
        self.assertAlmostEqual(immersion.classical_willmore(g, "spectral") / expected, 1.0, places=8)

    def test_rotation_keeps_willmore(self):
        g = immersion.clifford(32, 32)
        rotated = immersion.rotate_chart(g, Quaternion(0.5, 0.5, -0.5, 0.5))
        self.assertAlmostEqual(immersion.classical_willmore(rotated, "spectral"),
                               immersion.classical_willmore(g, "spectral"), places=8)

    def test_tangent_data(self):
        td = immersion.tangent_data(immersion.clifford(32, 32), "spectral")
        self.assertLess(td.conformal_residual, 1e-10)
        self.assertLess(td.right_residual, 1e-10)
        self.assertLess(td.unit_residual, 1e-10)

    def test_degenerate(self):
        lat = Lattice.square()
        flat = immersion.ImmersionGrid(lat, numpy.ones((16, 16, 4)))
        with self.assertRaises(BranchPointOnGrid):
            immersion.tangent_data(flat, "spectral")
        with self.assertRaises(DegenerateMetric):
            immersion.classical_willmore(flat, "spectral")
        with self.assertRaises(ValueError):
            immersion.tangent_data(immersion.clifford(16, 16), "forward")

    def test_embeddedness(self):
        self.assertTrue(immersion.embeddedness_check(immersion.clifford(32, 32)).embedded)
        lat = Lattice.square()
        z = grid_points(lat, 32, 32)
        x, y = z.real, z.imag
        # the second circle is traversed twice
        values = numpy.stack([numpy.cos(x), numpy.sin(x), 0.5 * numpy.cos(2 * y), 0.5 * numpy.sin(2 * y)], axis=-1)
        report = immersion.embeddedness_check(immersion.ImmersionGrid(lat, values))
        self.assertFalse(report.embedded)
        self.assertEqual(abs(report.pair[0][1] - report.pair[1][1]), 16)

    def test_pointwise_distance(self):
        g = immersion.clifford(16, 16)
        self.assertLess(immersion.min_pointwise_distance(g, g), 1e-12)
        with self.assertRaises(ValueError):
            immersion.min_pointwise_distance(g, immersion.clifford(16, 20))

    def test_grid_from_lines(self):
        g = immersion.clifford(16, 16)
        rebuilt, transform = immersion.grid_from_lines(g.lat, g.lines())
        self.assertIsNone(transform)
        numpy.testing.assert_allclose(rebuilt.values, g.values, atol=1e-12)

        shifted = numpy.zeros_like(g.lines())
        shifted[..., 0, 0] = 1.0
        shifted[..., 1, :] = g.values - g.values[0, 0]
        moved, transform = immersion.grid_from_lines(g.lat, shifted)
        self.assertIsNotNone(transform)
        self.assertTrue(numpy.all(numpy.isfinite(moved.values)))


class TestExtraction(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.g = immersion.clifford(64, 64)
        cls.eh = immersion.extract_holo(cls.g, 8, "spectral")

    def test_reconstruction(self):
        self.assertLess(self.eh.reconstruction_residual, 1e-6)
        self.assertLess(self.eh.truncation_loss, 1e-6)
        self.assertEqual(self.eh.scheme, "spectral")

    def test_bundle_willmore(self):
        bundle = willmore_energy(self.eh.hd)
        self.assertLess(abs(bundle - 2 * math.pi ** 2) / (2 * math.pi ** 2), 1e-3)
        self.assertLess(abs(immersion.degree_estimate(self.g, self.eh, "spectral")), 1e-2)
        self.assertEqual(immersion.normal_degree(0, 0), 0)

    def test_trivial_kernel(self):
        svals = singular_values(assemble(self.eh.hd, HarmonicForm()))
        self.assertEqual(int(numpy.sum(svals < 1e-6 * svals[0])), 4)

    def test_frame_coordinates(self):
        y = self.g.quotient_coordinate(numpy.broadcast_to([[1.0, 0, 0, 0], [0, 0, 0, 0]], (64, 64, 2, 4)))
        u, v = immersion.frame_coordinates(self.eh, y)
        numpy.testing.assert_allclose(immersion.from_frame_coordinates(self.eh, u, v), y, atol=1e-10)


if __name__ == '__main__':
    unittest.main()
