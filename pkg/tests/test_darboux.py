"""
Tests for holomorphic sections, prolongation and Darboux transforms
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

from quatspec import darboux, immersion
from quatspec.holo import from_model
from quatspec.quaternion import ONE, HPoint
from quatspec.spectrum import SpectrumSample, fiber_roots, kernel_at
from quatspec.torus import HarmonicForm, Lattice
from quatspec.utils.errors import RepresentationsDisagree, TransformsNotDistinct


def constant_section(g, eh, w):
    """
    The holomorphic section of V/L given by a constant vector of H^2.
    """
    vectors = numpy.zeros(g.values.shape[:2] + (2, 4))
    vectors[...] = w
    sigma = g.quotient_coordinate(vectors)
    u, v = immersion.frame_coordinates(eh, sigma)
    return darboux.MonodromySection(g.lat, u, v, HarmonicForm(), sigma, eh)


class TestConstantTransforms(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.g = immersion.clifford(64, 64)
        cls.eh = immersion.extract_holo(cls.g, 8, "spectral")

    def test_constant_sections(self):
        for w, point in (([[1.0, 0, 0, 0], [0, 0, 0, 0]], HPoint(ONE, 0.0)),
                         ([[0, 0, 0, 0], [1.0, 0, 0, 0]], HPoint(0.0, ONE))):
            ms = constant_section(self.g, self.eh, w)
            ps = darboux.prolong(self.g, ms)
            res = darboux.darboux_transform(self.g, ps)
            self.assertEqual(res.classification, "constant")
            self.assertEqual(res.constant_point, point)
            self.assertFalse(res.is_regular())
            self.assertGreater(res.min_distance, 0.1)
            self.assertLess(ps.residual, 1e-8)
            with self.assertRaises(ValueError):
                darboux.verify_envelope(self.g, res)
            with self.assertRaises(ValueError):
                darboux.isospectral_check(self.g, res, [0.3])

    def test_monodromy(self):
        ms = constant_section(self.g, self.eh, [[1.0, 0, 0, 0], [0, 0, 0, 0]])
        self.assertTrue(ms.monodromy().h1 == 1 and ms.monodromy().h2 == 1)

    def test_bad_kernel(self):
        rng = numpy.random.default_rng(3)
        M = self.eh.hd.M
        kernel = rng.normal(size=2 * M) + 1j * rng.normal(size=2 * M)
        sample = SpectrumSample(HarmonicForm(0.7, 0.1), 1.0, kernel)
        with self.assertRaises(RepresentationsDisagree):
            darboux.section_from_kernel(self.eh, sample)
        member = darboux.family_member(self.g, self.eh, sample)
        self.assertIsNone(member.classification)
        self.assertIn("representations disagree", member.error)
        with self.assertRaises(ValueError):
            darboux.section_from_kernel(self.eh, SpectrumSample(HarmonicForm(), 0.0))


@pytest.mark.slow
class TestRegularTransform(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.g = immersion.clifford(64, 64)
        cls.eh = immersion.extract_holo(cls.g, 8, "spectral")
        a = complex(0.7, 0.2)
        b = min(fiber_roots(cls.eh.hd, a, 2.0).roots, key=abs)
        cls.sample = kernel_at(cls.eh.hd, HarmonicForm(a, b))
        cls.section = darboux.section_from_kernel(cls.eh, cls.sample)
        cls.prolonged = darboux.prolong(cls.g, cls.section)
        cls.result = darboux.darboux_transform(cls.g, cls.prolonged)

    def test_regular(self):
        self.assertEqual(self.result.classification, "regular")
        self.assertIsNotNone(self.result.fsharp)
        self.assertGreater(self.result.min_distance, 0.0)
        self.assertLess(self.result.residuals["prolongation"], 1e-4)
        self.assertLess(self.result.residuals["conformality"], 1e-3)

    def test_envelope(self):
        report = darboux.verify_envelope(self.g, self.result)
        self.assertLess(report["square"], 1e-8)
        self.assertLess(report["preserves_l"], 1e-8)
        self.assertLess(report["preserves_lsharp"], 1e-8)
        self.assertIn("right_sharp", report)
        self.assertLess(report["touch_f"], 1e-3)

    def test_family(self):
        family = darboux.family_map(self.g, self.eh, [self.sample])
        self.assertEqual(len(family.members), 1)
        member = family.members[0]
        self.assertEqual(member.classification, "regular")
        self.assertIsNone(member.error)
        self.assertEqual(sorted(member.to_dict()), sorted([
            "omega", "classification", "willmore", "distance_to_f", "min_distance_to_f",
            "residuals", "error"]))
        self.assertAlmostEqual(family.willmore_f / (2 * math.pi ** 2), 1.0, places=6)

    def test_same_transform_twice(self):
        with self.assertRaises(TransformsNotDistinct):
            darboux.bianchi_compose(self.g, self.prolonged, self.prolonged)

    def _transform_at(self, a):
        b = min(fiber_roots(self.eh.hd, a, 2.0).roots, key=abs)
        section = darboux.section_from_kernel(self.eh, kernel_at(self.eh.hd, HarmonicForm(a, b)))
        return darboux.prolong(self.g, section)

    def test_bianchi_compose(self):
        second = self._transform_at(complex(-0.45, 0.6))
        composed = darboux.bianchi_compose(self.g, self.prolonged, second)
        self.assertEqual(composed.classification, "regular")
        self.assertGreater(composed.min_distance, 0.0)
        res = composed.residuals
        self.assertLess(max(res["darboux_sharp"], res["darboux_flat"]), 1e-2)
        self.assertLess(res["monodromy"], 1e-8)

    def test_willmore_preserved(self):
        w = immersion.classical_willmore(self.g, "spectral")
        wsharp = immersion.classical_willmore(self.result.fsharp, "spectral")
        self.assertLess(abs(wsharp - w) / w, 0.02)
        self.assertAlmostEqual(darboux.predicted_willmore(w, 0, 0), w)

    def test_isospectral(self):
        fiber_as = [complex(0.3, 0.2), complex(-0.5, 0.4), complex(0.1, -0.7)]
        report = darboux.isospectral_check(self.g, self.result, fiber_as, samples=[self.sample.omega],
                                           cutoff=1.0)
        self.assertLess(report["distance"], 1e-3)
        self.assertTrue(0 < len(report["per_fiber"]) <= 3)
        self.assertEqual(len(report["membership"]), 1)


class TestFamilyReport(unittest.TestCase):

    def test_decreasing_fraction(self):
        members = [darboux.FamilyMember(HarmonicForm(), distance=d) for d in (3.0, None, 2.0, 1.0, 1.5)]
        report = darboux.FamilyReport(members, 1.0)
        self.assertAlmostEqual(report.decreasing_fraction(), 2.0 / 3.0)
        self.assertEqual(darboux.FamilyReport(members[:1], 1.0).decreasing_fraction(), 0.0)
        self.assertEqual(report.to_dict()["members"][1]["distance_to_f"], None)

    def test_predicted_willmore(self):
        self.assertAlmostEqual(darboux.predicted_willmore(10.0, 2), 10.0 + 4 * math.pi)
        self.assertAlmostEqual(darboux.predicted_willmore(10.0, 2, 2), 10.0)


class TestOutwardSamples(unittest.TestCase):

    def test_constant_potential(self):
        hd = from_model(Lattice.square(), 0.3, N=3)
        samples = darboux.outward_samples(hd, 0.75, 1.0, 0.5, 3, cutoff=2.0)
        self.assertEqual([s.omega.a for s in samples], [0.75, 1.25, 1.75])
        for sample in samples:
            self.assertGreaterEqual(sample.kernel_dim, 1)
        with self.assertRaises(ValueError):
            darboux.outward_samples(hd, 0.75, 0.0, 0.5, 3)

    def test_spectral_distance(self):
        hd = from_model(Lattice.square(), 0.3, N=3)
        distance, per_fiber = darboux.spectral_distance(hd, hd, [0.3, 0.2 + 0.4j], cutoff=1.5)
        self.assertEqual(distance, 0.0)
        self.assertEqual(len(per_fiber), 2)


if __name__ == '__main__':
    unittest.main()
