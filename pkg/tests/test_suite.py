"""
Tests for the acceptance suite runner
"""

import os
import sys
import math
import unittest
from unittest import mock

import pytest

# Allow unittests to be run from within the project base.
if os.path.exists("src"):
    sys.path.append("src")
if os.path.exists("../src"):
    sys.path.append("../src")

from quatspec import suite
from quatspec.spectrum import BranchSet, Collision
from quatspec.utils import sha256_hex


class TestSuite(unittest.TestCase):

    def setUp(self):
        self.ctx = suite.SuiteContext(truncation=3)

    def test_pluecker(self):
        result = suite.run_criterion("pluecker", self.ctx)
        self.assertTrue(result.passed)
        self.assertEqual(result.detail["orders"], [1, 2])
        self.assertLess(result.value, 1e-12)
        self.assertNotIn("artifacts", result.to_dict())

    def test_determinism(self):
        report, artifacts = suite.run_suite(self.ctx, ["determinism"])
        self.assertTrue(report["passed"])
        self.assertEqual(list(artifacts), ["determinism.csv"])
        self.assertEqual(report["artifacts"]["determinism.csv"], sha256_hex(artifacts["determinism.csv"]))
        self.assertTrue(artifacts["determinism.csv"].startswith(b"re_a,im_a,re_b,im_b"))
        again, _ = suite.run_suite(self.ctx, ["determinism"])
        self.assertEqual(suite.report_digest(report), suite.report_digest(again))

    def test_unknown(self):
        with self.assertRaises(ValueError):
            suite.run_suite(self.ctx, ["pluecker", "nonsense"])

    def test_failures_recorded(self):
        def broken(ctx):
            raise suite.QuatSpecException("no luck")
        suite.CRITERIA["broken"] = broken
        try:
            result = suite.run_criterion("broken", self.ctx)
        finally:
            del suite.CRITERIA["broken"]
        self.assertFalse(result.passed)
        self.assertEqual(result.detail["error"], "no luck")

    def test_order(self):
        self.assertEqual(list(suite.CRITERIA)[:2], ["vacuum_oracle", "homogeneous_oracle"])
        self.assertEqual(list(suite.CRITERIA)[-1], "determinism")

    def _handle_with_gap(self, gap):
        def fake_scan(hd, window, samples, cutoff, tol, threads):
            if hd.is_vacuum():
                return BranchSet([], [], [Collision(0j, 0j, "double_point", 0.0, "vacuum_double_point")])
            return BranchSet([], [], [Collision(0j, 0j, "handle", gap, "vacuum_double_point")])
        with mock.patch.object(suite, "scan", fake_scan):
            return suite.run_criterion("handle_resolution", self.ctx)

    def test_handle_gap_enforced(self):
        self.assertTrue(self._handle_with_gap(0.45).passed)
        collapsed = self._handle_with_gap(0.01)
        self.assertFalse(collapsed.passed)
        self.assertEqual(collapsed.bound, 0.3)
        self.assertEqual(collapsed.detail["N"], 3)


@pytest.mark.slow
class TestAcceptance(unittest.TestCase):
    """
    Every criterion of the acceptance suite at its default settings.
    """

    @classmethod
    def setUpClass(cls):
        cls.ctx = suite.SuiteContext()

    def _passes(self, name):
        result = suite.run_criterion(name, self.ctx)
        self.assertTrue(result.passed, "{}: {}".format(name, result.to_dict()))
        return result

    def test_vacuum_oracle(self):
        self.assertLessEqual(self._passes("vacuum_oracle").value, 1e-10)

    def test_homogeneous_oracle(self):
        self._passes("homogeneous_oracle")

    def test_handle_resolution(self):
        result = self._passes("handle_resolution")
        self.assertAlmostEqual(result.value, 0.3 * math.sqrt(2), places=4)
        self.assertIn("double_point", result.detail["vacuum_kinds"])

    def test_rho_symmetry(self):
        self._passes("rho_symmetry")

    def test_clifford_willmore(self):
        self._passes("clifford_willmore")

    def test_trivial_kernel(self):
        self._passes("trivial_kernel")

    def test_generic_kernel(self):
        self._passes("generic_kernel")

    def test_darboux_convergence(self):
        result = self._passes("darboux_convergence")
        self.assertGreaterEqual(result.detail["right_left_ratio"], 1e3)

    def test_willmore_isospectral(self):
        result = self._passes("willmore_isospectral")
        self.assertLessEqual(result.detail["distance"], 1e-3)

    def test_bianchi(self):
        result = self._passes("bianchi")
        for ratio in result.detail["ratios"].values():
            self.assertTrue(3.0 <= ratio <= 5.0)

    def test_pluecker(self):
        self._passes("pluecker")

    def test_end_limit(self):
        self._passes("end_limit")

    def test_truncation(self):
        self._passes("truncation")

    def test_determinism(self):
        self._passes("determinism")


if __name__ == '__main__':
    unittest.main()
