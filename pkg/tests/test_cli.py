"""
Tests for the quatspec command line
"""

import os
import sys
import json
import shutil
import tempfile
import unittest
import subprocess

import numpy

# Allow unittests to be run from within the project base.
if os.path.exists("src"):
    sys.path.append("src")
if os.path.exists("../src"):
    sys.path.append("../src")

from quatspec.immersion import ImmersionGrid
from quatspec.torus import Lattice


class TestCli(unittest.TestCase):
    """
    Run the command line tool in a subprocess and check exit codes and
    artifacts.
    """

    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp()
        self.out_dir = os.path.join(self.tmp_dir, "out")
        os.environ['PYTHONPATH'] = os.pathsep.join(sys.path)

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def _write_config(self, doc):
        path = os.path.join(self.tmp_dir, "run.json")
        with open(path, 'w') as fobj:
            if isinstance(doc, str):
                fobj.write(doc)
            else:
                json.dump(doc, fobj)
        return path

    def _run_command(self, command, doc, extra=""):
        path = self._write_config(doc)
        cmd = "{} -m quatspec.tools.cli {} --config {} --out {} {}".format(
            sys.executable, command, path, self.out_dir, extra)
        proc = subprocess.Popen(cmd, shell=True, stdout=subprocess.PIPE, stderr=subprocess.PIPE)
        stdout, stderr = proc.communicate()
        if proc.returncode not in (0, 1):
            print(stdout.decode("utf-8"))
            print(stderr.decode("utf-8"))
        return proc.returncode, stdout.decode("utf-8"), stderr.decode("utf-8")

    def test_malformed_json(self):
        rc, _, stderr = self._run_command("spectrum", "{not json")
        self.assertEqual(rc, 2)
        self.assertIn("Malformed JSON", stderr)

    def test_unknown_key(self):
        rc, _, _ = self._run_command("spectrum", {"samples": 3, "colour": "red"})
        self.assertEqual(rc, 2)

    def test_unknown_criterion(self):
        rc, _, _ = self._run_command("verify", {"criteria": ["pluecker", "nonsense"]})
        self.assertEqual(rc, 2)

    def test_bad_threads(self):
        rc, _, _ = self._run_command("verify", {"criteria": ["pluecker"]}, "--threads 0")
        self.assertEqual(rc, 2)

    def test_export_mesh(self):
        rc, _, _ = self._run_command("export-mesh", {"source": {"kind": "clifford"}, "grid": [16, 16],
                                                     "output": {"mesh_prefix": "torus"}})
        self.assertEqual(rc, 0)
        with open(os.path.join(self.out_dir, "torus.obj"), 'r') as fobj:
            lines = fobj.read().splitlines()
        self.assertEqual(lines[0], "# 16x16 grid")
        self.assertEqual(sum(1 for line in lines if line.startswith("v ")), 256)
        self.assertEqual(sum(1 for line in lines if line.startswith("f ")), 512)

    def test_export_not_immersion(self):
        rc, _, _ = self._run_command("export-mesh", {"source": {"kind": "vacuum"}})
        self.assertEqual(rc, 2)

    def test_verify(self):
        rc, stdout, _ = self._run_command("verify", {"criteria": ["pluecker"]})
        self.assertEqual(rc, 0)
        self.assertIn("pluecker", stdout)
        with open(os.path.join(self.out_dir, "verify.json"), 'r') as fobj:
            report = json.load(fobj)
        self.assertTrue(report["passed"])
        self.assertEqual([entry["name"] for entry in report["criteria"]], ["pluecker"])

    def test_vacuum_spectrum(self):
        doc = {
            "source": {"kind": "vacuum"},
            "truncation": 2,
            "window": {"re": [0.1, 0.3], "im": [0.15, 0.15]},
            "samples": 3,
        }
        rc, _, _ = self._run_command("spectrum", doc)
        self.assertEqual(rc, 0)
        with open(os.path.join(self.out_dir, "spectrum.csv"), 'r') as fobj:
            header = fobj.readline().strip()
        self.assertEqual(header, "re_a,im_a,re_b,im_b,sigma_min,branch_id,flag")
        for name in ("branches.json", "collisions.json"):
            self.assertTrue(os.path.exists(os.path.join(self.out_dir, name)))

    def test_darboux_flat_grid(self):
        grid_path = os.path.join(self.tmp_dir, "flat.json")
        ImmersionGrid(Lattice.square(), numpy.ones((16, 16, 4))).dump(grid_path)
        rc, _, stderr = self._run_command("darboux", {"source": {"kind": "grid_json", "path": grid_path},
                                                      "truncation": 3})
        self.assertEqual(rc, 4)
        self.assertIn("Not an immersion", stderr)


if __name__ == '__main__':
    unittest.main()
