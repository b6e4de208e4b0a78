"""
Trace the spectrum of a holomorphic structure over a window of the a-plane.
"""

import logging
import os

from .. import oracle
from ..spectrum import (ScanWindow, SpectrumTolerances, fiber_roots, matching_distance,
                        rho_closure, scan, vacuum_compare)
from ..utils import complex_pair
from ..utils.errors import InvalidConfig
from ..utils.export import SPECTRUM_COLUMNS, spectrum_rows, write_csv, write_json
from .sources import holo_from_config

LOGGER = logging.getLogger("quatspec")


def oracle_report(hd, branch_set, cutoff, tol):
    """
    Distance between the traced fibers and the closed form fibers, when
    the structure is homogeneous.
    """
    model = oracle.model_from_holo(hd)
    if model is None:
        return None
    avals = sorted({a for a, _, _, _ in branch_set.samples()}, key=lambda a: (a.real, a.imag))
    worst = 0.0
    for a in avals:
        res = fiber_roots(hd, a, cutoff, tol)
        expected = oracle.homogeneous_fiber(model, a, cutoff)
        if res.a_sheet or expected.a_sheet:
            continue
        worst = max(worst, matching_distance(res.roots, expected.roots, cutoff, tol.cutoff_margin))
    return {"max_distance": worst, "fibers": len(avals), "c": complex_pair(model.c),
            "alpha": complex_pair(model.alpha),
            "spin_shift": model.spin_shift.to_list() if model.spin_shift is not None else None}


def run(rc, out_dir):
    """
    Run a spectrum scan and write its artifacts.

    :param RunConfig rc: The validated run configuration
    :param str out_dir: Directory for the artifacts
    :returns: exit code
    """
    hd = holo_from_config(rc)
    tol = SpectrumTolerances.from_table(rc.tolerances())
    window = ScanWindow.from_dict(rc['window'])
    cutoff = rc.cutoff
    branches = scan(hd, window, rc['samples'], cutoff, tol, rc.threads)

    output = rc['output']
    write_csv(os.path.join(out_dir, output['samples_csv']), SPECTRUM_COLUMNS, spectrum_rows(branches, hd))

    doc = branches.to_dict()
    doc["structure"] = hd.to_dict()
    doc["oracle"] = oracle_report(hd, branches, cutoff, tol)
    samples = [(a, b) for a, b, _, _ in branches.samples()]
    doc["rho_closure"] = rho_closure(hd, samples, cutoff, tol) if not hd.is_vacuum() else None
    annuli = [tuple(pair) for pair in rc['compare']]
    if any(len(pair) != 2 or pair[0] > pair[1] for pair in annuli):
        raise InvalidConfig("compare entries are annuli [r_lo, r_hi]")
    doc["vacuum_compare"] = vacuum_compare(hd, annuli, cutoff, tol, threads=rc.threads) if annuli else []
    write_json(os.path.join(out_dir, output['branches_json']), doc)
    write_json(os.path.join(out_dir, output['collisions_json']),
               {"collisions": [col.to_dict() for col in branches.collisions],
                "a_sheets": [complex_pair(a) for a in branches.a_sheets]})
    LOGGER.info("Wrote {} branches and {} collisions to {}".format(
        len(branches.branches), len(branches.collisions), out_dir))
    return 0
