"""
Run the acceptance suite and write a machine readable report.
"""

import logging
import os

from ..suite import CRITERIA, SuiteContext, run_suite
from ..utils.errors import InvalidConfig
from ..utils.export import write_json

LOGGER = logging.getLogger("quatspec")


def run(rc, out_dir):
    """
    Run the configured criteria.

    :returns: 0 when every criterion passes, 1 otherwise
    """
    names = rc['criteria']
    for name in names or []:
        if name not in CRITERIA:
            raise InvalidConfig("Unknown criterion '{}'".format(name))
    ctx = SuiteContext(truncation=rc.truncation, grid=tuple(rc['grid']), cutoff=rc.cutoff,
                       draws=rc['draws'], seed=rc.seed, threads=rc.threads,
                       tolerances=rc.tolerances())
    report, artifacts = run_suite(ctx, names)
    for name, data in sorted(artifacts.items()):
        with open(os.path.join(out_dir, name), 'wb') as fobj:
            fobj.write(data)
    write_json(os.path.join(out_dir, rc['output']['report_json']), report)
    for entry in report["criteria"]:
        print("{:<22} {} value={} bound={}".format(
            entry["name"], "pass" if entry["passed"] else "FAIL", entry["value"], entry["bound"]))
    return 0 if report["passed"] else 1
