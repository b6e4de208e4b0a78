"""
Export an immersion source as an OBJ mesh.
"""

import logging
import os

from .sources import immersion_from_config

LOGGER = logging.getLogger("quatspec")


def run(rc, out_dir):
    g = immersion_from_config(rc)
    path = os.path.join(out_dir, "{}.obj".format(rc['output']['mesh_prefix']))
    data = g.write_obj(path, rc['drop_axis'], "{}x{} grid".format(g.nx, g.ny))
    LOGGER.info("Wrote {} bytes to {}".format(len(data), path))
    return 0
