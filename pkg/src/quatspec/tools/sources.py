"""
Build the objects a run configuration names as its source.
"""

import logging

from ..holo import HoloData, from_model
from ..immersion import ImmersionGrid, extract_holo, homogeneous_torus, clifford
from ..torus import Lattice
from ..utils import config
from ..utils.config import as_complex
from ..utils.errors import InvalidConfig

LOGGER = logging.getLogger("quatspec")

IMMERSION_KINDS = ("homogeneous", "clifford", "grid_json")


def lattice_from_config(rc):
    doc = rc.get('lattice', {})
    return Lattice(as_complex(doc.get('gamma1', [6.283185307179586, 0.0])),
                   as_complex(doc.get('gamma2', [0.0, 6.283185307179586])))


def _modes(modes):
    coeffs = {}
    for entry in modes:
        if not isinstance(entry, list) or len(entry) != 4:
            raise InvalidConfig("Fourier modes are written as [m, n, re, im], got {!r}".format(entry))
        m, n, re, im = entry
        if not isinstance(m, int) or not isinstance(n, int):
            raise InvalidConfig("Mode indices must be integers, got {!r}".format(entry))
        coeffs[(m, n)] = complex(float(re), float(im))
    return coeffs


def immersion_from_config(rc):
    """
    The ImmersionGrid of an immersion source.

    :raises InvalidConfig: when the source is not an immersion
    """
    source = rc['source']
    kind = source['kind']
    grid = rc.get('grid') or [config.get_int('grid_resolution')] * 2
    if kind == 'homogeneous':
        return homogeneous_torus(float(source['theta']), grid[0], grid[1])
    if kind == 'clifford':
        return clifford(grid[0], grid[1])
    if kind == 'grid_json':
        try:
            return ImmersionGrid.load(source['path'])
        except (OSError, ValueError, KeyError) as exc:
            raise InvalidConfig("Unable to load grid from {}: {}".format(source['path'], str(exc)))
    raise InvalidConfig("source kind '{}' is not an immersion".format(kind))


def holo_from_config(rc):
    """
    The HoloData of any source; immersion sources are extracted.
    """
    source = rc['source']
    kind = source['kind']
    N = rc.truncation
    if kind in IMMERSION_KINDS:
        return extract_holo(immersion_from_config(rc), N, rc.derivative).hd
    lat = lattice_from_config(rc)
    if kind == 'vacuum':
        return HoloData(lat, as_complex(source['alpha']), {}, N)
    if kind == 'constant_q':
        kappa = tuple(source['spin']) if source['spin'] is not None else (0, 0)
        if len(kappa) != 2:
            raise InvalidConfig("spin is written as [m, n], got {!r}".format(source['spin']))
        return from_model(lat, as_complex(source['c']), as_complex(source['alpha']), kappa, N)
    if kind == 'fourier':
        return HoloData(lat, as_complex(source['alpha']), _modes(source['modes']), N)
    if kind == 'holo_json':
        try:
            hd = HoloData.load(source['path'])
        except (OSError, ValueError, KeyError) as exc:
            raise InvalidConfig("Unable to load structure from {}: {}".format(source['path'], str(exc)))
        return hd.with_truncation(N) if rc.get('truncation') is not None else hd
    raise InvalidConfig("Unknown source kind '{}'".format(kind))
