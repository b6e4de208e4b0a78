"""
Spectral curves of conformal tori in the 4-sphere and their Darboux
transforms.
"""

from .holo import HoloData
from .immersion import ImmersionGrid, extract_holo
from .quaternion import HPoint, Quaternion
from .spectrum import fiber_roots, kernel_at, scan
from .torus import HarmonicForm, Lattice
from .utils.config import set_config

__version__ = "0.3.0"
