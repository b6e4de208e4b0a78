"""
Closed form spectra of homogeneous holomorphic structures.

A homogeneous model has a constant potential ``c``, a harmonic shift
``alpha`` and an optional spin shift ``s``, a half integer form.  The
twisted operator preserves the 2-dimensional spaces spanned by one
character in each slot, and on the slot labelled by ``nu`` in ``Gamma* + s``
it is the block::

    [[b - conj(alpha) + nu'',  -conj(c)            ],
     [c,                        a - alpha + nu'     ]]

so the spectrum is the union over ``nu`` of the curves
``(a - alpha + nu')(b - conj(alpha) + nu'') + |c|^2 = 0``.  With ``c = 0`` it
degenerates into the vacuum: horizontal lines ``b = conj(alpha) - nu''``
and vertical sheets ``a = alpha - nu'``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy

from .torus import HarmonicForm, Lattice, dual_point, grid_points, is_real
from .utils import config
from .utils.errors import NoIsolatedZero, NotOnBranch

LOGGER = logging.getLogger("quatspec")


@dataclass(frozen=True)
class HomogeneousModel(object):
    """
    Constant potential c with harmonic shift alpha and optional spin shift.
    """

    lat: Lattice
    c: complex = 0j
    alpha: complex = 0j
    spin_shift: Optional[HarmonicForm] = None

    def __post_init__(self):
        object.__setattr__(self, 'c', complex(self.c))
        object.__setattr__(self, 'alpha', complex(self.alpha))

    def is_vacuum(self):
        return self.c == 0

    def without_spin(self):
        return HomogeneousModel(self.lat, self.c, self.alpha, None)

    @property
    def shift(self):
        return self.spin_shift if self.spin_shift is not None else HarmonicForm()


@dataclass
class OracleFiber:
    """
    Roots of one fiber of a closed form spectrum.
    """
    a: complex
    roots: List[complex] = field(default_factory=list)
    a_sheet: bool = False


@dataclass
class VacuumDoublePoint:
    a: complex
    b: complex
    a_mode: tuple
    b_mode: tuple
    real: bool = False


def shifted_points(model, window=None):
    """
    The slot labels ``nu = eta + s`` for ``|m|, |n| <= window``.

    :returns: list of ((m, n), HarmonicForm)
    """
    window = config.get_int('oracle_window') if window is None else int(window)
    shift = model.shift
    return [((m, n), dual_point(model.lat, m, n).eta + shift)
            for m in range(-window, window + 1) for n in range(-window, window + 1)]


def _sorted_roots(roots):
    return sorted(roots, key=lambda b: (b.real, b.imag))


def vacuum_fiber(model, a, cutoff, window=None, tol=1e-12):
    """
    The b-roots of the vacuum over a.

    :param HomogeneousModel model: A model with ``c = 0``; c is ignored
    :param complex a: The dz-coefficient
    :param float cutoff: Radius of the b-disc to report
    :returns: OracleFiber, with ``a_sheet`` set when a lies on a vertical sheet
    """
    a = complex(a)
    fiber = OracleFiber(a)
    for _, nu in shifted_points(model, window):
        if abs(a - model.alpha + nu.a) <= tol * (1.0 + abs(a)):
            fiber.a_sheet = True
        b = model.alpha.conjugate() - nu.b
        if abs(b) <= cutoff:
            fiber.roots.append(complex(b))
    fiber.roots = _sorted_roots(fiber.roots)
    return fiber


def homogeneous_fiber(model, a, cutoff, window=None):
    """
    The b-roots of the homogeneous model over a.

    Slots with ``a - alpha + nu' = 0`` contribute no finite root when c is
    nonzero.  For ``c = 0`` this is :func:`vacuum_fiber`.

    :returns: OracleFiber
    """
    if model.is_vacuum():
        return vacuum_fiber(model, a, cutoff, window)
    a = complex(a)
    c2 = abs(model.c) ** 2
    fiber = OracleFiber(a)
    for _, nu in shifted_points(model, window):
        den = a - model.alpha + nu.a
        if den == 0:
            continue
        b = model.alpha.conjugate() - nu.b - c2 / den
        if abs(b) <= cutoff:
            fiber.roots.append(complex(b))
    fiber.roots = _sorted_roots(fiber.roots)
    return fiber


def spectrum_equation(model, omega, nu):
    """
    Value of ``(a - alpha + nu')(b - conj(alpha) + nu'') + |c|^2``.
    """
    return ((omega.a - model.alpha + nu.a) * (omega.b - model.alpha.conjugate() + nu.b) +
            abs(model.c) ** 2)


def homogeneous_kernel(model, omega, eta, tol=1e-8):
    """
    Kernel vector ``(u, v)`` of the slot block of eta at a spectrum point.

    For the slot ``nu = eta + s`` the block is ``[[p, -conj(c)], [c, r]]``
    with ``p = b - conj(alpha) + nu''`` and ``r = a - alpha + nu'``; its null
    vector is ``(conj(c), p)``, or a coordinate vector when ``c = 0``.

    :param HomogeneousModel model: The model
    :param HarmonicForm omega: A point of the spectrum
    :param DualLatticePoint eta: The slot
    :returns: complex array of length 2, unit norm, first nonzero entry
        positive real
    :raises NotOnBranch: when omega is not on the branch of eta
    """
    nu = eta.eta + model.shift
    p = omega.b - model.alpha.conjugate() + nu.b
    r = omega.a - model.alpha + nu.a
    c = model.c
    scale = 1.0 + abs(p) * abs(r) + abs(c) ** 2
    value = p * r + abs(c) ** 2
    if abs(value) > tol * scale:
        raise NotOnBranch("{} is not on the branch of ({}, {}): residual {:.3e}".format(
            omega, eta.m, eta.n, abs(value)))
    if c == 0:
        vec = numpy.array([1.0, 0.0], dtype=complex) if abs(p) <= abs(r) else \
            numpy.array([0.0, 1.0], dtype=complex)
    else:
        vec = numpy.array([c.conjugate(), p], dtype=complex)
    vec = vec / numpy.linalg.norm(vec)
    first = vec[0] if abs(vec[0]) > 1e-14 else vec[1]
    return vec * (abs(first) / first)


def vacuum_double_points(model, a_window, cutoff, window=None):
    """
    Points where a vertical sheet of the vacuum meets a horizontal line.

    :param HomogeneousModel model: The model; c is ignored
    :param a_window: Anything with a ``contains(a)`` method (a ScanWindow)
    :param float cutoff: Radius of the b-disc
    :returns: list of VacuumDoublePoint sorted by (a, b); points at real
        representations are flagged
    """
    points = shifted_points(model, window)
    avals = [(mode, model.alpha - nu.a) for mode, nu in points]
    bvals = [(mode, model.alpha.conjugate() - nu.b) for mode, nu in points]
    avals = [(mode, a) for mode, a in avals if a_window.contains(a)]
    bvals = [(mode, b) for mode, b in bvals if abs(b) <= cutoff]
    result = []
    for amode, a in avals:
        for bmode, b in bvals:
            result.append(VacuumDoublePoint(complex(a), complex(b), amode, bmode,
                                            is_real(model.lat, HarmonicForm(a, b))))
    result.sort(key=lambda p: (p.a.real, p.a.imag, p.b.real, p.b.imag))
    return result


def model_from_holo(hd, tol=None):
    """
    Recognize a single-mode potential ``q = c chi_kappa`` as a homogeneous
    model.

    The multiplication by ``chi_kappa`` couples the u-character ``eta`` with
    the v-character ``eta + kappa``.  Labelling that slot by
    ``nu = eta + kappa/2`` turns the structure into the model with spin
    shift ``kappa/2`` and harmonic shift ``alpha - kappa'/2``.

    :param HoloData hd: The structure
    :param float tol: Coefficients below tol relative to the largest are
        dropped; defaults to ``coeff_tol``
    :returns: HomogeneousModel, or None when the potential has more than one
        mode
    """
    tol = config.get_float('coeff_tol') if tol is None else tol
    if hd.is_vacuum():
        return HomogeneousModel(hd.lat, 0j, hd.alpha, None)
    largest = max(abs(value) for value in hd.qcoeffs.values())
    modes = [(key, value) for key, value in hd.qcoeffs.items() if abs(value) > tol * largest]
    if len(modes) != 1:
        return None
    (m, n), c = modes[0]
    if (m, n) == (0, 0):
        return HomogeneousModel(hd.lat, c, hd.alpha, None)
    kappa = dual_point(hd.lat, m, n).eta
    spin = kappa * 0.5
    return HomogeneousModel(hd.lat, c, hd.alpha - spin.a, spin)


def energy_bound_report(model, window=None):
    """
    Compare ``|c|^2`` with the smallest ``|nu'|^2`` over the shifted dual
    lattice.

    A homogeneous structure whose spin shift is not integer needs a
    potential of at least this size.  ``|nu'|`` is used as the norm of a
    harmonic form here.

    :returns: dict with the two sides, whether the inequality holds and the
        implied Willmore bounds
    """
    c2 = abs(model.c) ** 2
    smallest = min(abs(nu.a) ** 2 for _, nu in shifted_points(model, window))
    area = model.lat.area
    return {
        "c2": c2,
        "min_shift2": smallest,
        "holds": c2 >= smallest - 1e-12,
        "willmore": 4.0 * c2 * area,
        "willmore_bound": 4.0 * smallest * area,
    }


def pluecker_bound(n, g, degL, ordH):
    """
    Lower bound for the Willmore energy of a bundle with an n-dimensional
    linear system of holomorphic sections.

    :param int n: Dimension of the linear system
    :param int g: Genus of the surface
    :param int degL: Degree of the bundle
    :param int ordH: Total vanishing order of the linear system
    :returns: ``4 pi (n ((n - 1)(1 - g) - degL) + ordH)``
    """
    if n < 1:
        raise ValueError("Linear systems have dimension at least 1, got {}".format(n))
    if ordH < 0:
        raise ValueError("Vanishing orders are nonnegative, got {}".format(ordH))
    return 4 * math.pi * (n * ((n - 1) * (1 - g) - degL) + ordH)


def section_magnitude(lat, u, v, omega):
    """
    Pointwise ``|psi|`` of ``psi = (e u + e j v) exp(int omega)`` for a unit
    frame e, on the grid of u and v.
    """
    u = numpy.asarray(u, dtype=complex)
    v = numpy.asarray(v, dtype=complex)
    z = grid_points(lat, u.shape[0], u.shape[1])
    growth = numpy.exp((omega.a * z + omega.b * numpy.conj(z)).real)
    return numpy.sqrt(numpy.abs(u) ** 2 + numpy.abs(v) ** 2) * growth


def vanishing_order(section, p, search=3, inner=2.0, outer=5.0, zero_tol=None):
    """
    Estimate the vanishing order of a section at an isolated zero.

    The grid minimum of ``|psi|`` within ``search`` cells of p is taken as
    the zero; the order is the least squares slope of ``log |psi|`` against
    ``log |z - z0|`` on the annulus between ``inner`` and ``outer`` grid
    spacings, rounded.

    :param section: Anything with ``lat``, ``u``, ``v`` and ``omega``
        (a MonodromySection)
    :param tuple p: Grid index (i, j) near the zero
    :returns: int
    :raises NoIsolatedZero: when there is no zero near p, or the section is
        small on the annulus as well
    """
    zero_tol = config.get_float('zero_tol') if zero_tol is None else zero_tol
    mag = section_magnitude(section.lat, section.u, section.v, section.omega)
    nx, ny = mag.shape
    threshold = zero_tol * float(numpy.max(mag))

    best, i0, j0 = None, None, None
    for di in range(-search, search + 1):
        for dj in range(-search, search + 1):
            i, j = (p[0] + di) % nx, (p[1] + dj) % ny
            if best is None or mag[i, j] < best:
                best, i0, j0 = mag[i, j], i, j
    if best > threshold:
        raise NoIsolatedZero("no zero near {}: smallest value {:.3e} above {:.3e}".format(
            tuple(p), best, threshold))

    # periodic offsets from the zero, in the plane
    si = ((numpy.arange(nx) - i0 + nx // 2) % nx - nx // 2)[:, None] / nx
    sj = ((numpy.arange(ny) - j0 + ny // 2) % ny - ny // 2)[None, :] / ny
    dist = numpy.abs(si * section.lat.gamma1 + sj * section.lat.gamma2)
    spacing = max(abs(section.lat.gamma1) / nx, abs(section.lat.gamma2) / ny)
    ring = (dist >= inner * spacing) & (dist <= outer * spacing)
    values = mag[ring]
    if values.size < 3 or numpy.min(values) <= threshold:
        raise NoIsolatedZero("zero at ({}, {}) is not isolated".format(i0, j0))
    slope = numpy.polyfit(numpy.log(dist[ring]), numpy.log(values), 1)[0]
    LOGGER.debug("Vanishing order slope {:.4f} at ({}, {})".format(slope, i0, j0))
    return max(int(round(slope)), 0)
