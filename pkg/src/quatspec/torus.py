"""
Lattices, harmonic 1-forms, the dual lattice and monodromy
representations of a torus ``T^2 = C / Gamma``, plus the grid calculus
used on sampled torus functions.

A harmonic form ``a dz + b dzbar`` is stored as the pair ``(a, b)``.  Its
period over a lattice vector ``gamma`` is ``a gamma + b conj(gamma)``, and
the character of a dual lattice point ``eta`` is
``exp(eta' z + eta'' zbar)``.

Torus grids sample ``z = (i/nx) gamma1 + (j/ny) gamma2``.  In these grid
coordinates the character of ``m eta1 + n eta2`` is
``exp(2 pi i (m i/nx + n j/ny))``, so Fourier coefficients on the grid are
plain two dimensional DFT coefficients.
"""

import functools
import logging
import math
from dataclasses import dataclass

import numpy

from .utils.errors import DegenerateLattice

LOGGER = logging.getLogger("quatspec")

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class Lattice(object):
    """
    The lattice Gamma spanned by two complex generators with
    ``Im(gamma2 / gamma1) > 0``.
    """

    gamma1: complex
    gamma2: complex

    def __post_init__(self):
        object.__setattr__(self, 'gamma1', complex(self.gamma1))
        object.__setattr__(self, 'gamma2', complex(self.gamma2))
        if self.gamma1 == 0 or self.gamma2 == 0:
            raise DegenerateLattice("Lattice generators must be nonzero")
        ratio = (self.gamma2 / self.gamma1).imag
        if abs(ratio) < 1e-12:
            raise DegenerateLattice("Lattice generators {} and {} are collinear".format(
                self.gamma1, self.gamma2))
        if ratio < 0:
            raise DegenerateLattice("Lattice basis {} , {} is not positively oriented".format(
                self.gamma1, self.gamma2))

    @classmethod
    def square(cls, scale=2 * math.pi):
        return cls(complex(scale, 0.0), complex(0.0, scale))

    @property
    def area(self):
        """
        Area of the fundamental domain.
        """
        return (self.gamma1.conjugate() * self.gamma2).imag

    @property
    def generators(self):
        return (self.gamma1, self.gamma2)

    def jacobian(self):
        """
        Rows give the grid-axis derivatives in terms of (d/dx, d/dy).
        """
        return numpy.array([[self.gamma1.real, self.gamma1.imag],
                            [self.gamma2.real, self.gamma2.imag]])

    def to_dict(self):
        return {"gamma1": [self.gamma1.real, self.gamma1.imag],
                "gamma2": [self.gamma2.real, self.gamma2.imag]}

    @classmethod
    def from_dict(cls, doc):
        return cls(complex(*doc["gamma1"]), complex(*doc["gamma2"]))


@dataclass(frozen=True)
class HarmonicForm(object):
    """
    The harmonic form ``a dz + b dzbar``.
    """

    a: complex = 0j
    b: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, 'a', complex(self.a))
        object.__setattr__(self, 'b', complex(self.b))

    def __add__(self, other):
        return HarmonicForm(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return HarmonicForm(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return HarmonicForm(-self.a, -self.b)

    def __mul__(self, scalar):
        return HarmonicForm(scalar * self.a, scalar * self.b)

    __rmul__ = __mul__

    def period(self, gamma):
        """
        Integral of the form along the lattice vector gamma.
        """
        gamma = complex(gamma)
        return self.a * gamma + self.b * gamma.conjugate()

    def character(self, z):
        """
        ``exp(a z + b zbar)``, elementwise for arrays.
        """
        z = numpy.asarray(z, dtype=complex)
        return numpy.exp(self.a * z + self.b * numpy.conj(z))

    def as_vector(self):
        return numpy.array([self.a.real, self.a.imag, self.b.real, self.b.imag])

    def norm2(self):
        return abs(self.a) ** 2 + abs(self.b) ** 2

    def isclose(self, other, tol=1e-12):
        return abs(self.a - other.a) <= tol and abs(self.b - other.b) <= tol

    def to_list(self):
        return [self.a.real, self.a.imag, self.b.real, self.b.imag]


@dataclass(frozen=True)
class MonodromyRep(object):
    """
    A representation of the lattice in C*, given by its values on the
    generators.
    """

    h1: complex
    h2: complex

    def __post_init__(self):
        object.__setattr__(self, 'h1', complex(self.h1))
        object.__setattr__(self, 'h2', complex(self.h2))
        if self.h1 == 0 or self.h2 == 0:
            raise ValueError("Monodromy values must be nonzero")

    def __mul__(self, other):
        return MonodromyRep(self.h1 * other.h1, self.h2 * other.h2)

    def conjugate(self):
        return MonodromyRep(self.h1.conjugate(), self.h2.conjugate())

    def isclose(self, other, tol=1e-10):
        return abs(self.h1 - other.h1) <= tol and abs(self.h2 - other.h2) <= tol


@dataclass(frozen=True)
class DualLatticePoint(object):
    """
    An integer harmonic form ``m eta1 + n eta2`` with its index pair.
    """

    eta: HarmonicForm
    m: int
    n: int


@functools.lru_cache(maxsize=64)
def dual_basis(lat):
    """
    Basis of the integer harmonic forms dual to the lattice generators.

    ``eta_k`` has period ``2 pi i`` on ``gamma_k`` and 0 on the other
    generator.

    :param Lattice lat: The lattice
    :returns: (DualLatticePoint, DualLatticePoint)
    """
    system = numpy.array([[lat.gamma1, lat.gamma1.conjugate()],
                          [lat.gamma2, lat.gamma2.conjugate()]])
    try:
        sol = numpy.linalg.solve(system, TWO_PI_I * numpy.eye(2))
    except numpy.linalg.LinAlgError:
        raise DegenerateLattice("Period system of {} is singular".format(lat))
    eta1 = HarmonicForm(sol[0, 0], sol[1, 0])
    eta2 = HarmonicForm(sol[0, 1], sol[1, 1])
    return DualLatticePoint(eta1, 1, 0), DualLatticePoint(eta2, 0, 1)


def dual_point(lat, m, n):
    """
    The dual lattice point ``m eta1 + n eta2``.
    """
    eta1, eta2 = dual_basis(lat)
    return DualLatticePoint(m * eta1.eta + n * eta2.eta, int(m), int(n))


def dual_window(lat, N):
    """
    All dual lattice points with ``|m|, |n| <= N`` in row-major order.
    """
    return [dual_point(lat, m, n) for m in range(-N, N + 1) for n in range(-N, N + 1)]


def monodromy_of(lat, omega):
    """
    The representation ``exp`` of a harmonic form.

    :param Lattice lat: The lattice
    :param HarmonicForm omega: The form
    :returns: MonodromyRep
    """
    return MonodromyRep(numpy.exp(omega.period(lat.gamma1)),
                        numpy.exp(omega.period(lat.gamma2)))


def reduce_mod_dual(lat, omega):
    """
    Representative of ``omega`` modulo the dual lattice with the smallest
    ``|a|^2 + |b|^2``.  Ties go to the lexicographically largest
    ``(Re a, Im a, Re b, Im b)``.

    :param Lattice lat: The lattice
    :param HarmonicForm omega: The form
    :returns: HarmonicForm
    """
    eta1, eta2 = dual_basis(lat)
    basis = numpy.column_stack([eta1.eta.as_vector(), eta2.eta.as_vector()])
    coeffs = numpy.linalg.lstsq(basis, omega.as_vector(), rcond=None)[0]
    m0, n0 = int(round(coeffs[0])), int(round(coeffs[1]))

    best, best_cost = None, None
    for m in range(m0 - 2, m0 + 3):
        for n in range(n0 - 2, n0 + 3):
            cand = omega - (m * eta1.eta + n * eta2.eta)
            cost = cand.norm2()
            if best is None or cost < best_cost - 1e-12 * (1.0 + best_cost):
                best, best_cost = cand, cost
            elif abs(cost - best_cost) <= 1e-12 * (1.0 + best_cost):
                if tuple(cand.as_vector()) > tuple(best.as_vector()):
                    best = cand
    return best


def rho_conjugate(omega):
    """
    The real structure ``(a, b) -> (conj b, conj a)``; the monodromy of the
    result is the complex conjugate monodromy.
    """
    return HarmonicForm(omega.b.conjugate(), omega.a.conjugate())


def is_real(lat, omega, tol=1e-10):
    """
    True when the monodromy of omega is real, i.e. ``rho(omega) - omega``
    is an integer form.
    """
    diff = reduce_mod_dual(lat, rho_conjugate(omega) - omega)
    return abs(diff.a) <= tol and abs(diff.b) <= tol


# -- Grid calculus -------------------------------------------------------------

def grid_points(lat, nx, ny):
    """
    Complex coordinates of the torus grid, shape (nx, ny).
    """
    s1 = numpy.arange(nx)[:, None] / nx
    s2 = numpy.arange(ny)[None, :] / ny
    return s1 * lat.gamma1 + s2 * lat.gamma2


def _axis_symbol(n, scheme):
    k = numpy.fft.fftfreq(n) * n
    if scheme == "central":
        return 1j * n * numpy.sin(2 * math.pi * k / n)
    if scheme == "spectral":
        sym = TWO_PI_I * k
        if n % 2 == 0:
            sym[n // 2] = 0.0
        return sym
    raise ValueError("Unknown derivative scheme '{}'".format(scheme))


@functools.lru_cache(maxsize=32)
def derivative_symbols(lat, nx, ny, scheme="central"):
    """
    Fourier symbols of d/dx and d/dy on the torus grid.

    ``central`` is the exact symbol of the periodic second order central
    difference along each grid axis, ``spectral`` differentiates the
    trigonometric interpolant.

    :returns: (sym_x, sym_y), complex arrays of shape (nx, ny)
    """
    d1 = _axis_symbol(nx, scheme)[:, None]
    d2 = _axis_symbol(ny, scheme)[None, :]
    jinv = numpy.linalg.inv(lat.jacobian())
    sym_x = jinv[0, 0] * d1 + jinv[0, 1] * d2
    sym_y = jinv[1, 0] * d1 + jinv[1, 1] * d2
    return sym_x, sym_y


def apply_symbol(values, sym):
    """
    Multiply the grid DFT of values by a symbol.  Trailing axes beyond the
    two grid axes are carried along.
    """
    values = numpy.asarray(values)
    sym = sym.reshape(sym.shape + (1,) * (values.ndim - 2))
    out = numpy.fft.ifft2(sym * numpy.fft.fft2(values, axes=(0, 1)), axes=(0, 1))
    if numpy.isrealobj(values):
        return out.real
    return out


def grid_partials(values, lat, scheme="central"):
    """
    Partial derivatives (d/dx, d/dy) of periodic grid functions.

    :param values: array (nx, ny, ...) of real or complex values
    :param Lattice lat: The lattice of the grid
    :param str scheme: ``central`` or ``spectral``
    :returns: (fx, fy) with the shape and kind of values
    """
    values = numpy.asarray(values)
    sym_x, sym_y = derivative_symbols(lat, values.shape[0], values.shape[1], scheme)
    return apply_symbol(values, sym_x), apply_symbol(values, sym_y)


def dbar_symbol(lat, nx, ny, scheme="central"):
    """
    Symbol of ``d/dzbar = (d/dx + i d/dy) / 2``.
    """
    sym_x, sym_y = derivative_symbols(lat, nx, ny, scheme)
    return 0.5 * (sym_x + 1j * sym_y)


def dz_symbol(lat, nx, ny, scheme="central"):
    """
    Symbol of ``d/dz = (d/dx - i d/dy) / 2``.
    """
    sym_x, sym_y = derivative_symbols(lat, nx, ny, scheme)
    return 0.5 * (sym_x - 1j * sym_y)


def fourier_coefficients(values, N):
    """
    Character coefficients of a complex grid function for ``|m|, |n| <= N``.

    :returns: complex array (2N+1, 2N+1) indexed by (m+N, n+N)
    """
    values = numpy.asarray(values, dtype=complex)
    nx, ny = values.shape
    if 2 * N + 1 > min(nx, ny):
        raise ValueError("Truncation {} does not fit a {}x{} grid".format(N, nx, ny))
    dft = numpy.fft.fft2(values) / (nx * ny)
    idx = numpy.arange(-N, N + 1)
    return dft[numpy.ix_(idx % nx, idx % ny)]


def synthesize(coeffs, nx, ny):
    """
    Grid values of ``sum c_mn chi_mn`` for coefficients indexed by (m+N, n+N).
    """
    coeffs = numpy.asarray(coeffs, dtype=complex)
    N = (coeffs.shape[0] - 1) // 2
    if 2 * N + 1 > min(nx, ny):
        raise ValueError("Truncation {} does not fit a {}x{} grid".format(N, nx, ny))
    dft = numpy.zeros((nx, ny), dtype=complex)
    idx = numpy.arange(-N, N + 1)
    dft[numpy.ix_(idx % nx, idx % ny)] = coeffs
    return numpy.fft.ifft2(dft) * (nx * ny)
