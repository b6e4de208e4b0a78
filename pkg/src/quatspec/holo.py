"""
Trivialized quaternionic holomorphic structures of degree zero and their
truncated Floquet operators.

In a trivialization a holomorphic structure of degree zero is given by a
constant ``alpha`` and a potential ``q``.  Acting on pairs ``(u, v)`` of
complex functions, the operator twisted by a harmonic form
``omega = (a, b)`` reads::

    u-row:  (dbar + b - conj(alpha)) u - conj(q) v
    v-row:  q u + (d + a - alpha) v

On the characters of the dual lattice ``dbar`` and ``d`` act by ``eta''``
and ``eta'``, so truncating to ``|m|, |n| <= N`` gives a dense complex
matrix of size ``2M x 2M`` with ``M = (2N+1)^2``, u-block first, modes in
row-major order.
"""

import json
import logging

import numpy
import scipy.linalg

from .torus import Lattice, dual_window
from .utils.errors import NonZeroDegree, PotentialUnderResolved

LOGGER = logging.getLogger("quatspec")


class HoloData(object):
    """
    Trivialized data of a holomorphic structure ``dbar + Q`` of degree zero.
    """

    def __init__(self, lat, alpha=0j, qcoeffs=None, N=8, degree=0):
        """
        :param Lattice lat: The lattice of the torus
        :param complex alpha: The harmonic shift
        :param dict qcoeffs: Character coefficients of the potential, keyed by (m, n)
        :param int N: Truncation radius
        :param int degree: Degree of the bundle; only 0 has a trivialization
        """
        if degree != 0:
            raise NonZeroDegree("Bundles of degree {} have no trivialization".format(degree))
        if int(N) < 1:
            raise ValueError("Truncation radius must be at least 1, got {}".format(N))
        self.lat = lat
        self.alpha = complex(alpha)
        self.N = int(N)
        self.qcoeffs = {}
        for (m, n), value in (qcoeffs or {}).items():
            value = complex(value)
            if value == 0:
                continue
            if abs(m) > self.N or abs(n) > self.N:
                raise PotentialUnderResolved(
                    "potential under-resolved: mode ({}, {}) outside the window N={}".format(m, n, self.N))
            self.qcoeffs[(int(m), int(n))] = value

    @property
    def M(self):
        return (2 * self.N + 1) ** 2

    def window(self):
        return dual_window(self.lat, self.N)

    def is_vacuum(self):
        return not self.qcoeffs

    def vacuum(self):
        """
        The same structure with the potential removed.
        """
        return HoloData(self.lat, self.alpha, {}, self.N)

    def with_truncation(self, N):
        return HoloData(self.lat, self.alpha, self.qcoeffs, N)

    def with_alpha(self, alpha):
        return HoloData(self.lat, alpha, self.qcoeffs, self.N)

    def scaled(self, factor):
        """
        The structure with the potential multiplied by factor.
        """
        return HoloData(self.lat, self.alpha,
                        {key: factor * value for key, value in self.qcoeffs.items()}, self.N)

    def potential_l2(self):
        """
        Sum of the squared moduli of the Fourier coefficients of q.
        """
        return float(sum(abs(value) ** 2 for value in self.qcoeffs.values()))

    def to_dict(self):
        return {
            "lattice": self.lat.to_dict(),
            "alpha": [self.alpha.real, self.alpha.imag],
            "qcoeffs": [{"m": m, "n": n, "re": value.real, "im": value.imag}
                        for (m, n), value in sorted(self.qcoeffs.items())],
            "N": self.N,
        }

    @classmethod
    def from_dict(cls, doc):
        coeffs = {(int(entry["m"]), int(entry["n"])): complex(entry["re"], entry["im"])
                  for entry in doc.get("qcoeffs", [])}
        return cls(Lattice.from_dict(doc["lattice"]), complex(*doc.get("alpha", [0.0, 0.0])),
                   coeffs, int(doc["N"]), int(doc.get("degree", 0)))

    def dump(self, path):
        with open(path, 'w') as fobj:
            json.dump(self.to_dict(), fobj, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path, 'r') as fobj:
            return cls.from_dict(json.load(fobj))

    def __repr__(self):
        return "HoloData(lat={!r}, alpha={!r}, modes={}, N={})".format(
            self.lat, self.alpha, len(self.qcoeffs), self.N)


class OperatorMatrix(object):
    """
    The truncated operator twisted by a harmonic form, as a dense complex
    matrix with u-block first.
    """

    def __init__(self, matrix, N, omega):
        self.matrix = matrix
        self.N = N
        self.omega = omega

    @property
    def M(self):
        return (2 * self.N + 1) ** 2

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def u_slice(self):
        return slice(0, self.M)

    @property
    def v_slice(self):
        return slice(self.M, 2 * self.M)

    def mode_index(self, m, n):
        """
        Position of the character (m, n) inside either block.
        """
        return mode_index(self.N, m, n)


def mode_index(N, m, n):
    if abs(m) > N or abs(n) > N:
        raise IndexError("Mode ({}, {}) outside the window N={}".format(m, n, N))
    return (m + N) * (2 * N + 1) + (n + N)


def mode_arrays(hd):
    """
    Index arrays (m, n) and the coefficient arrays (eta', eta'') of the
    window, in row-major order.
    """
    modes = hd.window()
    m = numpy.array([p.m for p in modes])
    n = numpy.array([p.n for p in modes])
    ep = numpy.array([p.eta.a for p in modes])
    epp = numpy.array([p.eta.b for p in modes])
    return m, n, ep, epp


def base_matrices(hd):
    """
    Split the twisted operator as ``D(a, b) = M0 + a Ea + b Eb``.

    :param HoloData hd: The holomorphic structure
    :returns: (M0, ea, eb) where ea and eb are the diagonals of Ea and Eb
    """
    M = hd.M
    m, n, ep, epp = mode_arrays(hd)
    width = 2 * hd.N + 1
    mat = numpy.zeros((2 * M, 2 * M), dtype=complex)
    diag = numpy.concatenate([epp - hd.alpha.conjugate(), ep - hd.alpha])
    mat[numpy.arange(2 * M), numpy.arange(2 * M)] = diag

    rows = numpy.arange(M)
    for (km, kn), value in hd.qcoeffs.items():
        # q couples u-mode eta - kappa into v-row eta
        mm, nn = m - km, n - kn
        inside = (numpy.abs(mm) <= hd.N) & (numpy.abs(nn) <= hd.N)
        cols = (mm[inside] + hd.N) * width + (nn[inside] + hd.N)
        mat[M + rows[inside], cols] += value
        # conj(q) has coefficient conj(q_kappa) at -kappa: couples v-mode eta + kappa into u-row eta
        mm, nn = m + km, n + kn
        inside = (numpy.abs(mm) <= hd.N) & (numpy.abs(nn) <= hd.N)
        cols = (mm[inside] + hd.N) * width + (nn[inside] + hd.N)
        mat[rows[inside], M + cols] -= value.conjugate()

    ea = numpy.concatenate([numpy.zeros(M), numpy.ones(M)])
    eb = numpy.concatenate([numpy.ones(M), numpy.zeros(M)])
    return mat, ea, eb


def assemble(hd, omega):
    """
    Assemble the truncated operator twisted by omega.

    :param HoloData hd: The holomorphic structure
    :param HarmonicForm omega: The twisting form
    :returns: OperatorMatrix
    """
    mat, ea, eb = base_matrices(hd)
    idx = numpy.arange(mat.shape[0])
    mat[idx, idx] += omega.a * ea + omega.b * eb
    return OperatorMatrix(mat, hd.N, omega)


def singular_values(m):
    """
    Singular values in descending order.
    """
    return scipy.linalg.svdvals(m.matrix)


def sigma_min(m):
    """
    Smallest singular value of an assembled operator.

    :param OperatorMatrix m: The operator
    """
    return float(singular_values(m)[-1])


def log_abs_det(m):
    """
    ``log |det|`` of an assembled operator.
    """
    sign, logdet = numpy.linalg.slogdet(m.matrix)
    if sign == 0:
        return -numpy.inf
    return float(logdet)


def willmore_energy(hd):
    """
    Willmore energy of the holomorphic structure, ``4 sum |q_k|^2 Area``.

    :param HoloData hd: The holomorphic structure
    """
    return 4.0 * hd.potential_l2() * hd.lat.area


def from_model(lat, c, alpha=0j, kappa=(0, 0), N=8):
    """
    HoloData of a single-mode potential ``q = c chi_kappa``.
    """
    coeffs = {tuple(kappa): complex(c)} if c != 0 else {}
    return HoloData(lat, alpha, coeffs, N)

