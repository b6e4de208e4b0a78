"""
Quaternions, points of the quaternionic projective line and sphere
congruences.

Quaternions are stored as real arrays whose last axis holds the
coefficients ``(w, x, y, z)`` of ``w + x i + y j + z k``.  The vectorised
helpers in this module work on arrays of any leading shape, which is how
grids of quaternions are handled everywhere else in the package.  The
:class:`Quaternion` class is a small immutable scalar wrapper for use at
API boundaries.

A quaternion is also written ``u + j v`` with complex ``u = w + x i`` and
``v = y - z i``.  The map ``u + j v -> [[u, -conj(v)], [v, conj(u)]]`` is a
ring homomorphism into complex 2x2 matrices and carries all quaternionic
matrix algebra (inverses, solves) over to numpy.
"""

import logging
from dataclasses import dataclass

import numpy

from .utils.errors import InvalidPoint, SplittingCollapsed

LOGGER = logging.getLogger("quatspec")


def qmul(p, q):
    """
    Hamilton product of two quaternion arrays (broadcasting).
    """
    p = numpy.asarray(p, dtype=float)
    q = numpy.asarray(q, dtype=float)
    w1, x1, y1, z1 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    w2, x2, y2, z2 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return numpy.stack([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ], axis=-1)


def qconj(q):
    """
    Quaternionic conjugate.
    """
    q = numpy.asarray(q, dtype=float)
    return q * numpy.array([1.0, -1.0, -1.0, -1.0])


def qnorm2(q):
    """
    Squared norm, as a real array without the last axis.
    """
    q = numpy.asarray(q, dtype=float)
    return numpy.sum(q * q, axis=-1)


def qabs(q):
    return numpy.sqrt(qnorm2(q))


def qinv(q):
    """
    Multiplicative inverse.  Zero entries produce inf/nan, callers check
    norms first.
    """
    return qconj(q) / qnorm2(q)[..., None]


def qimag(q):
    """
    Imaginary part, with a zero real coefficient.
    """
    q = numpy.array(q, dtype=float)
    q[..., 0] = 0.0
    return q


def to_uv(q):
    """
    Split q = u + j v into its complex coordinates (u, v).
    """
    q = numpy.asarray(q, dtype=float)
    return q[..., 0] + 1j * q[..., 1], q[..., 2] - 1j * q[..., 3]


def from_uv(u, v):
    """
    Assemble q = u + j v from complex arrays.
    """
    u = numpy.asarray(u, dtype=complex)
    v = numpy.asarray(v, dtype=complex)
    u, v = numpy.broadcast_arrays(u, v)
    return numpy.stack([u.real, u.imag, v.real, -v.imag], axis=-1)


def complex_to_q(c):
    """
    Embed complex numbers into the quaternions along span{1, i}.
    """
    return from_uv(c, numpy.zeros_like(numpy.asarray(c, dtype=complex)))


def qmul_complex(q, c):
    """
    Right multiplication of quaternions by complex numbers.
    """
    return qmul(q, complex_to_q(c))


def to_complex_matrix(q):
    """
    Complex 2x2 representation of quaternions, shape (..., 2, 2).
    """
    u, v = to_uv(q)
    return numpy.stack([
        numpy.stack([u, -numpy.conj(v)], axis=-1),
        numpy.stack([v, numpy.conj(u)], axis=-1),
    ], axis=-2)


def from_complex_matrix(m):
    """
    Inverse of :func:`to_complex_matrix`, reading the first column.
    """
    m = numpy.asarray(m, dtype=complex)
    return from_uv(m[..., 0, 0], m[..., 1, 0])


def qmatrix_to_complex(a):
    """
    Complex representation of quaternionic matrices.

    :param a: array of shape (..., r, c, 4)
    :returns: complex array of shape (..., 2r, 2c)
    """
    a = numpy.asarray(a, dtype=float)
    rows, cols = a.shape[-3], a.shape[-2]
    blocks = to_complex_matrix(a)
    lead = blocks.shape[:-4]
    blocks = numpy.moveaxis(blocks, -2, -3)
    return blocks.reshape(lead + (2 * rows, 2 * cols))


def complex_to_qmatrix(m):
    """
    Quaternionic matrix of a complex block matrix in the image of
    :func:`qmatrix_to_complex`.

    :param m: complex array of shape (..., 2r, 2c)
    :returns: array of shape (..., r, c, 4)
    """
    m = numpy.asarray(m, dtype=complex)
    lead = m.shape[:-2]
    rows, cols = m.shape[-2] // 2, m.shape[-1] // 2
    blocks = m.reshape(lead + (rows, 2, cols, 2))
    blocks = numpy.moveaxis(blocks, -3, -2)
    return from_complex_matrix(blocks)


def qmatvec(s, w):
    """
    Apply quaternionic 2x2 matrices (..., 2, 2, 4) to vectors (..., 2, 4).
    """
    s = numpy.asarray(s, dtype=float)
    w = numpy.asarray(w, dtype=float)
    return numpy.stack([
        qmul(s[..., 0, 0, :], w[..., 0, :]) + qmul(s[..., 0, 1, :], w[..., 1, :]),
        qmul(s[..., 1, 0, :], w[..., 0, :]) + qmul(s[..., 1, 1, :], w[..., 1, :]),
    ], axis=-2)


def vector_norm(w):
    """
    Euclidean norm of vectors in H^2 stored as (..., 2, 4).
    """
    w = numpy.asarray(w, dtype=float)
    return numpy.sqrt(numpy.sum(w * w, axis=(-2, -1)))


@dataclass(frozen=True)
class Quaternion(object):
    """
    An immutable quaternion ``w + x i + y j + z k``.
    """

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr):
        arr = numpy.asarray(arr, dtype=float)
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]))

    @classmethod
    def from_complex(cls, c):
        c = complex(c)
        return cls(c.real, c.imag, 0.0, 0.0)

    def as_array(self):
        return numpy.array([self.w, self.x, self.y, self.z])

    def __add__(self, other):
        return Quaternion.from_array(self.as_array() + _as_qarray(other))

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return Quaternion.from_array(self.as_array() - _as_qarray(other))

    def __rsub__(self, other):
        return Quaternion.from_array(_as_qarray(other) - self.as_array())

    def __neg__(self):
        return Quaternion.from_array(-self.as_array())

    def __mul__(self, other):
        return Quaternion.from_array(qmul(self.as_array(), _as_qarray(other)))

    def __rmul__(self, other):
        return Quaternion.from_array(qmul(_as_qarray(other), self.as_array()))

    def __truediv__(self, other):
        """
        Right division, ``p / q = p q^-1``.
        """
        return self * Quaternion.from_array(qinv(_as_qarray(other)))

    def __abs__(self):
        return float(qabs(self.as_array()))

    def conjugate(self):
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("Quaternion 0 has no inverse")
        return Quaternion.from_array(qinv(self.as_array()))

    def is_zero(self):
        return self.w == 0.0 and self.x == 0.0 and self.y == 0.0 and self.z == 0.0

    def isclose(self, other, tol=1e-12):
        return float(qabs(self.as_array() - _as_qarray(other))) <= tol


def _as_qarray(value):
    if isinstance(value, Quaternion):
        return value.as_array()
    if isinstance(value, (int, float, complex)):
        return complex_to_q(complex(value))
    return numpy.asarray(value, dtype=float)


ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


class _Infinity(object):
    """
    The point at infinity of an affine chart of the projective line.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


class HPoint(object):
    """
    A point of the quaternionic projective line, i.e. a quaternionic line
    ``v H`` in H^2 given by homogeneous coordinates ``v = (v0, v1)``.

    Two HPoints are equal when they span the same line.
    """

    def __init__(self, v0, v1):
        """
        :param v0: first homogeneous coordinate (Quaternion, number or array)
        :param v1: second homogeneous coordinate
        """
        self._v = numpy.stack([_as_qarray(v0), _as_qarray(v1)])
        if not numpy.all(numpy.isfinite(self._v)):
            raise InvalidPoint("Homogeneous coordinates must be finite")
        if qnorm2(self._v).sum() == 0.0:
            raise InvalidPoint("Homogeneous coordinates (0, 0) do not define a line")

    @classmethod
    def from_array(cls, arr):
        arr = numpy.asarray(arr, dtype=float)
        return cls(arr[0], arr[1])

    @property
    def v0(self):
        return Quaternion.from_array(self._v[0])

    @property
    def v1(self):
        return Quaternion.from_array(self._v[1])

    def as_array(self):
        return self._v.copy()

    def scaled(self, lam):
        """
        Return the same line with coordinates scaled on the right by lam.
        """
        lam = _as_qarray(lam)
        return HPoint(qmul(self._v[0], lam), qmul(self._v[1], lam))

    def __eq__(self, other):
        if not isinstance(other, HPoint):
            return NotImplemented
        return hp1_distance(self, other) < 1e-12

    __hash__ = None

    def __repr__(self):
        return "HPoint({!r}, {!r})".format(self.v0, self.v1)


def hp1_chart(p, chart=0):
    """
    Affine chart value of a point of the projective line.

    Chart 0 is ``v0 v1^-1``, chart 1 is ``v1 v0^-1``.

    :param HPoint p: The point
    :param int chart: 0 or 1
    :returns: Quaternion, or INFINITY when the denominator vanishes
    """
    if chart not in (0, 1):
        raise ValueError("chart must be 0 or 1, got {}".format(chart))
    arr = p.as_array()
    num, den = (arr[0], arr[1]) if chart == 0 else (arr[1], arr[0])
    if qnorm2(den) <= 1e-30 * qnorm2(arr).sum():
        return INFINITY
    return Quaternion.from_array(qmul(num, qinv(den)))


def chart_to_hp1(value, chart=0):
    """
    Inverse of :func:`hp1_chart`.
    """
    if chart not in (0, 1):
        raise ValueError("chart must be 0 or 1, got {}".format(chart))
    if value is INFINITY:
        return HPoint(ONE, 0.0) if chart == 0 else HPoint(0.0, ONE)
    return HPoint(value, ONE) if chart == 0 else HPoint(ONE, value)


def chart_grid(vectors, chart=0):
    """
    Chart values ``w0 w1^-1`` of a grid of H^2 vectors (..., 2, 4).

    Returns the chart values and the relative size of the denominator, so
    callers can detect points near infinity.
    """
    vectors = numpy.asarray(vectors, dtype=float)
    num, den = (vectors[..., 0, :], vectors[..., 1, :]) if chart == 0 else \
        (vectors[..., 1, :], vectors[..., 0, :])
    scale = numpy.sqrt(qnorm2(den) / numpy.maximum(qnorm2(vectors).sum(axis=-1), 1e-300))
    with numpy.errstate(divide='ignore', invalid='ignore'):
        values = qmul(num, qinv(den))
    return values, scale


def hp1_distance_grid(a, b):
    """
    Projective distance between grids of lines given by H^2 vectors.

    The distance is the sine of the principal angle between the lines seen
    as real 4-dimensional subspaces of R^8.  All four principal angles of
    two quaternionic lines agree, so the sine is the relative size of the
    part of ``b`` orthogonal to ``a H``.

    :param a: array (..., 2, 4)
    :param b: array (..., 2, 4)
    :returns: real array (...)
    """
    a = numpy.asarray(a, dtype=float)
    b = numpy.asarray(b, dtype=float)
    inner = qmul(qconj(a[..., 0, :]), b[..., 0, :]) + qmul(qconj(a[..., 1, :]), b[..., 1, :])
    lam = inner / numpy.sum(a * a, axis=(-2, -1))[..., None]
    proj = numpy.stack([qmul(a[..., 0, :], lam), qmul(a[..., 1, :], lam)], axis=-2)
    return vector_norm(b - proj) / vector_norm(b)


def hp1_distance(p, q):
    """
    Projective distance between two points; 0 iff they are the same line,
    1 for orthogonal lines.

    :param HPoint p: first point
    :param HPoint q: second point
    """
    return float(hp1_distance_grid(p.as_array(), q.as_array()))


class SphereCongruencePoint(object):
    """
    The value of a sphere congruence at one point: a quaternionic 2x2
    matrix ``s`` with ``s^2 = -1``.
    """

    def __init__(self, s):
        self.s = numpy.array(s, dtype=float).reshape(2, 2, 4)

    def square(self):
        sc = qmatrix_to_complex(self.s)
        return complex_to_qmatrix(sc @ sc)

    def residual(self):
        """
        Largest entry of ``s^2 + 1`` in the complex representation.
        """
        sc = qmatrix_to_complex(self.s)
        return float(numpy.max(numpy.abs(sc @ sc + numpy.eye(4))))

    def apply(self, w):
        return qmatvec(self.s, w)


def sphere_field(bl, bs, r, n, collapse_tol=1e-10):
    """
    Sphere congruence built from a splitting, pointwise on grids.

    ``S bl = bl r`` and ``S bs = bs n``: S acts on the basis vector of each
    line by right multiplication with a unit imaginary quaternion.

    :param bl: basis vectors of L, shape (..., 2, 4)
    :param bs: basis vectors of L♯, shape (..., 2, 4)
    :param r: complex structure on L, shape (..., 4)
    :param n: complex structure on L♯, shape (..., 4)
    :param float collapse_tol: smallest allowed projective distance of L, L♯
    :returns: array (..., 2, 2, 4)
    :raises SplittingCollapsed: where L and L♯ (nearly) coincide
    """
    bl = numpy.asarray(bl, dtype=float)
    bs = numpy.asarray(bs, dtype=float)
    dist = hp1_distance_grid(bl, bs)
    if numpy.min(dist) < collapse_tol:
        where = numpy.unravel_index(numpy.argmin(dist), dist.shape) if dist.ndim else ()
        raise SplittingCollapsed("splitting collapsed at {}: distance {:.3e}".format(
            tuple(int(i) for i in where), float(numpy.min(dist))))
    basis = numpy.stack([bl, bs], axis=-2)           # (..., row, col, 4)
    diag = numpy.zeros(basis.shape)
    diag[..., 0, 0, :] = numpy.broadcast_to(r, diag[..., 0, 0, :].shape)
    diag[..., 1, 1, :] = numpy.broadcast_to(n, diag[..., 1, 1, :].shape)
    bc = qmatrix_to_complex(basis)
    sc = bc @ qmatrix_to_complex(diag) @ numpy.linalg.inv(bc)
    return complex_to_qmatrix(sc)


def sphere_from_splitting(jtilde, j, line, line_sharp, collapse_tol=1e-10):
    """
    Sphere congruence point with ``S = jtilde`` on L and ``S = j`` on L♯.

    :param Quaternion jtilde: unit imaginary quaternion acting on the basis of L
    :param Quaternion j: unit imaginary quaternion acting on the basis of L♯
    :param HPoint line: the line L
    :param HPoint line_sharp: the line L♯
    :returns: SphereCongruencePoint
    :raises SplittingCollapsed: when L = L♯
    """
    s = sphere_field(line.as_array(), line_sharp.as_array(),
                     _as_qarray(jtilde), _as_qarray(j), collapse_tol)
    return SphereCongruencePoint(s)


def split_coordinates(w, bl, bs):
    """
    Coordinates (x, y) of ``w = bl x + bs y`` in a splitting H^2 = L + L♯.

    :param w: vectors (..., 2, 4)
    :param bl: basis of L (..., 2, 4)
    :param bs: basis of L♯ (..., 2, 4)
    :returns: quaternion arrays x, y of shape (..., 4)
    """
    basis = numpy.stack([numpy.asarray(bl, dtype=float), numpy.asarray(bs, dtype=float)], axis=-2)
    rhs = numpy.asarray(w, dtype=float)[..., :, None, :]
    coords = numpy.linalg.solve(qmatrix_to_complex(basis), qmatrix_to_complex(rhs))
    coords = complex_to_qmatrix(coords)
    return coords[..., 0, 0, :], coords[..., 1, 0, :]
