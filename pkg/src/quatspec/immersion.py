"""
Conformal immersions of a torus into the quaternionic projective line,
sampled on a grid in an affine chart.

An immersion is stored by its chart values ``f`` with ``L = (f, 1) H``
together with a point ``L0 = e H`` off its image, so that ``H^2 = L + L0``
everywhere.  The quotient ``V/L`` is identified with the quaternions by the
coordinate ``g^-1 (w0 - f w1)`` with ``g = e0 - f e1``.  In that coordinate
the derivative ``delta`` of L is ``g^-1 df``, the complex structure of
``V/L`` is left multiplication by ``g^-1 N g`` and the holomorphic structure
is ``D y = (dy)''``.
"""

import json
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy
import scipy.spatial

from .holo import HoloData, willmore_energy
from .quaternion import (HPoint, ONE, J, K, Quaternion, chart_grid, from_uv, hp1_distance_grid,
                         qabs, qconj, qimag, qinv, qmul, qmul_complex, qnorm2, to_uv)
from .torus import (HarmonicForm, Lattice, apply_symbol, dbar_symbol, dz_symbol,
                    fourier_coefficients, grid_partials, grid_points, synthesize)
from .utils import config
from .utils.errors import (BranchPointOnGrid, ChartSingularity, DegenerateMetric,
                           FrameSingularity, PotentialUnderResolved)
from .utils.export import project, write_obj

LOGGER = logging.getLogger("quatspec")

# Frame references tried in order; each one has its frame singularity at a
# different point of the sphere of unit imaginary quaternions.
FRAME_REFERENCES = [
    ONE,
    J,
    Quaternion(math.sqrt(0.5), 0.0, math.sqrt(0.5), 0.0),
    Quaternion(math.sqrt(0.5), 0.0, 0.0, math.sqrt(0.5)),
    K,
]


def _chart_transforms():
    """
    Unitary maps of H^2 tried when a surface passes near the point at
    infinity of the standard chart, identity first.
    """
    transforms = [numpy.eye(2)]
    for p in (ONE, Quaternion(0.0, 1.0, 0.0, 0.0), J, K):
        for t in (0.25 * math.pi, 0.5 * math.pi, 0.75 * math.pi):
            transforms.append((math.cos(t), math.sin(t), p))
    return transforms


def _scheme(scheme):
    scheme = config.get('derivative_scheme') if scheme is None else scheme
    if scheme not in ("central", "spectral"):
        raise ValueError("Unknown derivative scheme '{}'".format(scheme))
    return scheme


def _location(arr):
    return tuple(int(k) for k in numpy.unravel_index(numpy.argmin(arr), arr.shape))


class ImmersionGrid(object):
    """
    A grid-sampled map of the torus into an affine chart of the
    quaternionic projective line.
    """

    def __init__(self, lat, values, infinity_point=None):
        """
        :param Lattice lat: The lattice of the torus
        :param values: array (nx, ny, 4) of chart values f
        :param HPoint infinity_point: The line L0 off the image, defaults to
            the point at infinity of the chart
        :raises ChartSingularity: when the image meets infinity_point
        """
        values = numpy.array(values, dtype=float)
        if values.ndim != 3 or values.shape[2] != 4:
            raise ValueError("Grid values must have shape (nx, ny, 4), got {}".format(values.shape))
        if not numpy.all(numpy.isfinite(values)):
            raise ChartSingularity("Grid values must be finite")
        self.lat = lat
        self.values = values
        self.infinity_point = infinity_point if infinity_point is not None else HPoint(1.0, 0.0)
        dist = hp1_distance_grid(self.lines(), self.infinity_point.as_array())
        if numpy.min(dist) < config.get_float('degeneracy_tol'):
            raise ChartSingularity("infinity point lies on the image at {}".format(_location(dist)))

    @property
    def nx(self):
        return self.values.shape[0]

    @property
    def ny(self):
        return self.values.shape[1]

    def lines(self):
        """
        Homogeneous vectors ``(f, 1)`` of L, shape (nx, ny, 2, 4).
        """
        ones = numpy.zeros_like(self.values)
        ones[..., 0] = 1.0
        return numpy.stack([self.values, ones], axis=-2)

    def frame_factor(self):
        """
        ``g = e0 - f e1``, the V/L-coordinate of the infinity point.
        """
        e = self.infinity_point.as_array()
        return e[0] - qmul(self.values, e[1])

    def quotient_coordinate(self, w):
        """
        The V/L-coordinate ``g^-1 (w0 - f w1)`` of vectors w (nx, ny, 2, 4).
        """
        w = numpy.asarray(w, dtype=float)
        return qmul(qinv(self.frame_factor()), w[..., 0, :] - qmul(self.values, w[..., 1, :]))

    def to_dict(self):
        return {
            "lattice": self.lat.to_dict(),
            "nx": self.nx,
            "ny": self.ny,
            "values": self.values.reshape(-1).tolist(),
            "infinity_point": self.infinity_point.as_array().reshape(-1).tolist(),
        }

    @classmethod
    def from_dict(cls, doc):
        nx, ny = int(doc["nx"]), int(doc["ny"])
        values = numpy.array(doc["values"], dtype=float)
        if values.size != nx * ny * 4:
            raise ValueError("Expected {} values for a {}x{} grid, got {}".format(
                nx * ny * 4, nx, ny, values.size))
        infinity = doc.get("infinity_point")
        point = HPoint.from_array(numpy.array(infinity, dtype=float).reshape(2, 4)) \
            if infinity is not None else None
        return cls(Lattice.from_dict(doc["lattice"]), values.reshape(nx, ny, 4), point)

    def dump(self, path):
        with open(path, 'w') as fobj:
            json.dump(self.to_dict(), fobj)

    @classmethod
    def load(cls, path):
        with open(path, 'r') as fobj:
            return cls.from_dict(json.load(fobj))

    def write_obj(self, path, drop_axis=3, comment=None):
        """
        Export the chart image, projected to R^3, as an OBJ mesh.
        """
        return write_obj(path, project(self.values, drop_axis), comment)

    def __repr__(self):
        return "ImmersionGrid(lat={!r}, nx={}, ny={})".format(self.lat, self.nx, self.ny)


@dataclass
class TangentData:
    """
    Partials of an immersion and its left and right normals, with
    ``f_y = N f_x = f_x R``.
    """
    fx: numpy.ndarray
    fy: numpy.ndarray
    N: numpy.ndarray
    R: numpy.ndarray
    conformal_residual: float
    right_residual: float
    unit_residual: float
    scheme: str


@dataclass
class ExtractedHolo:
    """
    The holomorphic structure of ``V/L`` read off an immersion, together
    with the trivializing frame it was computed in.
    """
    hd: HoloData
    grid: ImmersionGrid
    tangent: TangentData
    frame: numpy.ndarray
    nhat: numpy.ndarray
    reference: Quaternion
    q_grid: numpy.ndarray
    scheme: str
    reconstruction_residual: float = 0.0
    truncation_loss: float = 0.0


@dataclass
class EmbeddednessReport:
    embedded: bool
    pair: Optional[tuple] = None
    distance: Optional[float] = None
    threshold: Optional[float] = None

    def to_dict(self):
        return {"embedded": self.embedded, "pair": self.pair,
                "distance": self.distance, "threshold": self.threshold}


def homogeneous_torus(theta, nx=64, ny=64):
    """
    The product of two circles ``cos(theta) e^{i s x} + sin(theta) e^{i t y} j``
    in the unit 3-sphere.

    The speeds ``t = 1`` and ``s = tan(theta)`` make the parametrization
    conformal on the lattice spanned by ``2 pi / s`` and ``2 pi i / t``.
    ``theta = pi/4`` is the Clifford torus.

    :param float theta: Angle in (0, pi/2)
    :param int nx: Grid points along the first generator, at least 16
    :param int ny: Grid points along the second generator, at least 16
    :returns: ImmersionGrid with the point at infinity of the chart as L0
    """
    if not 0 < theta < math.pi / 2:
        raise ValueError("theta must lie in (0, pi/2), got {}".format(theta))
    if nx < 16 or ny < 16:
        raise ValueError("Resolution must be at least 16 per direction, got {}x{}".format(nx, ny))
    s, t = math.tan(theta), 1.0
    lat = Lattice(2 * math.pi / s, 2j * math.pi / t)
    z = grid_points(lat, nx, ny)
    x, y = z.real, z.imag
    c, d = math.cos(theta), math.sin(theta)
    values = numpy.stack([c * numpy.cos(s * x), c * numpy.sin(s * x),
                          d * numpy.cos(t * y), d * numpy.sin(t * y)], axis=-1)
    return ImmersionGrid(lat, values)


def clifford(nx=64, ny=64):
    """
    The Clifford torus, ``homogeneous_torus(pi/4)``.
    """
    return homogeneous_torus(math.pi / 4, nx, ny)


def rotate_chart(g, u):
    """
    Apply the Moebius map ``f -> u f`` for a unit quaternion u.

    :param ImmersionGrid g: The immersion
    :param Quaternion u: A unit quaternion
    :returns: ImmersionGrid
    """
    u = u.as_array() if isinstance(u, Quaternion) else numpy.asarray(u, dtype=float)
    u = u / qabs(u)
    e = g.infinity_point.as_array()
    return ImmersionGrid(g.lat, qmul(u, g.values), HPoint(qmul(u, e[0]), e[1]))


def _unit_imaginary(q):
    im = qimag(q)
    return im / qabs(im)[..., None]


def tangent_data(g, scheme=None, degeneracy_tol=None):
    """
    Partial derivatives and the normals N, R of an immersion.

    :param ImmersionGrid g: The immersion
    :param str scheme: Derivative scheme, default from config
    :returns: TangentData
    :raises BranchPointOnGrid: where df is numerically zero
    """
    scheme = _scheme(scheme)
    tol = config.get_float('degeneracy_tol') if degeneracy_tol is None else degeneracy_tol
    fx, fy = grid_partials(g.values, g.lat, scheme)
    nx_norm, ny_norm = qabs(fx), qabs(fy)
    scale = max(float(numpy.max(nx_norm)), float(numpy.max(ny_norm)), 1e-300)
    smallest = numpy.minimum(nx_norm, ny_norm)
    if numpy.min(smallest) <= tol * scale:
        where = _location(smallest)
        raise BranchPointOnGrid("branch point on grid at {}: |df| = {:.3e}".format(
            where, float(numpy.min(smallest))), location=where)
    fxinv = qinv(fx)
    N = _unit_imaginary(qmul(fy, fxinv))
    R = _unit_imaginary(qmul(fxinv, fy))
    conformal = numpy.max(qabs(fy - qmul(N, fx)) / nx_norm)
    right = numpy.max(qabs(fy - qmul(fx, R)) / nx_norm)
    unit = max(float(numpy.max(numpy.abs(qnorm2(N) - 1.0))), float(numpy.max(numpy.abs(N[..., 0]))))
    LOGGER.debug("Tangent data: conformality residual {:.3e}".format(conformal))
    return TangentData(fx, fy, N, R, float(conformal), float(right), unit, scheme)


def _frame(nhat, reference):
    """
    ``p - nhat p i`` for the reference p; satisfies ``nhat phi = phi i``.
    """
    p = reference.as_array()
    return p - qmul(qmul(nhat, p), numpy.array([0.0, 1.0, 0.0, 0.0]))


def _coefficient_array(hd):
    N = hd.N
    coeffs = numpy.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
    for (m, n), value in hd.qcoeffs.items():
        coeffs[m + N, n + N] = value
    return coeffs


def extract_holo(g, N=None, scheme=None):
    """
    Read the holomorphic structure ``(alpha, q)`` of ``V/L`` off an
    immersion.

    A unit frame phi with ``nhat phi = phi i`` trivializes ``V/L``, and
    ``phi^-1 D (phi lambda) = dbar lambda + A lambda`` with
    ``A = A1 + j A2``.  The gauge ``phi e^s`` with ``dbar s = mean(A1) - A1``
    makes the J-commuting part constant; then ``alpha = -conj(mean(A1))``
    and ``q = A2 e^{s - conj(s)}``.

    :param ImmersionGrid g: The immersion
    :param int N: Truncation radius of the Fourier coefficients of q
    :param str scheme: Derivative scheme, default from config
    :returns: ExtractedHolo
    :raises FrameSingularity: when every frame reference degenerates
    :raises PotentialUnderResolved: when q has energy outside the window
    """
    scheme = _scheme(scheme)
    N = config.get_int('truncation') if N is None else int(N)
    td = tangent_data(g, scheme)
    lat, nx, ny = g.lat, g.nx, g.ny

    gf = g.frame_factor()
    nhat = qmul(qinv(gf), qmul(td.N, gf))

    frame_tol = config.get_float('frame_tol')
    retries = config.get_int('frame_retries')
    raw, reference, first_failure = None, None, None
    for candidate in FRAME_REFERENCES[:retries + 1]:
        trial = _frame(nhat, candidate)
        size = qabs(trial) / 2
        if numpy.min(size) >= frame_tol:
            raw, reference = trial, candidate
            break
        where = _location(size)
        if first_failure is None:
            first_failure = where
        LOGGER.warning("Frame singular at {} for reference {}, trying the next one".format(
            where, candidate))
    if raw is None:
        raise FrameSingularity("frame singularity at {}".format(first_failure), location=first_failure)

    phi = raw / qabs(raw)[..., None]
    phx, phy = grid_partials(phi, lat, scheme)
    A = qmul(qinv(phi), 0.5 * (phx + qmul(nhat, phy)))
    a1, a2 = to_uv(A)
    mean = a1.mean()

    sym = dbar_symbol(lat, nx, ny, scheme)
    rhs = numpy.fft.fft2(mean - a1)
    solvable = numpy.abs(sym) > 1e-12 * numpy.max(numpy.abs(sym))
    s = numpy.fft.ifft2(numpy.where(solvable, rhs / numpy.where(solvable, sym, 1.0), 0.0))
    q = a2 * numpy.exp(s - numpy.conj(s))
    frame = qmul_complex(phi, numpy.exp(s))
    alpha = -numpy.conj(mean)

    coeffs = fourier_coefficients(q, N)
    total = float(numpy.mean(numpy.abs(q) ** 2))
    inside = float(numpy.sum(numpy.abs(coeffs) ** 2))
    loss = max(total - inside, 0.0)
    if loss > config.get_float('underresolved_tol') * max(total, 1e-300):
        raise PotentialUnderResolved("potential under-resolved: {:.3e} of {:.3e} outside N={}".format(
            loss, total, N))
    largest = float(numpy.max(numpy.abs(coeffs)))
    cutoff = config.get_float('coeff_tol') * largest
    qcoeffs = {(m - N, n - N): complex(coeffs[m, n])
               for m in range(2 * N + 1) for n in range(2 * N + 1)
               if abs(coeffs[m, n]) > cutoff}
    hd = HoloData(lat, complex(alpha), qcoeffs, N)

    eh = ExtractedHolo(hd, g, td, frame, nhat, reference, q, scheme, truncation_loss=loss)
    eh.reconstruction_residual = reconstruction_residual(eh)
    LOGGER.info("Extracted alpha={:.6g}, {} modes, Willmore {:.6g}, reconstruction residual {:.3e}".format(
        hd.alpha, len(hd.qcoeffs), willmore_energy(hd), eh.reconstruction_residual))
    return eh


def frame_coordinates(eh, y):
    """
    Frame coordinates (u, v) of V/L-coordinates y, ``y = frame (u + j v)``.
    """
    return to_uv(qmul(qinv(eh.frame), y))


def from_frame_coordinates(eh, u, v):
    """
    V/L-coordinates ``frame (u + j v)`` of frame coordinates.
    """
    return qmul(eh.frame, from_uv(u, v))


def apply_operator(eh, u, v, omega=None):
    """
    Apply the grid operator of the extracted structure twisted by omega.

    The potential is synthesized from the Fourier coefficients of
    ``eh.hd``, so a small result cross-validates the truncated Fourier
    representation against the grid.

    :returns: (ru, rv), the u-row and v-row residual grids
    """
    omega = omega or HarmonicForm()
    hd = eh.hd
    nx, ny = eh.grid.nx, eh.grid.ny
    u = numpy.asarray(u, dtype=complex)
    v = numpy.asarray(v, dtype=complex)
    q = synthesize(_coefficient_array(hd), nx, ny)
    du = apply_symbol(u, dbar_symbol(hd.lat, nx, ny, eh.scheme))
    dv = apply_symbol(v, dz_symbol(hd.lat, nx, ny, eh.scheme))
    ru = du + (omega.b - hd.alpha.conjugate()) * u - numpy.conj(q) * v
    rv = q * u + dv + (omega.a - hd.alpha) * v
    return ru, rv


def relative_residual(ru, rv, u, v):
    """
    RMS size of an operator residual relative to its argument.
    """
    num = numpy.sqrt(numpy.mean(numpy.abs(ru) ** 2 + numpy.abs(rv) ** 2))
    den = numpy.sqrt(numpy.mean(numpy.abs(u) ** 2 + numpy.abs(v) ** 2))
    return float(num / max(den, 1e-300))


def reconstruction_residual(eh):
    """
    Largest residual of the operator on the images of the constant
    sections ``(1, 0)`` and ``(0, 1)`` of H^2.
    """
    worst = 0.0
    shape = eh.grid.values.shape[:2] + (2, 4)
    for k in range(2):
        w = numpy.zeros(shape)
        w[..., k, 0] = 1.0
        u, v = frame_coordinates(eh, eh.grid.quotient_coordinate(w))
        ru, rv = apply_operator(eh, u, v)
        worst = max(worst, relative_residual(ru, rv, u, v))
    return worst


def classical_willmore(g, scheme=None):
    """
    ``int |H|^2 dA`` of the chart image in R^4.

    The mean curvature vector is ``(G II_xx - 2F II_xy + E II_yy) / 2(EG - F^2)``
    with the second fundamental form taken normal to the tangent plane;
    the periodic trapezoidal rule gives the integral.

    :param ImmersionGrid g: The immersion
    :raises DegenerateMetric: where ``EG - F^2`` vanishes numerically
    """
    scheme = _scheme(scheme)
    fx, fy = grid_partials(g.values, g.lat, scheme)
    fxx, fxy = grid_partials(fx, g.lat, scheme)
    fyy = grid_partials(fy, g.lat, scheme)[1]
    E = numpy.sum(fx * fx, axis=-1)
    F = numpy.sum(fx * fy, axis=-1)
    G = numpy.sum(fy * fy, axis=-1)
    det = E * G - F * F
    if numpy.min(det) <= config.get_float('degeneracy_tol') * numpy.max(det):
        raise DegenerateMetric("degenerate metric at {}".format(_location(det)))

    t1 = fx / numpy.sqrt(E)[..., None]
    t2 = fy - numpy.sum(fy * t1, axis=-1)[..., None] * t1
    t2 = t2 / numpy.sqrt(numpy.sum(t2 * t2, axis=-1))[..., None]

    def normal(vec):
        return (vec - numpy.sum(vec * t1, axis=-1)[..., None] * t1
                - numpy.sum(vec * t2, axis=-1)[..., None] * t2)

    H = (G[..., None] * normal(fxx) - 2 * F[..., None] * normal(fxy) +
         E[..., None] * normal(fyy)) / (2 * det[..., None])
    integrand = numpy.sum(H * H, axis=-1) * numpy.sqrt(det)
    return float(numpy.mean(integrand) * g.lat.area)


def degree_estimate(g, eh, scheme=None):
    """
    ``deg V/L`` from the difference of the classical and the bundle
    Willmore energies.
    """
    return (classical_willmore(g, scheme) - willmore_energy(eh.hd)) / (4 * math.pi)


def normal_degree(deg_vl, deg_k=0):
    """
    Degree of the normal bundle, ``2 deg V/L + deg K``.
    """
    return 2 * deg_vl + deg_k


def _mesh_size(values):
    """
    Largest distance to the next grid point along either axis.
    """
    hx = numpy.sqrt(numpy.sum((numpy.roll(values, -1, axis=0) - values) ** 2, axis=-1))
    hy = numpy.sqrt(numpy.sum((numpy.roll(values, -1, axis=1) - values) ** 2, axis=-1))
    return numpy.maximum(hx, hy)


def embeddedness_check(g, fraction=None, neighbourhood=2):
    """
    Look for distinct parameter cells whose images come closer than a
    fraction of the local mesh size.

    Candidate pairs come from a k-d tree over the image points; pairs within
    ``neighbourhood`` cells of each other in the parameter grid are
    neighbours, not crossings.

    :param ImmersionGrid g: The map
    :returns: EmbeddednessReport naming the nearest offending pair
    """
    fraction = config.get_float('embed_fraction') if fraction is None else fraction
    nx, ny = g.nx, g.ny
    points = g.values.reshape(-1, 4)
    mesh = _mesh_size(g.values).reshape(-1)
    tree = scipy.spatial.cKDTree(points)
    pairs = tree.query_pairs(fraction * float(numpy.max(mesh)), output_type='ndarray')
    worst = None
    for p, q in pairs:
        pi, pj = divmod(int(p), ny)
        qi, qj = divmod(int(q), ny)
        di = min((pi - qi) % nx, (qi - pi) % nx)
        dj = min((pj - qj) % ny, (qj - pj) % ny)
        if max(di, dj) <= neighbourhood:
            continue
        threshold = fraction * min(mesh[p], mesh[q])
        dist = float(numpy.linalg.norm(points[p] - points[q]))
        if dist < threshold and (worst is None or dist / threshold < worst[0]):
            worst = (dist / threshold, ((pi, pj), (qi, qj)), dist, threshold)
    if worst is None:
        return EmbeddednessReport(True)
    LOGGER.info("Not embedded: cells {} meet at distance {:.3e}".format(worst[1], worst[2]))
    return EmbeddednessReport(False, worst[1], worst[2], worst[3])


def min_pointwise_distance(g1, g2):
    """
    Smallest projective distance between ``f1(p)`` and ``f2(p)`` over the
    grid.
    """
    if g1.values.shape != g2.values.shape:
        raise ValueError("Grids differ in shape: {} and {}".format(g1.values.shape, g2.values.shape))
    return float(numpy.min(hp1_distance_grid(g1.lines(), g2.lines())))


def _transform_matrix(entry):
    """
    The quaternionic 2x2 matrix ``[[c, -s conj(p)], [s p, c]]``.
    """
    c, s, p = entry
    p = p.as_array()
    mat = numpy.zeros((2, 2, 4))
    mat[0, 0, 0] = c
    mat[1, 1, 0] = c
    mat[0, 1] = -s * qconj(p)
    mat[1, 0] = s * p
    return mat


def grid_from_lines(lat, vectors, chart_tol=0.05):
    """
    An ImmersionGrid for a map given by homogeneous vectors.

    The standard chart is used unless the map comes within chart_tol of its
    point at infinity; then the first unitary change of coordinates that
    keeps the map away from infinity is applied.

    :param vectors: array (nx, ny, 2, 4)
    :returns: (ImmersionGrid, transform), transform the applied quaternionic
        2x2 matrix or None
    :raises ChartSingularity: when no candidate chart keeps the map finite
    """
    vectors = numpy.asarray(vectors, dtype=float)
    best = None
    for entry in _chart_transforms():
        if isinstance(entry, numpy.ndarray):
            mat, moved = None, vectors
        else:
            mat = _transform_matrix(entry)
            moved = numpy.stack([
                qmul(mat[0, 0], vectors[..., 0, :]) + qmul(mat[0, 1], vectors[..., 1, :]),
                qmul(mat[1, 0], vectors[..., 0, :]) + qmul(mat[1, 1], vectors[..., 1, :]),
            ], axis=-2)
        values, scale = chart_grid(moved)
        smallest = float(numpy.min(scale))
        if smallest >= chart_tol:
            if mat is not None:
                LOGGER.warning("Map passes near infinity, using a rotated chart")
            return ImmersionGrid(lat, values), mat
        if best is None or smallest > best[0]:
            best = (smallest, values, mat)
    raise ChartSingularity("no chart keeps the map away from infinity (best denominator {:.3e})".format(
        best[0]))
