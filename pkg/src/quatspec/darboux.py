"""
Darboux transforms of a grid immersion from points of its spectrum.

A kernel vector of the twisted operator at ``omega`` is a holomorphic
section ``psi = sigma e^{int omega}`` of ``V/L`` with multiplier
``exp(omega)``, where ``sigma = frame (u + j v)`` is periodic.  Its
prolongation is the unique lift ``psi_hat`` with ``pi d psi_hat = 0``, and
the line ``L♯ = psi_hat H`` is the Darboux transform.  Everything here
works with periodic parts: ``psi_hat = psi_p e^{int omega}`` and
``d psi_hat = (d psi_p + psi_p eps) e^{int omega}`` with the complex form
``eps = omega``, which takes ``a + b`` on d/dx and ``i (a - b)`` on d/dy.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy

from .holo import assemble, singular_values
from .immersion import (ImmersionGrid, apply_operator, classical_willmore, extract_holo,
                        from_frame_coordinates, grid_from_lines, relative_residual)
from .quaternion import (HPoint, complex_to_q, hp1_distance_grid, qabs, qinv, qmul,
                         qmul_complex, qmatrix_to_complex, qmatvec, sphere_field,
                         split_coordinates, vector_norm)
from .spectrum import SpectrumTolerances, fiber_roots, kernel_at, matching_distance
from .torus import (HarmonicForm, grid_partials, grid_points, monodromy_of, reduce_mod_dual,
                    rho_conjugate, synthesize)
from .utils import complex_pair, config, parallel_map
from .utils.errors import (DifferentialDegenerate, NotImmersed, NotOnBranch,
                           QuatSpecException, RepresentationsDisagree, TransformsNotDistinct)

LOGGER = logging.getLogger("quatspec")

CLASSIFICATIONS = ("regular", "singular", "constant")


@dataclass
class MonodromySection:
    """
    A holomorphic section with multiplier: periodic frame coordinates
    (u, v), the form omega and the periodic V/L-coordinate sigma.
    """
    lat: object
    u: numpy.ndarray
    v: numpy.ndarray
    omega: HarmonicForm
    sigma: numpy.ndarray
    eh: object
    residual: float = 0.0

    def monodromy(self):
        return monodromy_of(self.lat, self.omega)


@dataclass
class ProlongedSection:
    """
    The periodic part of a prolonged section, vectors of shape (nx, ny, 2, 4).
    """
    vectors: numpy.ndarray
    omega: HarmonicForm
    section: MonodromySection
    wx: numpy.ndarray
    wy: numpy.ndarray
    residual: float = 0.0


@dataclass
class DarbouxResult:
    """
    A Darboux transform with its classification and residuals.
    """
    classification: str
    lines: numpy.ndarray
    prolonged: Optional[ProlongedSection] = None
    fsharp: Optional[ImmersionGrid] = None
    chart_transform: Optional[numpy.ndarray] = None
    constant_point: Optional[HPoint] = None
    zero_locus: List[tuple] = field(default_factory=list)
    min_distance: float = 0.0
    residuals: dict = field(default_factory=dict)

    def is_regular(self):
        return self.classification == "regular"


def _twisted_partials(vectors, lat, omega, scheme):
    """
    ``d psi + psi eps`` on d/dx and d/dy for periodic parts of any
    trailing shape ending in 4.
    """
    dx, dy = grid_partials(vectors, lat, scheme)
    eps_x = omega.a + omega.b
    eps_y = 1j * (omega.a - omega.b)
    return dx + qmul_complex(vectors, eps_x), dy + qmul_complex(vectors, eps_y)


def section_from_kernel(eh, sample, cross_tol=None):
    """
    The holomorphic section of a kernel vector.

    :param ExtractedHolo eh: The structure the sample was computed for
    :param SpectrumSample sample: A spectrum point with its kernel
    :returns: MonodromySection
    :raises RepresentationsDisagree: when the grid operator does not
        annihilate the synthesized section
    """
    if sample.kernel is None:
        raise ValueError("Spectrum sample at {} carries no kernel".format(sample.omega))
    cross_tol = config.get_float('cross_tol') if cross_tol is None else cross_tol
    hd = eh.hd
    width = 2 * hd.N + 1
    M = width * width
    vec = numpy.asarray(sample.kernel, dtype=complex)
    nx, ny = eh.grid.nx, eh.grid.ny
    u = synthesize(vec[:M].reshape(width, width), nx, ny)
    v = synthesize(vec[M:].reshape(width, width), nx, ny)
    ru, rv = apply_operator(eh, u, v, sample.omega)
    residual = relative_residual(ru, rv, u, v)
    if residual > cross_tol:
        raise RepresentationsDisagree(
            "representations disagree at {}: grid residual {:.3e} above {:.3e}".format(
                sample.omega, residual, cross_tol))
    sigma = from_frame_coordinates(eh, u, v)
    return MonodromySection(hd.lat, u, v, sample.omega, sigma, eh, residual)


def prolong(g, ms, degeneracy_tol=None):
    """
    Prolong a holomorphic section of V/L to a section of H^2.

    The K-part ``eta'`` of ``pi d psi_0`` for the lift ``psi_0 = e sigma`` is
    matched by ``delta (f, 1) lam`` on d/dx, which gives
    ``lam = f_x^-1 g eta'_x``, and ``psi_hat = psi_0 - (f, 1) lam``.

    :param ImmersionGrid g: The immersion the section belongs to
    :param MonodromySection ms: The section
    :returns: ProlongedSection
    :raises NotImmersed: where ``delta`` is numerically singular
    """
    tol = config.get_float('degeneracy_tol') if degeneracy_tol is None else degeneracy_tol
    eh = ms.eh
    scheme = eh.scheme
    sigma = ms.sigma
    etax, etay = _twisted_partials(sigma, g.lat, ms.omega, scheme)
    eta1x = 0.5 * (etax - qmul(eh.nhat, etay))

    gf = g.frame_factor()
    fx = eh.tangent.fx
    size = qabs(qmul(qinv(gf), fx))
    if numpy.min(size) <= tol * numpy.max(size):
        where = tuple(int(k) for k in numpy.unravel_index(numpy.argmin(size), size.shape))
        raise NotImmersed("not immersed at cell {}".format(where), location=where)
    lam = qmul(qinv(fx), qmul(gf, eta1x))

    e = g.infinity_point.as_array()
    vectors = numpy.stack([qmul(e[0], sigma) - qmul(g.values, lam),
                           qmul(e[1], sigma) - lam], axis=-2)
    wx, wy = _twisted_partials(vectors, g.lat, ms.omega, scheme)
    scale = max(float(numpy.max(vector_norm(vectors))), 1e-300)
    residual = max(float(numpy.max(qabs(g.quotient_coordinate(wx)))),
                   float(numpy.max(qabs(g.quotient_coordinate(wy))))) / scale
    LOGGER.debug("Prolongation residual {:.3e} at {}".format(residual, ms.omega))
    return ProlongedSection(vectors, ms.omega, ms, wx, wy, residual)


def _line_coordinates(w, g, vectors):
    """
    L-coordinate of w in the splitting ``H^2 = L + L♯``.
    """
    return split_coordinates(w, g.lines(), vectors)[0]


def darboux_transform(g, ps, tolerances=None):
    """
    The Darboux transform ``L♯ = psi_hat H`` of a prolonged section.

    Transforms whose image has diameter below ``constant_tol`` are
    constant.  Transforms of sections with zeros are singular; their zero
    locus is recorded and no grid is built.  Regular transforms are
    checked for conformality ``tau_y = R tau_x`` on the L-coordinate tau
    of ``d psi_hat``.

    :param ImmersionGrid g: The immersion
    :param ProlongedSection ps: The prolonged section
    :param dict tolerances: Overrides of constant_tol and zero_tol
    :returns: DarbouxResult
    """
    tolerances = tolerances or {}
    constant_tol = float(tolerances.get('constant_tol', config.get_float('constant_tol')))
    zero_tol = float(tolerances.get('zero_tol', config.get_float('zero_tol')))
    lines = ps.vectors
    residuals = {"prolongation": ps.residual, "section": ps.section.residual}

    diameter = float(numpy.max(hp1_distance_grid(lines, lines[0, 0])))
    if diameter < constant_tol:
        LOGGER.info("Constant Darboux transform at {}".format(ps.omega))
        return DarbouxResult("constant", lines, ps, constant_point=HPoint.from_array(lines[0, 0]),
                             min_distance=float(numpy.min(hp1_distance_grid(g.lines(), lines))),
                             residuals=residuals)

    size = qabs(ps.section.sigma)
    zeros = numpy.argwhere(size < zero_tol * numpy.max(size))
    if zeros.size:
        LOGGER.info("Singular Darboux transform at {}: {} grid zeros".format(ps.omega, len(zeros)))
        return DarbouxResult("singular", lines, ps,
                             zero_locus=[tuple(int(k) for k in p) for p in zeros],
                             residuals=residuals)

    fsharp, transform = grid_from_lines(g.lat, lines)
    tau_x = _line_coordinates(ps.wx, g, lines)
    tau_y = _line_coordinates(ps.wy, g, lines)
    R = ps.section.eh.tangent.R
    residuals["conformality"] = float(numpy.max(qabs(tau_y - qmul(R, tau_x))) /
                                      max(float(numpy.max(qabs(tau_x))), 1e-300))
    min_distance = float(numpy.min(hp1_distance_grid(g.lines(), lines)))
    return DarbouxResult("regular", lines, ps, fsharp, transform, min_distance=min_distance,
                         residuals=residuals)


def _complex_structure_sharp(ps):
    """
    ``n = sigma^-1 nhat sigma``, the action of S on the basis of L♯.
    """
    sigma = ps.section.sigma
    return qmul(qinv(sigma), qmul(ps.section.eh.nhat, sigma))


def verify_envelope(f, res):
    """
    Residuals of the envelope conditions of the sphere congruence S with
    ``S = R`` on L and ``S = n`` on L♯.

    S envelopes f (``*delta = S delta = delta S``) and left-envelopes f♯
    (``*delta♯ = S delta♯``).  The right-envelope residual of f♯ is
    reported as well; it vanishes only for isothermic pairs.

    :param ImmersionGrid f: The immersion
    :param DarbouxResult res: A regular transform of f
    :returns: dict of residuals
    """
    if not res.is_regular():
        raise ValueError("Envelope residuals need a regular transform, got {}".format(res.classification))
    ps = res.prolonged
    eh = ps.section.eh
    td = eh.tangent
    bl = f.lines()
    bs = res.lines
    n = _complex_structure_sharp(ps)
    S = sphere_field(bl, bs, td.R, n)

    sc = qmatrix_to_complex(S)
    square = float(numpy.max(numpy.abs(sc @ sc + numpy.eye(4))))

    dfx = numpy.zeros(bl.shape)
    dfx[..., 0, :] = td.fx
    dfy = numpy.zeros(bl.shape)
    dfy[..., 0, :] = td.fy
    fscale = qabs(td.fx)
    touch_f = numpy.max(qabs(f.quotient_coordinate(dfy - qmatvec(S, dfx))) / fscale)

    wscale = vector_norm(ps.wx)
    left = numpy.max(vector_norm(ps.wy - qmatvec(S, ps.wx)) / wscale)
    tau_x = _line_coordinates(ps.wx, f, bs)
    tau_y = _line_coordinates(ps.wy, f, bs)
    right = numpy.max(qabs(tau_y - qmul(tau_x, n)) / qabs(tau_x))

    report = {
        "square": square,
        "preserves_l": float(numpy.max(hp1_distance_grid(bl, qmatvec(S, bl)))),
        "preserves_lsharp": float(numpy.max(hp1_distance_grid(bs, qmatvec(S, bs)))),
        "touch_f": float(touch_f),
        "right_f": td.right_residual,
        "left_sharp": float(left),
        "right_sharp": float(right),
    }
    report["right_left_ratio"] = report["right_sharp"] / max(report["left_sharp"], 1e-300)
    return report


def _monodromy_error(lat, chi_p, omega_sharp, omega_flat):
    """
    Largest relative deviation of ``chi(z + gamma)`` from
    ``h♯^-1 chi(z) h♭`` along the first row and column of the grid,
    with ``chi = E♯^-1 chi_p E♭``.
    """
    nx, ny = chi_p.shape[:2]
    z = grid_points(lat, nx, ny)
    worst = 0.0
    for gamma, edge in ((lat.gamma1, (slice(0, 1), slice(None))),
                        (lat.gamma2, (slice(None), slice(0, 1)))):
        zz = z[edge]
        cp = chi_p[edge]
        e_sharp = numpy.exp(omega_sharp.a * zz + omega_sharp.b * numpy.conj(zz))
        e_flat = numpy.exp(omega_flat.a * zz + omega_flat.b * numpy.conj(zz))
        h_sharp = numpy.exp(omega_sharp.period(gamma))
        h_flat = numpy.exp(omega_flat.period(gamma))
        chi = qmul(qmul(complex_to_q(1.0 / e_sharp), cp), complex_to_q(e_flat))
        moved = qmul(qmul(complex_to_q(1.0 / (e_sharp * h_sharp)), cp), complex_to_q(e_flat * h_flat))
        expected = qmul(qmul(complex_to_q(1.0 / h_sharp), chi), complex_to_q(h_flat))
        worst = max(worst, float(numpy.max(qabs(moved - expected) / qabs(expected))))
    return worst


def bianchi_compose(f, psharp, pflat, distinct_tol=None, degeneracy_tol=None):
    """
    The common Darboux transform of two Darboux transforms of f.

    On d/dx, ``d psi♭ = d psi♯ chi`` fixes ``chi_p = tau♯_x^-1 tau♭_x``
    from the L-coordinates; ``phi = psi♭ - psi♯ chi`` then spans a line
    that is a Darboux transform of f♯ (``d phi`` in L♯) and of f♭
    (``d(phi chi^-1)`` in L♭).

    :param ImmersionGrid f: The immersion
    :param ProlongedSection psharp: Prolongation giving f♯
    :param ProlongedSection pflat: Prolongation giving f♭
    :returns: DarbouxResult of the composed transform, with residuals
        ``darboux_sharp``, ``darboux_flat``, ``chi_consistency`` and
        ``monodromy``
    :raises TransformsNotDistinct: when f♯ and f♭ meet
    :raises DifferentialDegenerate: where ``d psi♯`` vanishes
    """
    distinct_tol = config.get_float('zero_tol') if distinct_tol is None else distinct_tol
    tol = config.get_float('degeneracy_tol') if degeneracy_tol is None else degeneracy_tol
    lat = f.lat
    scheme = psharp.section.eh.scheme
    gap = hp1_distance_grid(psharp.vectors, pflat.vectors)
    if numpy.min(gap) < distinct_tol:
        raise TransformsNotDistinct("transforms meet at {} (distance {:.3e})".format(
            tuple(int(k) for k in numpy.unravel_index(numpy.argmin(gap), gap.shape)),
            float(numpy.min(gap))))

    tau_sharp_x = _line_coordinates(psharp.wx, f, psharp.vectors)
    tau_flat_x = _line_coordinates(pflat.wx, f, pflat.vectors)
    size = qabs(tau_sharp_x)
    if numpy.min(size) <= tol * numpy.max(size):
        where = tuple(int(k) for k in numpy.unravel_index(numpy.argmin(size), size.shape))
        raise DifferentialDegenerate("differential degenerate at {}".format(where))
    chi_p = qmul(qinv(tau_sharp_x), tau_flat_x)

    tau_sharp_y = _line_coordinates(psharp.wy, f, psharp.vectors)
    tau_flat_y = _line_coordinates(pflat.wy, f, pflat.vectors)
    consistency = float(numpy.max(qabs(tau_flat_y - qmul(tau_sharp_y, chi_p))) /
                        numpy.max(qabs(tau_flat_y)))

    phi = pflat.vectors - qmul(psharp.vectors, chi_p[..., None, :])

    def off_line(vectors, line, omega):
        wx, wy = _twisted_partials(vectors, lat, omega, scheme)
        worst = 0.0
        for w in (wx, wy):
            comp = split_coordinates(w, f.lines(), line)[0]
            worst = max(worst, float(numpy.max(qabs(comp)) / max(numpy.max(vector_norm(w)), 1e-300)))
        return worst

    residuals = {
        "darboux_sharp": off_line(phi, psharp.vectors, pflat.omega),
        "darboux_flat": off_line(qmul(phi, qinv(chi_p)[..., None, :]), pflat.vectors, psharp.omega),
        "chi_consistency": consistency,
        "monodromy": _monodromy_error(lat, chi_p, psharp.omega, pflat.omega),
    }
    LOGGER.info("Bianchi composition residuals: {}".format(
        ", ".join("{}={:.3e}".format(k, v) for k, v in sorted(residuals.items()))))
    fhat, transform = grid_from_lines(lat, phi)
    return DarbouxResult("regular", phi, None, fhat, transform,
                         min_distance=float(numpy.min(hp1_distance_grid(psharp.vectors, phi))),
                         residuals=residuals)


def spectral_distance(hd1, hd2, fiber_as, cutoff=None, tolerances=None):
    """
    Largest matching distance between the fibers of two structures over
    the given a-values.
    """
    tol = tolerances or SpectrumTolerances()
    cutoff = config.get_float('cutoff') if cutoff is None else float(cutoff)
    per_fiber = []
    for a in fiber_as:
        first = fiber_roots(hd1, a, cutoff + tol.cutoff_margin, tol)
        second = fiber_roots(hd2, a, cutoff + tol.cutoff_margin, tol)
        if first.a_sheet or second.a_sheet:
            continue
        per_fiber.append(matching_distance(first.roots, second.roots,
                                           cutoff + tol.cutoff_margin, tol.cutoff_margin))
    return max(per_fiber) if per_fiber else 0.0, per_fiber


def isospectral_check(f, res, fiber_as, samples=None, cutoff=None, tolerances=None):
    """
    Compare the spectrum of f with the spectrum of a regular transform.

    :param ImmersionGrid f: The immersion
    :param DarbouxResult res: A regular transform of f
    :param fiber_as: a-values whose fibers are compared
    :param samples: Optional spectrum points of f; the transformed structure
        is reported singular there under ``membership``
    :returns: dict with ``distance``, ``per_fiber`` and ``membership``
    """
    if not res.is_regular():
        raise ValueError("Isospectrality needs a regular transform, got {}".format(res.classification))
    eh = res.prolonged.section.eh
    sharp = extract_holo(res.fsharp, eh.hd.N, eh.scheme)
    distance, per_fiber = spectral_distance(eh.hd, sharp.hd, fiber_as, cutoff, tolerances)
    membership = []
    for omega in samples or []:
        svals = singular_values(assemble(sharp.hd, omega))
        membership.append(float(svals[-1] / svals[0]))
    return {"distance": distance, "per_fiber": per_fiber, "membership": membership,
            "alpha_sharp": complex_pair(sharp.hd.alpha)}


def predicted_willmore(w, deg_nf, deg_k=0):
    """
    Willmore energy of a Darboux transform, ``W + 2 pi (deg N_f - deg K)``.
    """
    return w + 2 * math.pi * (deg_nf - deg_k)


@dataclass
class FamilyMember:
    omega: HarmonicForm
    classification: Optional[str] = None
    willmore: Optional[float] = None
    distance: Optional[float] = None
    min_distance: Optional[float] = None
    residuals: dict = field(default_factory=dict)
    error: Optional[str] = None
    result: Optional[DarbouxResult] = None

    def to_dict(self):
        return {
            "omega": self.omega.to_list(),
            "classification": self.classification,
            "willmore": self.willmore,
            "distance_to_f": self.distance,
            "min_distance_to_f": self.min_distance,
            "residuals": self.residuals,
            "error": self.error,
        }


@dataclass
class FamilyReport:
    members: List[FamilyMember]
    willmore_f: float
    rho_pairs: List[dict] = field(default_factory=list)

    def decreasing_fraction(self):
        """
        Fraction of consecutive regular members whose distance to f
        decreases, in sample order.
        """
        dists = [m.distance for m in self.members if m.distance is not None]
        if len(dists) < 2:
            return 0.0
        steps = [later < earlier for earlier, later in zip(dists, dists[1:])]
        return sum(steps) / len(steps)

    def to_dict(self):
        return {
            "willmore_f": self.willmore_f,
            "members": [m.to_dict() for m in self.members],
            "rho_pairs": self.rho_pairs,
            "decreasing_fraction": self.decreasing_fraction(),
        }


def family_member(f, eh, sample, tolerances=None):
    """
    Run section, prolongation and transform for one spectrum sample.
    Failures are recorded on the member.
    """
    member = FamilyMember(sample.omega)
    try:
        ms = section_from_kernel(eh, sample)
        ps = prolong(f, ms)
        res = darboux_transform(f, ps, tolerances)
        member.result = res
        member.classification = res.classification
        member.residuals = dict(res.residuals)
        dist = hp1_distance_grid(f.lines(), res.lines)
        member.distance = float(numpy.max(dist))
        member.min_distance = float(numpy.min(dist))
        if res.is_regular():
            member.willmore = classical_willmore(res.fsharp, eh.scheme)
    except QuatSpecException as exc:
        LOGGER.warning("Family member at {} failed: {}".format(sample.omega, str(exc)))
        member.error = str(exc)
    return member


def family_map(f, eh, samples, threads=1, tolerances=None, pair_tol=1e-6):
    """
    Darboux transforms of f for a list of spectrum samples.

    Members are computed independently; samples related by the real
    structure are paired and their transforms compared.

    :param ImmersionGrid f: The immersion
    :param ExtractedHolo eh: Its extracted structure
    :param samples: list of SpectrumSample
    :returns: FamilyReport
    """
    members = parallel_map(lambda s: family_member(f, eh, s, tolerances), samples, threads)
    report = FamilyReport(members, classical_willmore(f, eh.scheme))
    for i, first in enumerate(members):
        for j in range(i + 1, len(members)):
            second = members[j]
            diff = reduce_mod_dual(f.lat, rho_conjugate(first.omega) - second.omega)
            if diff.norm2() > 1e-16:
                continue
            entry = {"first": i, "second": j, "distance": None, "identical": False}
            if first.result is not None and second.result is not None:
                dist = float(numpy.max(hp1_distance_grid(first.result.lines, second.result.lines)))
                entry["distance"] = dist
                entry["identical"] = dist < pair_tol
            report.rho_pairs.append(entry)
    return report


def outward_samples(hd, a_start, direction, step, count, cutoff=None, b_hint=None, tolerances=None):
    """
    Spectrum samples along one branch over the ray
    ``a_start + k step direction``, ordered by ``|a|``.

    The first root is the one nearest b_hint (smallest ``|b|`` without a
    hint); later roots continue from the previous one.

    :returns: list of SpectrumSample
    :raises NotOnBranch: when the branch leaves the cutoff disc
    """
    tol = tolerances or SpectrumTolerances()
    cutoff = config.get_float('cutoff') if cutoff is None else float(cutoff)
    direction = complex(direction)
    if direction == 0:
        raise ValueError("direction must be nonzero")
    direction = direction / abs(direction)
    samples = []
    previous = None if b_hint is None else complex(b_hint)
    for k in range(count):
        a = complex(a_start) + k * step * direction
        res = fiber_roots(hd, a, cutoff, tol)
        if res.a_sheet or not res.roots:
            raise NotOnBranch("no root to continue the branch at a={}".format(a))
        if previous is None:
            b = min(res.roots, key=abs)
        else:
            b = min(res.roots, key=lambda x: abs(x - previous))
        previous = b
        samples.append(kernel_at(hd, HarmonicForm(a, b), tol))
    samples.sort(key=lambda s: abs(s.omega.a))
    return samples
