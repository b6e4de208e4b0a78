"""
The logarithmic spectrum as the zero locus of the twisted operator.

The twisted operator is affine in both coordinates of the harmonic form,
``D(a, b) = M(a) + b E`` with ``E`` the identity on the u-block.  For a
fixed ``a`` the spectrum is therefore the set of finite eigenvalues of a
linear pencil in ``b``.  Both diagonal blocks of ``D`` are diagonal
matrices, so whenever the v-block is invertible the infinite eigenvalues
can be deflated exactly and the finite ones are the eigenvalues of the
u-block Schur complement.  Near the vertical sheets of the vacuum, where
the v-block degenerates, the pencil is handed to QZ instead.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy
import scipy.linalg
import scipy.optimize

from .holo import assemble, base_matrices, mode_arrays, mode_index
from .torus import HarmonicForm, reduce_mod_dual, rho_conjugate
from .utils import complex_pair, parallel_map
from .utils import config
from .utils.errors import FiberSolveError, NotOnSpectrum

LOGGER = logging.getLogger("quatspec")

COLLISION_KINDS = ("double_point", "handle", "unresolved")


class SpectrumTolerances(object):
    """
    Tolerances of the spectrum engine.  Relative tolerances are scaled by
    the norm of the operator they are applied to.
    """

    FIELDS = {
        'fiber_tol': float, 'kernel_tol': float, 'infinite_beta': float,
        'sheet_fraction': float, 'sheet_samples': int, 'fiber_method': str,
        'validate': str, 'max_halvings': int, 'continuation_step': float,
        'collision_factor': float, 'double_point_tol': float, 'handle_tol': float,
        'cutoff_margin': float,
    }

    def __init__(self, **overrides):
        for key, kind in self.FIELDS.items():
            value = overrides.pop(key, None)
            if value is None:
                value = config.get(key)
            setattr(self, key, kind(value))
        if overrides:
            raise TypeError("Unknown tolerances: {}".format(", ".join(sorted(overrides))))
        if self.fiber_method not in ("auto", "schur", "qz"):
            raise ValueError("Unknown fiber method '{}'".format(self.fiber_method))
        if self.validate not in ("residual", "svd"):
            raise ValueError("Unknown root validation '{}'".format(self.validate))

    @classmethod
    def from_table(cls, table):
        """
        Build from a run configuration tolerance table, ignoring unrelated keys.
        """
        return cls(**{key: value for key, value in table.items() if key in cls.FIELDS})


@dataclass
class FiberSolveResult:
    """
    The b-roots over one point of the a-plane.
    """
    a: complex
    roots: List[complex] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    a_sheet: bool = False
    rejected: int = 0
    method: str = "schur"


@dataclass
class SpectrumSample:
    """
    A point of the spectrum together with its kernel.
    """
    omega: HarmonicForm
    sigma: float
    kernel: Optional[numpy.ndarray] = None
    kernel_basis: Optional[numpy.ndarray] = None
    kernel_dim: int = 0
    singular_values: Optional[numpy.ndarray] = None


@dataclass
class Branch:
    id: int
    points: list = field(default_factory=list)

    def to_dict(self):
        return {"id": self.id,
                "points": [[a.real, a.imag, b.real, b.imag, res] for a, b, res in self.points]}


@dataclass
class Collision:
    a: complex
    b: complex
    kind: str
    gap: float
    source: str

    def to_dict(self):
        return {"a": complex_pair(self.a), "b": complex_pair(self.b), "kind": self.kind,
                "gap": self.gap, "source": self.source}


@dataclass
class BranchSet:
    """
    Traced branches of the spectrum over a window of the a-plane.
    """
    branches: List[Branch] = field(default_factory=list)
    a_sheets: List[complex] = field(default_factory=list)
    collisions: List[Collision] = field(default_factory=list)
    collision_tol: float = 0.0

    def to_dict(self):
        return {
            "branches": [branch.to_dict() for branch in self.branches],
            "a_sheets": [complex_pair(a) for a in self.a_sheets],
            "collisions": [col.to_dict() for col in self.collisions],
            "collision_tol": self.collision_tol,
        }

    def samples(self):
        """
        All traced points as (a, b, residual, branch_id).
        """
        for branch in self.branches:
            for a, b, res in branch.points:
                yield a, b, res, branch.id

    def kinds(self):
        return [col.kind for col in self.collisions]


@dataclass
class ScanWindow:
    """
    A rectangle of the a-plane.  A window of zero height is a segment.
    """
    re_lo: float = -1.0
    re_hi: float = 1.0
    im_lo: float = -1.0
    im_hi: float = 1.0

    @classmethod
    def from_dict(cls, doc):
        return cls(float(doc['re'][0]), float(doc['re'][1]), float(doc['im'][0]), float(doc['im'][1]))

    def rows(self, samples):
        """
        Rows of sample points of constant imaginary part, real part increasing.
        """
        re = numpy.linspace(self.re_lo, self.re_hi, samples)
        if self.im_lo == self.im_hi:
            return [[complex(x, self.im_lo) for x in re]]
        im = numpy.linspace(self.im_lo, self.im_hi, samples)
        return [[complex(x, y) for x in re] for y in im]

    def step(self, samples):
        return (self.re_hi - self.re_lo) / (samples - 1)

    def contains(self, a, pad=1e-12):
        return (self.re_lo - pad <= a.real <= self.re_hi + pad and
                self.im_lo - pad <= a.imag <= self.im_hi + pad)


def _inf_norm(mat):
    return float(numpy.max(numpy.sum(numpy.abs(mat), axis=1)))


def _is_a_sheet(hd, base, eb, cutoff, tol, scale):
    """
    Test whether the determinant vanishes identically in b over this a.
    """
    count = tol.sheet_samples
    hits = 0
    diag_idx = numpy.arange(base.shape[0])
    for k in range(count):
        # deterministic spiral of test points inside the cutoff disc
        radius = cutoff * (0.2 + 0.7 * (k + 0.5) / count)
        angle = 2 * math.pi * k * 0.6180339887498949
        b = radius * complex(math.cos(angle), math.sin(angle))
        mat = base.copy()
        mat[diag_idx, diag_idx] += b * eb
        smin = scipy.linalg.svdvals(mat)[-1]
        if smin < tol.fiber_tol * (scale + abs(b)):
            hits += 1
    return hits >= tol.sheet_fraction * count


def _validate_roots(base, eb, candidates, tol, scale):
    """
    Keep the candidate roots whose assembled operator is singular.
    """
    roots, residuals, rejected = [], [], 0
    diag_idx = numpy.arange(base.shape[0])
    for b, vec in candidates:
        if tol.validate == "svd":
            mat = base.copy()
            mat[diag_idx, diag_idx] += b * eb
            svals = scipy.linalg.svdvals(mat)
            rel = svals[-1] / svals[0]
        else:
            resid = base @ vec + b * eb * vec
            rel = numpy.linalg.norm(resid) / numpy.linalg.norm(vec) / (scale + abs(b))
        if rel < tol.fiber_tol:
            roots.append(complex(b))
            residuals.append(float(rel))
        else:
            rejected += 1
            LOGGER.debug("Rejected root b={} with relative residual {:.3e}".format(b, rel))
    order = sorted(range(len(roots)), key=lambda k: (roots[k].real, roots[k].imag))
    return [roots[k] for k in order], [residuals[k] for k in order], rejected


def fiber_roots(hd, a, cutoff, tolerances=None):
    """
    All roots b with ``|b| <= cutoff`` of ``det D(a, b) = 0``.

    :param HoloData hd: The holomorphic structure
    :param complex a: The dz-coefficient of the twisting form
    :param float cutoff: Radius of the b-disc to report
    :param SpectrumTolerances tolerances: Tolerances, defaults from config
    :returns: FiberSolveResult
    :raises FiberSolveError: when the eigen-solver fails
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive, got {}".format(cutoff))
    tol = tolerances or SpectrumTolerances()
    a = complex(a)
    M = hd.M
    base, ea, eb = base_matrices(hd)
    diag_idx = numpy.arange(2 * M)
    base[diag_idx, diag_idx] += a * ea
    scale = max(_inf_norm(base), 1.0)
    vdiag = numpy.diag(base)[M:]
    vmin = numpy.min(numpy.abs(vdiag))

    method = tol.fiber_method
    if method == "auto":
        method = "schur" if vmin > tol.fiber_tol * scale else "qz"
    elif method == "schur" and vmin <= tol.fiber_tol * scale:
        LOGGER.warning("v-block singular at a={}, falling back to QZ".format(a))
        method = "qz"

    if vmin <= tol.fiber_tol * scale:
        # a column of D without any entry is singular for every b
        k = int(numpy.argmin(numpy.abs(vdiag)))
        if numpy.linalg.norm(base[:, M + k]) <= tol.fiber_tol * scale:
            return FiberSolveResult(a, a_sheet=True, method="sheet")

    try:
        if method == "schur":
            B = base[:M, M:]
            C = base[M:, :M]
            schur = numpy.diag(numpy.diag(base)[:M]) - (B / vdiag[None, :]) @ C
            w, vr = scipy.linalg.eig(schur)
            candidates = []
            for k in range(M):
                b = -w[k]
                if abs(b) > cutoff:
                    continue
                xu = vr[:, k]
                candidates.append((b, numpy.concatenate([xu, -(C @ xu) / vdiag])))
        else:
            ww, vr = scipy.linalg.eig(base, -numpy.diag(eb), homogeneous_eigvals=True)
            alpha, beta = ww[0], ww[1]
            size = numpy.hypot(numpy.abs(alpha), numpy.abs(beta))
            if numpy.any(size < 1e-10 * scale):
                if _is_a_sheet(hd, base, eb, cutoff, tol, scale):
                    return FiberSolveResult(a, a_sheet=True, method="sheet")
            candidates = []
            for k in range(alpha.shape[0]):
                if size[k] == 0 or abs(beta[k]) / size[k] < tol.infinite_beta:
                    continue
                b = alpha[k] / beta[k]
                if abs(b) <= cutoff:
                    candidates.append((b, vr[:, k]))
    except (numpy.linalg.LinAlgError, ValueError) as exc:
        raise FiberSolveError("eigen-solver failed at a={}: {}".format(a, str(exc)), a=a)

    roots, residuals, rejected = _validate_roots(base, eb, candidates, tol, scale)
    if rejected:
        LOGGER.warning("Rejected {} unvalidated roots at a={}".format(rejected, a))
    return FiberSolveResult(a, roots, residuals, False, rejected, method)


def kernel_at(hd, omega, tolerances=None):
    """
    Kernel of the twisted operator at a point of the spectrum.

    :param HoloData hd: The holomorphic structure
    :param HarmonicForm omega: A point of the spectrum
    :returns: SpectrumSample with the unit kernel vector(s)
    :raises NotOnSpectrum: when no singular value is below the kernel tolerance
    """
    tol = tolerances or SpectrumTolerances()
    op = assemble(hd, omega)
    try:
        _, svals, vh = scipy.linalg.svd(op.matrix)
    except numpy.linalg.LinAlgError as exc:
        raise FiberSolveError("SVD failed at {}: {}".format(omega, str(exc)), a=omega.a)
    threshold = tol.kernel_tol * svals[0]
    if svals[-1] >= threshold:
        raise NotOnSpectrum("not a spectrum point: sigma_min {:.3e} at {} (tolerance {:.3e})".format(
            svals[-1], omega, threshold))
    dim = int(numpy.sum(svals < threshold))
    basis = numpy.conj(vh[::-1][:dim]).T
    for k in range(dim):
        basis[:, k] = _fix_phase(basis[:, k])
    return SpectrumSample(omega, float(svals[-1]), basis[:, 0].copy(), basis, dim, svals)


def _fix_phase(vec):
    vec = vec / numpy.linalg.norm(vec)
    k = int(numpy.argmax(numpy.abs(vec)))
    return vec * (abs(vec[k]) / vec[k])


# -- Branch tracing ------------------------------------------------------------

def _assignment(r0, r1):
    """
    Minimal cost matching of two root lists; returns pairs and costs.
    """
    if not r0 or not r1:
        return [], numpy.zeros(0), None
    cost = numpy.abs(numpy.array(r0)[:, None] - numpy.array(r1)[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    return list(zip(rows, cols)), cost[rows, cols], cost


def _ambiguous(r0, r1, step):
    pairs, costs, cost = _assignment(r0, r1)
    if not pairs:
        return False
    if numpy.max(costs) > step:
        return True
    for (i, j), best in zip(pairs, costs):
        row = numpy.sort(cost[i])
        if row.shape[0] > 1 and best > 1e-12 and row[1] < 2 * best:
            return True
    return False


def _refine(solve, start, end, step, depth, max_depth):
    """
    Insert midpoints between two fiber results while matching is ambiguous.
    """
    if start.a_sheet or end.a_sheet or depth >= max_depth:
        return [end]
    if not _ambiguous(start.roots, end.roots, step):
        return [end]
    mid = solve((start.a + end.a) / 2)
    return (_refine(solve, start, mid, step, depth + 1, max_depth) +
            _refine(solve, mid, end, step, depth + 1, max_depth))


def _link(sequence, branches, step):
    """
    Sequential reduction of a refined row into branch polylines.
    """
    active = {}
    previous = None
    for res in sequence:
        if res.a_sheet:
            continue
        current = {}
        matched = set()
        if previous is not None:
            pairs, costs, _ = _assignment(previous.roots, res.roots)
            for (i, j), cost in zip(pairs, costs):
                if cost <= step and i in active:
                    branch = active[i]
                    branch.points.append((res.a, res.roots[j], res.residuals[j]))
                    current[j] = branch
                    matched.add(j)
        for j, b in enumerate(res.roots):
            if j not in matched:
                branch = Branch(len(branches))
                branch.points.append((res.a, b, res.residuals[j]))
                branches.append(branch)
                current[j] = branch
        active = current
        previous = res


def vacuum_double_points(hd, window, cutoff, margin=1):
    """
    Double points of the vacuum with the same harmonic shift inside a
    window, together with the modes that meet there.

    :returns: list of (a, b, (m1, n1), (m2, n2)); the a-coordinate comes from
        the v-mode (m1, n1), the b-coordinate from the u-mode (m2, n2)
    """
    m, n, ep, epp = mode_arrays(hd)
    inner = (numpy.abs(m) <= hd.N - margin) & (numpy.abs(n) <= hd.N - margin)
    avals = hd.alpha - ep
    bvals = hd.alpha.conjugate() - epp
    a_idx = [k for k in numpy.flatnonzero(inner) if window.contains(avals[k])]
    b_idx = [k for k in numpy.flatnonzero(inner) if abs(bvals[k]) <= cutoff]
    points = []
    for i in a_idx:
        for j in b_idx:
            points.append((complex(avals[i]), complex(bvals[j]),
                           (int(m[i]), int(n[i])), (int(m[j]), int(n[j]))))
    points.sort(key=lambda p: (p[0].real, p[0].imag, p[1].real, p[1].imag))
    return points


def _schur_det(base, ea, eb, a, b, keep):
    """
    Determinant of the Schur complement of D(a, b) onto the index set keep.
    Returns None when the complement block is numerically singular.
    """
    size = base.shape[0]
    mat = base.copy()
    idx = numpy.arange(size)
    mat[idx, idx] += a * ea + b * eb
    rows_p, cols_p = keep
    rows_r = numpy.setdiff1d(idx, rows_p)
    cols_r = numpy.setdiff1d(idx, cols_p)
    drr = mat[numpy.ix_(rows_r, cols_r)]
    lu, piv = scipy.linalg.lu_factor(drr, check_finite=False)
    udiag = numpy.abs(numpy.diag(lu))
    if numpy.min(udiag) < 1e-12 * max(numpy.max(udiag), 1.0):
        return None
    corr = mat[numpy.ix_(rows_p, cols_r)] @ scipy.linalg.lu_solve((lu, piv), mat[numpy.ix_(rows_r, cols_p)])
    s = mat[numpy.ix_(rows_p, cols_p)] - corr
    return s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]


def classify_collision(hd, a0, b0, keep, radius, tolerances=None, source="branch_approach"):
    """
    Classify a near-intersection of the spectrum by a local quadratic model.

    The determinant is reduced to the 2x2 Schur complement on the index
    sets ``keep = (rows, cols)`` and fitted exactly by a quadratic in
    ``(da, db)`` from six evaluations.  Recentred at its critical point the
    model is ``g + Q(d)``; the distance from the critical point to the zero
    set is ``gap = sqrt(|g| / |Q|)``.  A vanishing gap is a double point,
    a large gap a handle.

    :returns: Collision
    """
    tol = tolerances or SpectrumTolerances()
    base, ea, eb = base_matrices(hd)
    r = radius
    offsets = [(0, 0), (r, 0), (-r, 0), (0, r), (0, -r), (r, r)]
    values = []
    for da, db in offsets:
        val = _schur_det(base, ea, eb, a0 + da, b0 + db, keep)
        if val is None:
            return Collision(complex(a0), complex(b0), "unresolved", float("nan"), source)
        values.append(val)
    g00, gp0, gm0, g0p, g0m, gpp = values
    c10 = (gp0 - gm0) / (2 * r)
    c01 = (g0p - g0m) / (2 * r)
    c20 = (gp0 + gm0 - 2 * g00) / (2 * r * r)
    c02 = (g0p + g0m - 2 * g00) / (2 * r * r)
    c11 = (gpp - g00 - (c10 + c01) * r - (c20 + c02) * r * r) / (r * r)

    hessian = numpy.array([[2 * c20, c11], [c11, 2 * c02]])
    quad = numpy.array([[c20, c11 / 2], [c11 / 2, c02]])
    qscale = scipy.linalg.svdvals(quad)[0]
    if qscale == 0 or abs(numpy.linalg.det(hessian)) < 1e-12 * max(qscale, 1e-300) ** 2:
        return Collision(complex(a0), complex(b0), "unresolved", float("nan"), source)
    crit = numpy.linalg.solve(hessian, -numpy.array([c10, c01]))
    gcrit = g00 + 0.5 * (c10 * crit[0] + c01 * crit[1])
    gap = float(math.sqrt(abs(gcrit) / qscale))
    if gap <= tol.double_point_tol:
        kind = "double_point"
    elif gap >= tol.handle_tol:
        kind = "handle"
    else:
        kind = "unresolved"
    return Collision(complex(a0 + crit[0]), complex(b0 + crit[1]), kind, gap, source)


def _approach_keep(hd, a, b):
    """
    Index sets of the two smallest singular directions at (a, b).
    """
    op = assemble(hd, HarmonicForm(a, b))
    u, _, vh = scipy.linalg.svd(op.matrix)
    rows = _two_largest(numpy.abs(u[:, -1]), numpy.abs(u[:, -2]))
    cols = _two_largest(numpy.abs(vh[-1]), numpy.abs(vh[-2]))
    return numpy.array(rows), numpy.array(cols)


def _two_largest(first, second):
    i = int(numpy.argmax(first))
    second = second.copy()
    second[i] = -1.0
    return [i, int(numpy.argmax(second))]


def scan(hd, window, samples, cutoff=None, tolerances=None, threads=1):
    """
    Trace the spectrum over a window of the a-plane.

    Fibers are solved on a grid of a-values (in parallel), then each row is
    reduced sequentially into branches by minimal cost matching, halving
    the step where the matching is ambiguous.  Collisions are looked for at
    the vacuum double points inside the window and wherever two roots of
    one fiber come closer than the collision tolerance.

    :param HoloData hd: The holomorphic structure
    :param ScanWindow window: The a-window
    :param int samples: Samples per axis
    :param float cutoff: Radius of the b-disc, default from config
    :returns: BranchSet
    """
    if samples < 2:
        raise ValueError("scan needs at least 2 samples, got {}".format(samples))
    tol = tolerances or SpectrumTolerances()
    cutoff = config.get_float('cutoff') if cutoff is None else float(cutoff)

    def solve(a):
        return fiber_roots(hd, a, cutoff, tol)

    rows = window.rows(samples)
    flat = [a for row in rows for a in row]
    LOGGER.info("Scanning {} fibers with N={} over {}".format(len(flat), hd.N, window))
    results = parallel_map(solve, flat, threads)

    step = tol.continuation_step
    finest = abs(window.step(samples)) / 2 ** tol.max_halvings
    collision_tol = tol.collision_factor * finest

    result = BranchSet(collision_tol=collision_tol)
    sequences = []
    pos = 0
    for row in rows:
        row_results = results[pos:pos + len(row)]
        pos += len(row)
        sequence = [row_results[0]]
        for res in row_results[1:]:
            sequence.extend(_refine(solve, sequence[-1], res, step, 0, tol.max_halvings))
        _link(sequence, result.branches, step)
        sequences.append(sequence)
        result.a_sheets.extend(res.a for res in sequence if res.a_sheet)

    candidates = []
    for a0, b0, va, ub in vacuum_double_points(hd, window, cutoff - tol.cutoff_margin):
        keep = (numpy.array([mode_index(hd.N, *ub), hd.M + mode_index(hd.N, *va)]),) * 2
        candidates.append((a0, b0, keep, "vacuum_double_point"))
    for sequence in sequences:
        for res in sequence:
            for i in range(len(res.roots)):
                for j in range(i + 1, len(res.roots)):
                    if abs(res.roots[i] - res.roots[j]) < collision_tol:
                        candidates.append((res.a, (res.roots[i] + res.roots[j]) / 2, None,
                                           "branch_approach"))

    accepted = []
    for a0, b0, keep, source in candidates:
        if any(abs(a0 - a1) + abs(b0 - b1) < collision_tol for a1, b1 in accepted):
            continue
        accepted.append((a0, b0))
        if keep is None:
            keep = _approach_keep(hd, a0, b0)
        radius = max(collision_tol / 4, 1e-4)
        result.collisions.append(classify_collision(hd, a0, b0, keep, radius, tol, source))
    LOGGER.info("Traced {} branches, {} a-sheets, {} collisions".format(
        len(result.branches), len(result.a_sheets), len(result.collisions)))
    return result


# -- Comparisons and reports ---------------------------------------------------

def matching_distance(first, second, cutoff, margin):
    """
    Symmetric distance between two root sets, ignoring roots within margin
    of the cutoff circle on the side they are measured from.
    """
    def one_side(src, dst):
        worst = 0.0
        for x in src:
            if abs(x) > cutoff - margin:
                continue
            if not dst:
                return float("inf")
            worst = max(worst, min(abs(x - y) for y in dst))
        return worst
    return max(one_side(first, second), one_side(second, first))


def vacuum_compare(hd, annuli, cutoff=None, tolerances=None, n_radial=3, n_angle=16, threads=1):
    """
    Distance between the spectrum of hd and the spectrum of its vacuum
    over annuli ``r_lo <= |a| <= r_hi`` of the a-plane.

    Roots of hd are measured against the whole vacuum variety (horizontal
    and vertical sheets), vacuum roots against the roots of hd over the
    same a.

    :param annuli: list of (r_lo, r_hi)
    :returns: list of dicts with keys r_lo, r_hi, max, mean, samples
    """
    tol = tolerances or SpectrumTolerances()
    cutoff = config.get_float('cutoff') if cutoff is None else float(cutoff)
    vacuum = hd.vacuum()
    _, _, ep, epp = mode_arrays(hd)
    avac = hd.alpha - ep
    bvac = hd.alpha.conjugate() - epp
    inner = cutoff - tol.cutoff_margin

    def distance_at(a):
        res = fiber_roots(hd, a, cutoff, tol)
        vac = fiber_roots(vacuum, a, cutoff, tol)
        if res.a_sheet or vac.a_sheet:
            return None
        worst = 0.0
        dist_a = float(numpy.min(numpy.abs(a - avac)))
        for b in res.roots:
            if abs(b) <= inner:
                worst = max(worst, min(float(numpy.min(numpy.abs(b - bvac))), dist_a))
        for b in vac.roots:
            if abs(b) <= inner and res.roots:
                worst = max(worst, min(abs(b - x) for x in res.roots))
        return worst

    report = []
    for r_lo, r_hi in annuli:
        points = []
        for k in range(n_radial):
            radius = r_lo + (r_hi - r_lo) * (k + 0.5) / n_radial
            for j in range(n_angle):
                angle = 2 * math.pi * (j + 0.5) / n_angle
                points.append(radius * complex(math.cos(angle), math.sin(angle)))
        dists = [d for d in parallel_map(distance_at, points, threads) if d is not None]
        report.append({"r_lo": r_lo, "r_hi": r_hi,
                       "max": max(dists) if dists else 0.0,
                       "mean": float(numpy.mean(dists)) if dists else 0.0,
                       "samples": len(dists)})
    return report


def rho_closure(hd, samples, cutoff=None, tolerances=None):
    """
    Largest distance from ``(conj b, conj a)`` to the spectrum, over samples
    (a, b) of the spectrum.
    """
    tol = tolerances or SpectrumTolerances()
    cutoff = config.get_float('cutoff') if cutoff is None else float(cutoff)
    worst = 0.0
    for a, b in samples:
        target = complex(a).conjugate()
        res = fiber_roots(hd, complex(b).conjugate(), max(cutoff, abs(target) + tol.cutoff_margin), tol)
        if res.a_sheet:
            continue
        if not res.roots:
            return float("inf")
        worst = max(worst, min(abs(x - target) for x in res.roots))
    return worst


def quaternionic_spectrum(lat, omegas, tol=1e-8):
    """
    Representatives of the spectrum points modulo the dual lattice and the
    real structure.
    """
    reps = []
    for omega in omegas:
        first = reduce_mod_dual(lat, omega)
        second = reduce_mod_dual(lat, rho_conjugate(omega))
        rep = max(first, second, key=lambda form: tuple(form.as_vector()))
        if not any(rep.isclose(other, tol) for other in reps):
            reps.append(rep)
    return reps


def truncation_convergence(hd, a_values, cutoff, extra=2, tolerances=None):
    """
    Largest matching distance between fibers at truncation N and N+extra.
    """
    tol = tolerances or SpectrumTolerances()
    wider = hd.with_truncation(hd.N + extra)
    worst = 0.0
    for a in a_values:
        first = fiber_roots(hd, a, cutoff + tol.cutoff_margin, tol)
        second = fiber_roots(wider, a, cutoff + tol.cutoff_margin, tol)
        if first.a_sheet or second.a_sheet:
            continue
        worst = max(worst, matching_distance(first.roots, second.roots,
                                             cutoff + tol.cutoff_margin, tol.cutoff_margin))
    return worst
