"""
The acceptance criteria as an executable suite.

Each criterion computes one measured value, compares it with its bound and
returns a :class:`CriterionResult`.  Criteria never raise for numerical
failures: a :class:`~quatspec.utils.errors.QuatSpecException` is recorded
as a failed criterion with its message.
"""

import logging
import math
import types
from dataclasses import dataclass, field

import numpy

from . import darboux, immersion, oracle
from .holo import HoloData, assemble, from_model, singular_values, willmore_energy
from .spectrum import (ScanWindow, SpectrumTolerances, fiber_roots, kernel_at, matching_distance,
                       rho_closure, scan, truncation_convergence)
from .torus import HarmonicForm, Lattice, grid_points
from .utils import sha256_hex
from .utils.errors import QuatSpecException
from .utils.export import SPECTRUM_COLUMNS, dumps_csv, dumps_json, spectrum_rows

LOGGER = logging.getLogger("quatspec")


@dataclass
class SuiteContext:
    """
    Settings shared by all criteria of one verify run.
    """
    truncation: int = 8
    grid: tuple = (64, 64)
    cutoff: float = 2.0
    draws: int = 20
    seed: int = 20240917
    threads: int = 1
    tolerances: dict = field(default_factory=dict)

    def spectrum_tolerances(self):
        return SpectrumTolerances.from_table(self.tolerances)

    def rng(self, offset=0):
        return numpy.random.default_rng(self.seed + offset)


@dataclass
class CriterionResult:
    name: str
    value: float
    bound: float
    passed: bool
    detail: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "value": self.value, "bound": self.bound,
                "passed": bool(self.passed), "detail": self.detail}


def _square():
    return Lattice.square()


def _random_as(rng, count, lo=-1.0, hi=1.0):
    return [complex(x, y) for x, y in rng.uniform(lo, hi, size=(count, 2))]


def vacuum_oracle(ctx):
    """
    Engine fibers of the vacuum agree with the closed form roots.
    """
    lat = _square()
    hd = HoloData(lat, 0j, {}, ctx.truncation)
    model = oracle.HomogeneousModel(lat)
    tol = ctx.spectrum_tolerances()
    worst, skipped = 0.0, 0
    for a in _random_as(ctx.rng(1), 21):
        res = fiber_roots(hd, a, ctx.cutoff, tol)
        expected = oracle.vacuum_fiber(model, a, ctx.cutoff)
        if res.a_sheet or expected.a_sheet:
            skipped += 1
            continue
        worst = max(worst, matching_distance(res.roots, expected.roots, ctx.cutoff, tol.cutoff_margin))
    return CriterionResult("vacuum_oracle", worst, 1e-10, worst <= 1e-10, {"skipped": skipped})


def homogeneous_oracle(ctx):
    """
    Engine fibers of random constant potentials agree with the closed form.
    """
    rng = ctx.rng(2)
    tol = ctx.spectrum_tolerances()
    worst = 0.0
    for _ in range(ctx.draws):
        tau = complex(rng.uniform(-0.3, 0.3), rng.uniform(0.9, 1.3))
        lat = Lattice(2 * math.pi, 2 * math.pi * tau)
        c = rng.uniform(0.05, 0.5) * numpy.exp(2j * math.pi * rng.uniform())
        a = complex(*rng.uniform(-1.0, 1.0, size=2))
        res = fiber_roots(from_model(lat, c, N=ctx.truncation), a, ctx.cutoff, tol)
        expected = oracle.homogeneous_fiber(oracle.HomogeneousModel(lat, c), a, ctx.cutoff)
        worst = max(worst, matching_distance(res.roots, expected.roots, ctx.cutoff, tol.cutoff_margin))
    return CriterionResult("homogeneous_oracle", worst, 1e-8, worst <= 1e-8, {"draws": ctx.draws})


HANDLE_C = 0.3
HANDLE_TRUNCATION = 4


def handle_resolution(ctx):
    """
    A constant potential resolves the vacuum double point at the trivial
    representation into a handle.
    """
    lat = _square()
    window = ScanWindow(-0.25, 0.25, -0.25, 0.25)
    tol = ctx.spectrum_tolerances()
    # block diagonal per mode for constant potentials
    N = min(ctx.truncation, HANDLE_TRUNCATION)
    found = {}
    for label, c in (("vacuum", 0.0), ("constant", HANDLE_C)):
        branches = scan(from_model(lat, c, N=N), window, 5, ctx.cutoff, tol, ctx.threads)
        near = [col for col in branches.collisions if abs(col.a) + abs(col.b) < 0.25]
        found[label] = near
    vacuum_kinds = sorted(col.kind for col in found["vacuum"])
    constant = [col for col in found["constant"] if col.kind == "handle"]
    gap = max((col.gap for col in constant), default=0.0)
    passed = "double_point" in vacuum_kinds and bool(constant) and gap >= abs(HANDLE_C)
    return CriterionResult("handle_resolution", gap, abs(HANDLE_C), passed,
                           {"N": N, "vacuum_kinds": vacuum_kinds,
                            "constant_kinds": sorted(col.kind for col in found["constant"])})


def rho_symmetry(ctx):
    """
    Spectrum samples are closed under ``(a, b) -> (conj b, conj a)``.
    """
    lat = _square()
    hd = from_model(lat, 0.3, N=ctx.truncation)
    tol = ctx.spectrum_tolerances()
    samples = []
    for a in _random_as(ctx.rng(4), 6, -0.8, 0.8):
        for b in fiber_roots(hd, a, 1.0, tol).roots:
            samples.append((a, b))
    worst = rho_closure(hd, samples, ctx.cutoff, tol)
    return CriterionResult("rho_symmetry", worst, 1e-8, worst <= 1e-8, {"samples": len(samples)})


def clifford_willmore(ctx):
    """
    Classical Willmore energy of the Clifford torus and its difference to
    the bundle Willmore energy.
    """
    g = immersion.clifford(128, 128)
    classical = immersion.classical_willmore(g, "central")
    eh = immersion.extract_holo(g, ctx.truncation, "central")
    bundle = willmore_energy(eh.hd)
    target = 2 * math.pi ** 2
    rel = abs(classical - target) / target
    diff = abs(classical - bundle) / target
    passed = rel <= 0.01 and diff <= 0.02
    return CriterionResult("clifford_willmore", rel, 0.01, passed,
                           {"classical": classical, "bundle": bundle, "difference": diff})


def _clifford_holo(ctx, nx=None, scheme="central"):
    nx = nx or ctx.grid[0]
    g = immersion.clifford(nx, nx)
    return g, immersion.extract_holo(g, ctx.truncation, scheme)


def trivial_kernel(ctx):
    """
    The extracted Clifford structure has four small singular values at
    the trivial representation, then a gap.
    """
    _, eh = _clifford_holo(ctx, scheme="spectral")
    svals = singular_values(assemble(eh.hd, HarmonicForm()))
    tol = ctx.spectrum_tolerances()
    small = int(numpy.sum(svals < tol.kernel_tol * svals[0]))
    gap = float(svals[-5] / max(svals[-4], 1e-300))
    passed = small == 4 and gap >= 10.0
    return CriterionResult("trivial_kernel", small, 4, passed, {"gap": gap})


def generic_kernel(ctx):
    """
    Generic points of the constant potential spectrum have a one
    dimensional kernel.
    """
    hd = from_model(_square(), 0.3, N=ctx.truncation)
    tol = ctx.spectrum_tolerances()
    dims = []
    for a in _random_as(ctx.rng(7), 10, -0.9, 0.9):
        roots = fiber_roots(hd, a, 1.0, tol).roots
        if roots:
            dims.append(kernel_at(hd, HarmonicForm(a, roots[0]), tol).kernel_dim)
    value = max(dims) if dims else 0
    return CriterionResult("generic_kernel", value, 1, value == 1 and len(dims) == 10,
                           {"dims": dims})


def clifford_transform(ctx, nx, a, scheme="central"):
    """
    The Darboux transform of the Clifford torus at the spectrum point over
    a with the smallest ``|b|``.

    :returns: (ImmersionGrid, ExtractedHolo, DarbouxResult)
    """
    g, eh = _clifford_holo(ctx, nx, scheme)
    tol = ctx.spectrum_tolerances()
    roots = fiber_roots(eh.hd, a, ctx.cutoff, tol).roots
    if not roots:
        raise QuatSpecException("no spectrum point over a={}".format(a))
    b = min(roots, key=abs)
    sample = kernel_at(eh.hd, HarmonicForm(a, b), tol)
    ms = darboux.section_from_kernel(eh, sample, ctx.tolerances.get('cross_tol'))
    ps = darboux.prolong(g, ms)
    return g, eh, darboux.darboux_transform(g, ps, ctx.tolerances)


GENERIC_A = complex(0.7, 0.2)
SECOND_A = complex(-0.45, 0.6)


def _pipeline_residuals(ctx, nx):
    g, _, res = clifford_transform(ctx, nx, GENERIC_A)
    values = dict(res.residuals)
    values.update(darboux.verify_envelope(g, res))
    return values


def darboux_convergence(ctx):
    """
    Pipeline residuals shrink by a factor between 3 and 5 under grid
    doubling; the right envelope residual of the transform stays large.
    """
    coarse = _pipeline_residuals(ctx, 64)
    fine = _pipeline_residuals(ctx, 128)
    keys = ["prolongation", "conformality", "touch_f", "right_f", "left_sharp"]
    ratios = {}
    for key in keys:
        if fine[key] > 1e-10:
            ratios[key] = coarse[key] / fine[key]
    in_range = all(3.0 <= ratio <= 5.0 for ratio in ratios.values())
    worst = min(ratios.values()) if ratios else 0.0
    passed = in_range and fine["right_left_ratio"] >= 1e3
    return CriterionResult("darboux_convergence", worst, 3.0, passed,
                           {"ratios": ratios, "right_left_ratio": fine["right_left_ratio"]})


def willmore_isospectral(ctx):
    """
    A regular transform keeps the Willmore energy and the spectrum.
    """
    g, eh, res = clifford_transform(ctx, ctx.grid[0], GENERIC_A, "spectral")
    w = immersion.classical_willmore(g, "spectral")
    wsharp = immersion.classical_willmore(res.fsharp, "spectral")
    fiber_as = _random_as(ctx.rng(9), 5, -0.9, 0.9)
    report = darboux.isospectral_check(g, res, fiber_as, cutoff=1.0, tolerances=ctx.spectrum_tolerances())
    rel = abs(wsharp - w) / w
    passed = rel <= 0.02 and report["distance"] <= 1e-3
    return CriterionResult("willmore_isospectral", rel, 0.02, passed,
                           {"willmore": w, "willmore_sharp": wsharp, "distance": report["distance"],
                            "predicted": darboux.predicted_willmore(w, 0, 0)})


def _bianchi_residuals(ctx, nx):
    g, _, first = clifford_transform(ctx, nx, GENERIC_A)
    _, _, second = clifford_transform(ctx, nx, SECOND_A)
    return darboux.bianchi_compose(g, first.prolonged, second.prolonged).residuals


def bianchi(ctx):
    """
    The composition of two transforms is a transform of both, with
    residuals shrinking by a factor between 3 and 5 under grid doubling.
    """
    coarse = _bianchi_residuals(ctx, 64)
    fine = _bianchi_residuals(ctx, 128)
    ratios = {}
    for key in ("darboux_sharp", "darboux_flat"):
        if fine[key] > 1e-10:
            ratios[key] = coarse[key] / fine[key]
    in_range = all(3.0 <= ratio <= 5.0 for ratio in ratios.values())
    worst = min(ratios.values()) if ratios else 0.0
    passed = in_range and max(coarse["monodromy"], fine["monodromy"]) <= 1e-8
    return CriterionResult("bianchi", worst, 3.0, passed,
                           {"ratios": ratios, "coarse": dict(coarse), "fine": dict(fine)})


def pluecker(ctx):
    """
    Tabled bounds and vanishing orders of model sections.
    """
    table = [((2, 1, 0, 2), 8 * math.pi), ((1, 1, 0, 0), 0.0), ((1, 1, 0, 2), 8 * math.pi)]
    worst = max(abs(oracle.pluecker_bound(*args) - value) for args, value in table)
    lat = _square()
    z = grid_points(lat, 64, 64)
    base = numpy.sin(z.real) + 1j * numpy.sin(z.imag)
    orders = []
    for k in (1, 2):
        section = types.SimpleNamespace(lat=lat, u=base ** k, v=numpy.zeros_like(base),
                                        omega=HarmonicForm())
        orders.append(oracle.vanishing_order(section, (0, 0)))
    passed = worst <= 1e-12 and orders == [1, 2]
    return CriterionResult("pluecker", worst, 1e-12, passed, {"orders": orders})


def end_limit(ctx):
    """
    Transforms along an outward branch approach the immersion.
    """
    g, eh = _clifford_holo(ctx)
    samples = darboux.outward_samples(eh.hd, 0.75, 1.0, 0.5, 8, ctx.cutoff + 4.0,
                                      tolerances=ctx.spectrum_tolerances())
    family = darboux.family_map(g, eh, samples, ctx.threads, ctx.tolerances)
    fraction = family.decreasing_fraction()
    return CriterionResult("end_limit", fraction, 0.8, fraction >= 0.8,
                           {"distances": [m.distance for m in family.members]})


def truncation(ctx):
    """
    Fiber roots at N and N+2 agree for a slightly inhomogeneous potential.
    """
    hd = HoloData(_square(), 0j, {(0, 0): 0.3, (1, 0): 0.02}, ctx.truncation)
    a_values = _random_as(ctx.rng(12), 5, -0.9, 0.9)
    worst = truncation_convergence(hd, a_values, ctx.cutoff, 2, ctx.spectrum_tolerances())
    return CriterionResult("truncation", worst, 1e-8, worst <= 1e-8, {"N": ctx.truncation})


def _vacuum_csv(ctx):
    hd = HoloData(_square(), 0j, {}, ctx.truncation)
    branches = scan(hd, ScanWindow(0.1, 0.4, 0.15, 0.15), 4, ctx.cutoff,
                    ctx.spectrum_tolerances(), ctx.threads)
    return dumps_csv(SPECTRUM_COLUMNS, spectrum_rows(branches, hd))


def determinism(ctx):
    """
    Two identical spectrum runs produce identical bytes.
    """
    first = _vacuum_csv(ctx)
    second = _vacuum_csv(ctx)
    same = sha256_hex(first) == sha256_hex(second)
    return CriterionResult("determinism", 0.0 if same else 1.0, 0.0, same,
                           {"sha256": sha256_hex(first)}, {"determinism.csv": first})


CRITERIA = {
    "vacuum_oracle": vacuum_oracle,
    "homogeneous_oracle": homogeneous_oracle,
    "handle_resolution": handle_resolution,
    "rho_symmetry": rho_symmetry,
    "clifford_willmore": clifford_willmore,
    "trivial_kernel": trivial_kernel,
    "generic_kernel": generic_kernel,
    "darboux_convergence": darboux_convergence,
    "willmore_isospectral": willmore_isospectral,
    "bianchi": bianchi,
    "pluecker": pluecker,
    "end_limit": end_limit,
    "truncation": truncation,
    "determinism": determinism,
}


def run_criterion(name, ctx):
    """
    Run one criterion by name, recording library failures as a failed
    result.
    """
    func = CRITERIA[name]
    try:
        result = func(ctx)
    except QuatSpecException as exc:
        LOGGER.warning("Criterion {} failed with: {}".format(name, str(exc)))
        return CriterionResult(name, float("nan"), float("nan"), False, {"error": str(exc)})
    LOGGER.info("Criterion {}: value {} bound {} {}".format(
        name, result.value, result.bound, "pass" if result.passed else "FAIL"))
    return result


def run_suite(ctx, names=None):
    """
    Run the named criteria (all by default) in a fixed order.

    :returns: (report dict, artifacts dict of name to bytes)
    """
    names = list(CRITERIA) if names is None else list(names)
    unknown = [name for name in names if name not in CRITERIA]
    if unknown:
        raise ValueError("Unknown criteria: {}".format(", ".join(unknown)))
    results = [run_criterion(name, ctx) for name in names]
    artifacts = {}
    for result in results:
        artifacts.update(result.artifacts)
    report = {
        "criteria": [result.to_dict() for result in results],
        "passed": all(result.passed for result in results),
        "settings": {"truncation": ctx.truncation, "grid": list(ctx.grid), "cutoff": ctx.cutoff,
                     "draws": ctx.draws, "seed": ctx.seed},
        "artifacts": {name: sha256_hex(data) for name, data in sorted(artifacts.items())},
    }
    return report, artifacts


def report_digest(report):
    """
    SHA-256 of the serialized report.
    """
    return sha256_hex(dumps_json(report))
