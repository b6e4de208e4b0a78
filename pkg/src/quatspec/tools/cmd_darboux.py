"""
Darboux transforms of an immersion at selected points of its spectrum.
"""

import logging
import os

from ..darboux import family_map, outward_samples
from ..immersion import degree_estimate, embeddedness_check, extract_holo
from ..holo import willmore_energy
from ..spectrum import SpectrumTolerances, fiber_roots, kernel_at
from ..torus import HarmonicForm, rho_conjugate
from ..utils import complex_pair
from ..utils.config import as_complex
from ..utils.errors import InvalidConfig, NotOnSpectrum
from ..utils.export import write_json
from .sources import immersion_from_config

LOGGER = logging.getLogger("quatspec")


def _sample(hd, entry, cutoff, tol):
    """
    A spectrum sample from a config entry ``{"a": ..., "b": ...}``; without
    b the root of smallest modulus over a is taken.
    """
    if not isinstance(entry, dict) or 'a' not in entry:
        raise InvalidConfig("samples are objects with an 'a' and an optional 'b', got {!r}".format(entry))
    unknown = sorted(set(entry) - {'a', 'b'})
    if unknown:
        raise InvalidConfig("Unknown key '{}' in samples".format(unknown[0]))
    a = as_complex(entry['a'])
    if entry.get('b') is not None:
        return kernel_at(hd, HarmonicForm(a, as_complex(entry['b'])), tol)
    roots = fiber_roots(hd, a, cutoff, tol).roots
    if not roots:
        raise NotOnSpectrum("no spectrum point over a={} within |b| <= {}".format(a, cutoff))
    return kernel_at(hd, HarmonicForm(a, min(roots, key=abs)), tol)


def collect_samples(rc, hd, tol):
    """
    The spectrum samples a darboux run asks for, in report order.
    """
    samples = [_sample(hd, entry, rc.cutoff, tol) for entry in rc['samples']]
    branch = rc.get('branch')
    if branch is not None:
        hint = branch['b_hint']
        samples.extend(outward_samples(
            hd, as_complex(branch['a_start']), as_complex(branch['direction']),
            float(branch['step']), branch['count'], rc.cutoff + 4.0,
            as_complex(hint) if hint is not None else None, tol))
    if rc['rho_pairs']:
        samples.extend([kernel_at(hd, rho_conjugate(s.omega), tol) for s in list(samples)])
    return samples


def run(rc, out_dir):
    """
    Run the Darboux pipeline for every requested sample and write the
    meshes and the family report.

    :param RunConfig rc: The validated run configuration
    :param str out_dir: Directory for the artifacts
    :returns: exit code
    """
    g = immersion_from_config(rc)
    eh = extract_holo(g, rc.truncation, rc.derivative)
    tol = SpectrumTolerances.from_table(rc.tolerances())
    samples = collect_samples(rc, eh.hd, tol)
    if not samples:
        raise InvalidConfig("darboux needs at least one sample or a branch")

    family = family_map(g, eh, samples, rc.threads, rc.tolerances())

    output = rc['output']
    prefix = os.path.join(out_dir, output['mesh_prefix'])
    drop_axis = rc['drop_axis']
    g.write_obj("{}_f.obj".format(prefix), drop_axis, "immersion")
    doc = family.to_dict()
    for k, member in enumerate(family.members):
        entry = doc["members"][k]
        entry["kernel_dim"] = samples[k].kernel_dim
        if member.result is None or not member.result.is_regular():
            continue
        fsharp = member.result.fsharp
        path = "{}_{:03d}.obj".format(prefix, k)
        fsharp.write_obj(path, drop_axis, "darboux transform at {}".format(member.omega.to_list()))
        entry["mesh"] = os.path.basename(path)
        entry["embedded"] = embeddedness_check(fsharp).embedded

    doc["extraction"] = {
        "alpha": complex_pair(eh.hd.alpha),
        "modes": len(eh.hd.qcoeffs),
        "willmore_bundle": willmore_energy(eh.hd),
        "degree_estimate": degree_estimate(g, eh, eh.scheme),
        "reconstruction_residual": eh.reconstruction_residual,
        "truncation_loss": eh.truncation_loss,
        "frame_reference": eh.reference.as_array().tolist(),
        "scheme": eh.scheme,
    }
    write_json(os.path.join(out_dir, output['family_json']), doc)
    failed = sum(1 for member in family.members if member.error is not None)
    LOGGER.info("Computed {} family members ({} failed)".format(len(family.members), failed))
    return 0
