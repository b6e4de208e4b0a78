"""
Writers for the artifacts of the command line tools.

All writers return the bytes they wrote, so callers can digest an
artifact without reading it back.
"""

import csv
import io
import json

import numpy

from ..holo import assemble, sigma_min
from ..torus import HarmonicForm
from . import format_float

SPECTRUM_COLUMNS = ["re_a", "im_a", "re_b", "im_b", "sigma_min", "branch_id", "flag"]


def _write_bytes(path, data):
    with open(path, 'wb') as fobj:
        fobj.write(data)
    return data


def dumps_json(doc):
    """
    Serialize a document deterministically: sorted keys, two space indent,
    UTF-8, trailing newline.
    """
    return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def write_json(path, doc):
    return _write_bytes(path, dumps_json(doc))


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, numpy.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, numpy.integer)):
        return str(int(value))
    if isinstance(value, (float, numpy.floating)):
        return format_float(value)
    return str(value)


def dumps_csv(header, rows):
    """
    Serialize rows under a header with floats at 17 significant digits.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
    return buf.getvalue().encode("utf-8")


def write_csv(path, header, rows):
    return _write_bytes(path, dumps_csv(header, rows))


def spectrum_rows(branch_set, hd):
    """
    CSV rows of a traced spectrum: one row per traced point, then one row
    per a-sheet and one per collision.

    :param BranchSet branch_set: The traced spectrum
    :param HoloData hd: The structure it was traced for; sigma_min is the
        smallest singular value of its operator at each traced point
    """
    rows = []
    for a, b, _, branch_id in branch_set.samples():
        smin = sigma_min(assemble(hd, HarmonicForm(a, b)))
        rows.append([a.real, a.imag, b.real, b.imag, smin, branch_id, "root"])
    for a in branch_set.a_sheets:
        rows.append([a.real, a.imag, None, None, None, -1, "a_sheet"])
    for col in branch_set.collisions:
        rows.append([col.a.real, col.a.imag, col.b.real, col.b.imag, None, -1, col.kind])
    return rows


def project(values, drop_axis=3):
    """
    Project quaternion (R^4) values to R^3 by dropping one coordinate.
    """
    if drop_axis not in (0, 1, 2, 3):
        raise ValueError("drop_axis must be 0, 1, 2 or 3, got {}".format(drop_axis))
    keep = [axis for axis in range(4) if axis != drop_axis]
    return numpy.asarray(values, dtype=float)[..., keep]


def torus_faces(nx, ny):
    """
    Triangles of the periodic grid, two per cell, 0-based vertex indices.
    """
    faces = []
    for i in range(nx):
        for j in range(ny):
            p00 = i * ny + j
            p10 = ((i + 1) % nx) * ny + j
            p11 = ((i + 1) % nx) * ny + (j + 1) % ny
            p01 = i * ny + (j + 1) % ny
            faces.append((p00, p10, p11))
            faces.append((p00, p11, p01))
    return faces


def write_obj(path, points, comment=None):
    """
    Write a periodic grid of R^3 points (nx, ny, 3) as a triangulated OBJ
    mesh.
    """
    points = numpy.asarray(points, dtype=float)
    nx, ny = points.shape[0], points.shape[1]
    lines = []
    if comment:
        lines.append("# {}".format(comment))
    for vertex in points.reshape(-1, 3):
        lines.append("v {} {} {}".format(*[format_float(x) for x in vertex]))
    for face in torus_faces(nx, ny):
        lines.append("f {} {} {}".format(face[0] + 1, face[1] + 1, face[2] + 1))
    return _write_bytes(path, ("\n".join(lines) + "\n").encode("utf-8"))
