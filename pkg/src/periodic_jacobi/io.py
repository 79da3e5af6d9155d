"""Operator documents (JSON in), analysis documents (JSON out), sample tables (CSV out).

Floats are written with 17 significant digits so every float64 survives a
round trip; the output is deterministic (fixed key order, no timestamps
unless asked for).
"""
from __future__ import annotations

import io
import json
import math
import os
import tempfile
from datetime import datetime, timezone

import numpy as np

from .bounds import BoundsReport, certify
from .core import PeriodicJacobi, make_jacobi
from .errors import ValidationError
from .quasimomentum import (
    boundary_samples,
    build_model,
    dirichlet_integral_1,
    dirichlet_integral_2,
    herglotz_k,
    k_complex,
    trace_moment_check,
    vertical_identity_check,
)
from .spectrum import band_edges, bloch_oracle, hausdorff_band_distance

__all__ = [
    "parse_operator",
    "load_operator",
    "operator_document",
    "dumps",
    "write_atomic",
    "add_stamp",
    "bounds_document",
    "analysis_document",
    "sample_table",
    "oracle_document",
    "trace_document",
]

OPERATOR_FIELDS = {"q", "a", "b", "label"}


def parse_operator(text: str):
    """Parse a JSON operator document into (PeriodicJacobi, label)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed operator document: {exc}") from None
    if not isinstance(doc, dict):
        raise ValidationError("operator document must be a JSON object")
    unknown = set(doc) - OPERATOR_FIELDS
    if unknown:
        raise ValidationError(f"unknown fields: {sorted(unknown)}")
    missing = {"q", "a", "b"} - set(doc)
    if missing:
        raise ValidationError(f"missing fields: {sorted(missing)}")
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise ValidationError("label must be a string")
    for key in ("a", "b"):
        if not isinstance(doc[key], list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in doc[key]):
            raise ValidationError(f"field {key!r} must be a list of numbers")
    if not isinstance(doc["q"], int) or isinstance(doc["q"], bool):
        raise ValidationError("field 'q' must be an integer")
    return make_jacobi(doc["q"], doc["a"], doc["b"]), label


def load_operator(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return parse_operator(text)


def operator_document(J: PeriodicJacobi, label=None) -> dict:
    doc = {"q": J.q, "a": J.a.tolist(), "b": J.b.tolist()}
    if label is not None:
        doc["label"] = label
    return doc


def _fmt(value):
    if isinstance(value, (bool, np.bool_)) or value is None:
        return json.dumps(None if value is None else bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return "null"
        text = format(v, ".17g")
        # keep floats recognisable as floats after a round trip
        return text if any(ch in text for ch in ".en") else text + ".0"
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _dump(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        for i, (key, val) in enumerate(obj.items()):
            out.write(f"{pad}{json.dumps(str(key))}: ")
            _dump(val, indent, level + 1, out)
            out.write(",\n" if i < len(obj) - 1 else "\n")
        out.write(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = obj.tolist() if isinstance(obj, np.ndarray) else list(obj)
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items):
            out.write("[" + ", ".join(_fmt(v) for v in items) + "]")
            return
        out.write("[\n")
        for i, val in enumerate(items):
            out.write(pad)
            _dump(val, indent, level + 1, out)
            out.write(",\n" if i < len(items) - 1 else "\n")
        out.write(end + "]")
    else:
        out.write(_fmt(obj))


def dumps(obj, indent=2) -> str:
    """Deterministic JSON with 17 significant digits per float; NaN becomes null."""
    buf = io.StringIO()
    _dump(obj, indent, 0, buf)
    buf.write("\n")
    return buf.getvalue()


def write_atomic(path, text: str):
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def add_stamp(doc, stamp):
    if stamp:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat()
    return doc


def bounds_document(report: BoundsReport) -> dict:
    return {
        "summary": {
            "q": report.q, "c": report.c, "A": report.A, "h_plus": report.h_plus,
            "trace_L": report.trace_L, "trace_L2": report.trace_L2,
            "trace_L2_input": report.trace_L2_input, "shift": report.shift,
            "degenerate": report.degenerate,
        },
        "records": [
            {"name": r.name, "lhs": r.lhs, "rhs": r.rhs, "relation": r.relation,
             "satisfied": r.satisfied, "margin": r.margin, "degenerate": r.degenerate,
             "note": r.note}
            for r in report.records
        ],
    }


HERGLOTZ_POINTS = np.array([x + 1j * y for y in (0.25, 1.0) for x in np.linspace(0.2, np.pi - 0.2, 5)])


def analysis_document(J: PeriodicJacobi, label=None, *, skip_dirichlet=False,
                      skip_herglotz=False, ymax=12.0, edge_tol=None, stamp=False) -> dict:
    """Full pipeline: normalise, bands, quasimomentum, certificate, verifiers."""
    M = build_model(J, edge_tol=edge_tol)
    B = M.bands
    report = certify(J, M)
    moments = [trace_moment_check(M, n) for n in range(min(4, 2 * M.q - 1) + 1)]
    verification = {
        "trace_moments": [
            {"n": t.n, "lhs": t.lhs, "rhs": t.rhs, "residual": t.residual} for t in moments
        ],
    }
    if not skip_dirichlet:
        for key, fn in (("dirichlet_1", dirichlet_integral_1), ("dirichlet_2", dirichlet_integral_2)):
            r = fn(M, ymax=ymax)
            verification[key] = {"integral": r.integral, "expected": r.expected,
                                 "residual": r.residual, "tail": r.tail}
    vi = vertical_identity_check(M)
    verification["vertical_identity"] = {"lhs": vi.lhs, "rhs": vi.rhs, "residual": vi.residual}
    if not skip_herglotz:
        diff = np.abs(herglotz_k(M, HERGLOTZ_POINTS) - k_complex(M, HERGLOTZ_POINTS))
        verification["herglotz"] = {"points": len(HERGLOTZ_POINTS), "max_difference": float(diff.max())}
    doc = {
        "input": operator_document(J, label),
        "shift": B.shift,
        "c": B.c,
        "A": B.A,
        "edges": B.edges,
        "bands": B.bands,
        "gaps": B.gaps,
        "closed_gaps": B.closed.tolist(),
        "z_gaps": M.zgaps.gaps,
        "h": M.h,
        "Q": M.Q,
        "bounds": bounds_document(report),
        "verification": verification,
    }
    return add_stamp(doc, stamp)


def sample_table(J: PeriodicJacobi, n_points: int, edge_tol=None) -> str:
    """CSV (header x,lambda,D,u,v) of boundary values on a uniform x grid."""
    M = build_model(J, edge_tol=edge_tol)
    s = boundary_samples(M, n_points)
    lines = ["x,lambda,D,u,v"]
    for row in zip(s.x, s.lam, s.D, s.u, s.v):
        lines.append(",".join(format(float(v), ".17g") for v in row))
    return "\n".join(lines) + "\n"


def oracle_document(J: PeriodicJacobi, n_theta: int, edge_tol=None) -> dict:
    B = band_edges(J, edge_tol=edge_tol)
    O = bloch_oracle(J, n_theta)
    dist = hausdorff_band_distance(O.bands, B.bands)
    return {
        "n_theta": n_theta,
        "c": B.c,
        "band_edges": B.bands,
        "oracle_bands": O.bands,
        "hausdorff": dist,
        "max_distance": float(dist.max()),
        "threshold": 1e-3 * B.c,
        "passed": bool(dist.max() <= 1e-3 * B.c),
    }


def trace_document(J: PeriodicJacobi, n: int, edge_tol=None) -> dict:
    M = build_model(J, edge_tol=edge_tol)
    t = trace_moment_check(M, n)
    return {"n": n, "lhs": t.lhs, "rhs": t.rhs, "residual": t.residual}
