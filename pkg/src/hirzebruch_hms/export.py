"""Structured export of category data as a JSON document.

Schema (all keys always present, lists possibly empty)::

    {
      "schema": "hirzebruch-hms/1",
      "model": {"k": int, "C1": float, "C2": float},
      "generators": [ {"source": [a, b], "target": [a, b],
                       "generators": [GEN, ...], "rejected": [REJ, ...]} ],
      "m1": [ {"source": [a, b], "target": [a, b],
               "entries": [{"from": KEY, "to": KEY, "coefficient": float}]} ],
      "m2": [ {"triple": [L1, L2, L3], "first": [i1, i2], "second": [i1, i2],
               "target": [i1, i2], "coefficient": float, "product": float} ],
      "verification": null | {"c": int, "tol": float, "passed": bool,
                              "worst_residual": float, "failures": [str]}
    }

    GEN = {"index": [i1, i2], "ordinal": int, "kind": str, "points": [[x1, x2], ...],
           "stratum": str, "degree": int, "normalized": bool, "constant": float}
    REJ = {"index": [i1, i2], "kind": str, "points": [...], "degree": int | null,
           "reason": "M1" | "M2" | "vertex"}
    KEY = [i1, i2, ordinal]

Floats are written with Python's shortest round-trip repr, so loading a
document gives back bit-identical values.
"""

from __future__ import annotations

import json

from .geometry import HirzebruchModel
from .morse import HomSpace

SCHEMA = "hirzebruch-hms/1"


def _pts(points):
    return [[float(x), float(y)] for x, y in points]


def model_section(model: HirzebruchModel) -> dict:
    return {"k": model.k, "C1": float(model.C1), "C2": float(model.C2)}


def hom_section(hom: HomSpace) -> dict:
    gens = [
        {
            "index": list(g.index),
            "ordinal": g.ordinal,
            "kind": g.geometry.kind,
            "points": _pts(g.geometry.points),
            "stratum": g.geometry.stratum,
            "degree": g.degree,
            "normalized": g.potential.normalized,
            "constant": float(g.potential.const),
        }
        for g in hom.generators
    ]
    rej = [
        {
            "index": list(r.index),
            "kind": r.geometry.kind,
            "points": _pts(r.geometry.points),
            "degree": r.degree,
            "reason": r.reason,
        }
        for r in hom.rejected
    ]
    return {
        "source": list(hom.source),
        "target": list(hom.target),
        "generators": gens,
        "rejected": rej,
    }


def m1_section(result) -> dict:
    return {
        "source": list(result.hom.source),
        "target": list(result.hom.target),
        "entries": [
            {"from": list(src), "to": list(tgt), "coefficient": float(v)}
            for (src, tgt), v in sorted(result.coefficients.items())
        ],
    }


def m2_entry(triple, row) -> dict:
    return {
        "triple": [list(L) for L in triple],
        "first": list(row.first),
        "second": list(row.second),
        "target": list(row.target),
        "coefficient": float(row.morse),
        "product": float(row.sheaf),
    }


def verification_section(report) -> dict:
    return {
        "c": report.c,
        "tol": float(report.tol),
        "passed": report.passed,
        "worst_residual": float(report.worst_residual),
        "failures": report.failures(),
    }


def category_export(model, homs=(), m1_results=(), m2_rows=(), report=None) -> dict:
    return {
        "schema": SCHEMA,
        "model": model_section(model),
        "generators": [hom_section(h) for h in homs],
        "m1": [m1_section(r) for r in m1_results],
        "m2": list(m2_rows),
        "verification": None if report is None else verification_section(report),
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def loads(text: str) -> dict:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unknown schema {doc.get('schema')!r}")
    return doc
