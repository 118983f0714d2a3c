"""JSON ensemble files.

Layout::

    {"dim": 2,
     "hypotheses": [{"label": "H1", "weight": 0.5,
                     "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}]}

Complex entries are ``[re, im]`` pairs. With ``weight`` present the matrix
is a unit-trace state and the hypothesis is ``weight * matrix``; without it
the matrix is the PSD hypothesis itself.
"""

import json
import math

import numpy as np

from . import matops
from .ensemble import Ensemble
from .errors import DomainError, PreconditionError

SCHEMA_VERSION = "1"


class ParseError(PreconditionError):
    """Malformed ensemble document."""


def _entry(z, where):
    if not (isinstance(z, (list, tuple)) and len(z) == 2):
        raise ParseError(f"{where}: complex entries must be [re, im] pairs")
    try:
        re, im = float(z[0]), float(z[1])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: non-numeric entry") from exc
    if not (math.isfinite(re) and math.isfinite(im)):
        raise ParseError(f"{where}: non-finite entry")
    return complex(re, im)


def _matrix(rows, dim, where):
    if not isinstance(rows, list) or len(rows) != dim:
        raise ParseError(f"{where}: expected {dim} rows")
    out = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{where}: row {i} must have {dim} entries")
        for j, z in enumerate(row):
            out[i, j] = _entry(z, f"{where}[{i}][{j}]")
    return out


def parse_ensemble(doc):
    """Build an ``Ensemble`` from a decoded JSON document.

    Raises ``ParseError`` for structural problems and ``DomainError`` when a
    hypothesis fails the PSD gate.
    """
    if not isinstance(doc, dict):
        raise ParseError("ensemble document must be a JSON object")
    dim = doc.get("dim")
    hyps = doc.get("hypotheses")
    if not isinstance(dim, int) or dim < 1:
        raise ParseError("'dim' must be a positive integer")
    if not isinstance(hyps, list) or not hyps:
        raise ParseError("'hypotheses' must be a non-empty list")
    ops, labels = [], []
    for k, h in enumerate(hyps):
        where = f"hypotheses[{k}]"
        if not isinstance(h, dict) or "matrix" not in h:
            raise ParseError(f"{where}: missing 'matrix'")
        m = _matrix(h["matrix"], dim, where)
        try:
            m = matops.hermitian(m)
        except PreconditionError as exc:
            raise ParseError(f"{where}: {exc}") from exc
        if "weight" in h and h["weight"] is not None:
            try:
                w = float(h["weight"])
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{where}: weight must be a number") from exc
            if not math.isfinite(w) or w < 0:
                raise DomainError(f"{where}: weight must be non-negative", min_eigenvalue=w)
            m = w * m
        matops.check_psd(m, where)
        ops.append(m)
        labels.append(str(h.get("label", f"H{k + 1}")))
    return Ensemble(tuple(ops), tuple(labels))


def load_ensemble(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return parse_ensemble(doc)


def _num(x):
    # 17 significant digits round-trip every double exactly
    return float(f"{x:.17g}")


def ensemble_to_doc(ens):
    """Serialize with the weights absorbed (no ``weight`` field)."""
    return {
        "dim": ens.dim,
        "hypotheses": [
            {"label": lab,
             "matrix": [[[_num(z.real), _num(z.imag)] for z in row] for row in a]}
            for lab, a in zip(ens.labels, ens.hypotheses)
        ],
    }


def dumps(obj):
    """Deterministic JSON text: sorted keys, ``repr``-exact floats."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def ensemble_json(ens):
    return dumps(ensemble_to_doc(ens))
