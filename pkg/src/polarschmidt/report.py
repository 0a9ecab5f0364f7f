"""
JSON analysis reports.

Reports are plain dicts serialized with sorted keys and a fixed indent, so
the same input, flags and seeds always give the same bytes.  Floats are
written in Python's shortest round-trip form.  Every report carries the
schema version it conforms to; the schema ships as package data.
"""

from __future__ import annotations

import hashlib
import json
import math
from importlib import resources

import numpy as np

from . import __version__
from .bipartite import degeneracy_report, entanglement_entropy, schmidt_decompose
from .multipartite import counting_for_dims, generalized_schmidt_test, product_test
from .states import Bipartition, PureState

SCHEMA_VERSION = "1.0"
SCHEMA_FILE = "report-v1.schema.json"


def load_schema() -> dict:
    text = resources.files("polarschmidt").joinpath("schemas", SCHEMA_FILE).read_text()
    return json.loads(text)


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _num(x) -> float:
    # fold -0.0 so identical results always print identically
    return float(x) + 0.0


def _vec(v) -> list:
    return [[_num(z.real), _num(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


def _columns(m) -> list:
    return [_vec(m[:, k]) for k in range(m.shape[1])]


def _witness(w) -> dict | None:
    if w is None:
        return None
    return {
        "kind": w.kind,
        "left": list(w.left),
        "right": list(w.right),
        "rank": int(w.rank),
        "weight_index": w.weight_index,
    }


def _envelope(command, raw: bytes, state: PureState, tolerances: dict, seeds, result: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "input_digest": digest(raw),
        "dims": list(state.dims),
        "tolerances": {k: _num(v) for k, v in tolerances.items()},
        "seeds": [int(s) for s in seeds],
        "result": result,
    }


def decompose_report(raw: bytes, state: PureState, split: Bipartition, tol: float, deg_tol: float) -> dict:
    d = schmidt_decompose(state, split, tol=tol, deg_tol=deg_tol)
    deg = degeneracy_report(d)
    nats = entanglement_entropy(d)
    canonical = [len(g) == 1 for g in d.groups for _ in g]
    result = {
        "kind": "bipartite",
        "split": {"left": list(split.left), "right": list(split.right)},
        "weights": [_num(w) for w in d.weights],
        "schmidt_rank": d.rank,
        "entropy_nats": _num(nats),
        "entropy_bits": _num(nats / math.log(2)),
        "degeneracy": {
            "groups": [list(g) for g in deg.groups],
            "sizes": list(deg.sizes),
            "unique": deg.unique,
            "basis": deg.basis,
            "note": deg.note,
        },
        "zero_space": {"left_dim": d.left_zero_dim, "right_dim": d.right_zero_dim},
        "left_vectors": _columns(d.left_vectors),
        "right_vectors": _columns(d.right_vectors),
        "vector_is_canonical": canonical,
    }
    return _envelope("decompose", raw, state, {"rank_tol": tol, "deg_tol": deg_tol}, [], result)


def schmidt_test_report(raw: bytes, state: PureState, tol: float, deg_tol: float, seeds) -> tuple[dict, str]:
    r = generalized_schmidt_test(state, tol=tol, seeds=seeds, deg_tol=deg_tol)
    result = {
        "kind": "generalized_schmidt",
        "verdict": r.verdict,
        "route": r.route,
        "weights": None if r.weights is None else [_num(w) for w in r.weights],
        "party_bases": None if r.party_bases is None else [_columns(b) for b in r.party_bases],
        "residual": None if r.residual is None else _num(r.residual),
        "witness": _witness(r.witness),
    }
    report = _envelope("schmidt-test", raw, state, {"tol": tol, "deg_tol": deg_tol}, r.seeds_used, result)
    return report, r.verdict


def product_test_report(raw: bytes, state: PureState, tol: float) -> tuple[dict, str]:
    r = product_test(state, tol)
    c = counting_for_dims(state.dims)
    result = {
        "kind": "product",
        "verdict": r.verdict,
        "factors": None if r.factors is None else [_vec(f) for f in r.factors],
        "residual": None if r.residual is None else _num(r.residual),
        "witness": _witness(r.witness),
        "counting": {
            "unknowns": c.unknowns,
            "equations": c.equations,
            "overdetermined": c.overdetermined,
            "dim": c.dim,
            "parties": c.parties,
        },
    }
    return _envelope("product-test", raw, state, {"tol": tol}, [], result), r.verdict


def dumps(report: dict) -> str:
    """Canonical text of a report; raises ValueError on non-finite numbers."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
