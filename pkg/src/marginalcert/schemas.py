"""Versioned JSON formats for boxes, correlator tables, membership reports
and certificates.

box.v1
    {"format": "box.v1", "parties": 3, "probabilities": [p_0, ..., p_63]}
    with probabilities[32x + 16y + 8z + 4a + 2b + c] = P(abc|xyz), where
    a, b, c are outcome indices (0 for outcome -1, 1 for outcome +1): the
    inputs are the slow axes and the outcomes the fast ones.

correlators.v1
    {"format": "correlators.v1", "singles": 3x2, "doubles": 3x2x2,
     "triples": 2x2x2 or null}
    singles rows are parties (A, B, C); doubles slabs are the pairs
    (AB, AC, BC) indexed by the two parties' inputs; triples is indexed
    by (x, y, z).  A null triples entry carries marginal data only.

membership.v1
    {"format": "membership.v1", "member": bool, "weights": [...] | null,
     "certificate": [...] | null, "residual": float}

certificate.v1
    {"format": "certificate.v1", "kind": "dual-sdp" | "primal-state" |
     "lp-farkas", "n": int, "p_star": float, "p_sep": float,
     "residuals": {...}, "matrices": [{"name": str, "dim": int,
     "entries": [[re, im], ...]}]}   (entries row-major)
"""

from __future__ import annotations

import numpy as np

from .boxes import CorrelatorTable, TripartiteBox
from .polytopes import MembershipReport


class SchemaError(ValueError):
    """Raised when a JSON payload does not match its declared format."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SchemaError(msg)


def box_to_json(box: TripartiteBox) -> dict:
    probs = np.transpose(box.p, (3, 4, 5, 0, 1, 2)).ravel()
    return {"format": "box.v1", "parties": 3, "probabilities": [float(v) for v in probs]}


def box_from_json(data: dict) -> TripartiteBox:
    _require(isinstance(data, dict), "box payload must be an object")
    _require(data.get("format") == "box.v1", "expected format box.v1")
    _require(data.get("parties") == 3, "box.v1 carries exactly 3 parties")
    probs = data.get("probabilities")
    _require(isinstance(probs, list) and len(probs) == 64, "probabilities must be a list of 64 floats")
    arr = np.asarray(probs, dtype=float)
    _require(bool(np.all(np.isfinite(arr))), "probabilities must be finite")
    p = np.transpose(arr.reshape(2, 2, 2, 2, 2, 2), (3, 4, 5, 0, 1, 2))
    return TripartiteBox(p=p.copy())


def correlators_to_json(table: CorrelatorTable) -> dict:
    return {
        "format": "correlators.v1",
        "singles": table.singles.tolist(),
        "doubles": table.doubles.tolist(),
        "triples": None if table.triples is None else table.triples.tolist(),
    }


def correlators_from_json(data: dict) -> CorrelatorTable:
    _require(isinstance(data, dict), "correlators payload must be an object")
    _require(data.get("format") == "correlators.v1", "expected format correlators.v1")
    try:
        singles = np.asarray(data["singles"], dtype=float)
        doubles = np.asarray(data["doubles"], dtype=float)
        triples = data.get("triples")
        triples = None if triples is None else np.asarray(triples, dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError("malformed correlator table: %s" % exc) from exc
    _require(singles.shape == (3, 2), "singles must be 3x2")
    _require(doubles.shape == (3, 2, 2), "doubles must be 3x2x2")
    if triples is not None:
        _require(triples.shape == (2, 2, 2), "triples must be 2x2x2")
    for arr in (singles, doubles) + ((triples,) if triples is not None else ()):
        _require(bool(np.all(np.isfinite(arr))), "correlators must be finite")
        _require(bool(np.all(np.abs(arr) <= 1.0 + 1e-9)), "correlators must lie in [-1, 1]")
    return CorrelatorTable(singles=singles, doubles=doubles, triples=triples)


def membership_to_json(report: MembershipReport) -> dict:
    return {
        "format": "membership.v1",
        "member": bool(report.member),
        "weights": None if report.weights is None else [float(v) for v in report.weights],
        "certificate": None if report.certificate is None else [float(v) for v in report.certificate],
        "residual": float(report.residual),
    }


def membership_from_json(data: dict) -> MembershipReport:
    _require(isinstance(data, dict), "membership payload must be an object")
    _require(data.get("format") == "membership.v1", "expected format membership.v1")
    _require(isinstance(data.get("member"), bool), "member must be a boolean")
    weights = data.get("weights")
    cert = data.get("certificate")
    _require(weights is None or isinstance(weights, list), "weights must be a list or null")
    _require(cert is None or isinstance(cert, list), "certificate must be a list or null")
    return MembershipReport(
        member=data["member"],
        weights=None if weights is None else np.asarray(weights, dtype=float),
        certificate=None if cert is None else np.asarray(cert, dtype=float),
        residual=float(data.get("residual", 0.0)),
    )


def matrix_to_entries(mat: np.ndarray) -> list[list[float]]:
    flat = np.asarray(mat, dtype=complex).ravel()
    return [[float(v.real), float(v.imag)] for v in flat]


def entries_to_matrix(entries: list, dim: int) -> np.ndarray:
    _require(isinstance(entries, list) and len(entries) == dim * dim,
             "matrix entries must hold dim^2 [re, im] pairs")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(dim, dim)


def certificate_to_json(kind: str, n: int, p_star: float, p_sep: float,
                        residuals: dict, matrices: dict[str, np.ndarray]) -> dict:
    _require(kind in ("dual-sdp", "primal-state", "lp-farkas"), "unknown certificate kind")
    return {
        "format": "certificate.v1",
        "kind": kind,
        "n": int(n),
        "p_star": float(p_star),
        "p_sep": float(p_sep),
        "residuals": {k: (float(v) if isinstance(v, (int, float, np.floating)) else v)
                      for k, v in residuals.items()},
        "matrices": [
            {"name": name, "dim": int(np.asarray(mat).shape[0]), "entries": matrix_to_entries(mat)}
            for name, mat in matrices.items()
        ],
    }


def certificate_from_json(data: dict) -> dict:
    _require(isinstance(data, dict), "certificate payload must be an object")
    _require(data.get("format") == "certificate.v1", "expected format certificate.v1")
    _require(data.get("kind") in ("dual-sdp", "primal-state", "lp-farkas"),
             "unknown certificate kind")
    out = {
        "kind": data["kind"],
        "n": int(data["n"]),
        "p_star": float(data["p_star"]),
        "p_sep": float(data["p_sep"]),
        "residuals": dict(data.get("residuals", {})),
        "matrices": {},
    }
    for item in data.get("matrices", []):
        out["matrices"][item["name"]] = entries_to_matrix(item["entries"], int(item["dim"]))
    return out
