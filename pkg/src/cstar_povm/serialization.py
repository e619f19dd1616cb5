"""JSON documents for POVMs, dilations and certificates.

Complex matrices are row-major nested lists whose entries are ``[re, im]`` pairs.
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .convexity import (
    CStarCombination,
    CStarTerm,
    EquivalenceCertificate,
    RadonNikodymDerivative,
)
from .dilation import NaimarkDilation
from .errors import PovmError
from .povm import FinitePOVM
from .ucp import UcpMap

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "povm_to_json",
    "povm_from_json",
    "dilation_to_json",
    "dilation_from_json",
    "combination_to_json",
    "combination_from_json",
    "equivalence_to_json",
    "derivative_to_json",
    "ucp_to_json",
    "ucp_from_json",
    "load_povm",
    "dumps",
]


class DocumentError(PovmError):
    """Malformed JSON document; ``location`` names the offending path."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


def _complex(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_to_json(m: np.ndarray) -> list:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[_complex(z) for z in row] for row in m]


def matrix_from_json(obj: Any, location: str = "$") -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise DocumentError("expected a nonempty list of rows", location)
    rows = []
    width = None
    for r, row in enumerate(obj):
        if not isinstance(row, list):
            raise DocumentError("row must be a list", f"{location}[{r}]")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DocumentError("ragged matrix", f"{location}[{r}]")
        vals = []
        for c, z in enumerate(row):
            if (not isinstance(z, list) or len(z) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in z)):
                raise DocumentError("entry must be [re, im]", f"{location}[{r}][{c}]")
            vals.append(complex(z[0], z[1]))
        rows.append(vals)
    return np.array(rows, dtype=complex)


def povm_to_json(p: FinitePOVM) -> dict:
    return {
        "dim": p.dim,
        "outcomes": list(p.outcomes),
        "effects": [matrix_to_json(e) for e in p.effects],
    }


def povm_from_json(doc: Any, location: str = "$") -> FinitePOVM:
    if not isinstance(doc, dict):
        raise DocumentError("POVM document must be an object", location)
    for key in ("dim", "outcomes", "effects"):
        if key not in doc:
            raise DocumentError(f"missing key {key!r}", location)
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise DocumentError("dim must be a positive integer", f"{location}.dim")
    outcomes = doc["outcomes"]
    effects = doc["effects"]
    if not isinstance(outcomes, list) or not isinstance(effects, list):
        raise DocumentError("outcomes and effects must be lists", location)
    if len(outcomes) != len(effects):
        raise DocumentError("one effect per outcome required", f"{location}.effects")
    mats = []
    for i, e in enumerate(effects):
        m = matrix_from_json(e, f"{location}.effects[{i}]")
        if m.shape != (dim, dim):
            raise DocumentError(f"effect has shape {m.shape}, expected ({dim}, {dim})",
                                f"{location}.effects[{i}]")
        mats.append(m)
    try:
        return FinitePOVM(tuple(str(x) for x in outcomes), mats)
    except PovmError as exc:
        raise DocumentError(str(exc), location) from exc


def dilation_to_json(dil: NaimarkDilation) -> dict:
    return {
        "dim": dil.dim,
        "dilation_dim": dil.dilation_dim,
        "V": matrix_to_json(dil.isometry),
        "blocks": [[off, rank] for off, rank in dil.blocks],
        "outcomes": list(dil.source.outcomes),
    }


def dilation_from_json(doc: dict) -> NaimarkDilation:
    v = matrix_from_json(doc["V"], "$.V")
    blocks = tuple((int(o), int(r)) for o, r in doc["blocks"])
    outcomes = doc.get("outcomes") or [f"x{i + 1}" for i in range(len(blocks))]
    effects = []
    for off, rank in blocks:
        rows = v[off:off + rank]
        effects.append(rows.conj().T @ rows)
    return NaimarkDilation(FinitePOVM(tuple(outcomes), effects), v, blocks)


def combination_to_json(c: CStarCombination) -> dict:
    return {
        "terms": [{"T": matrix_to_json(t.coefficient), "povm": povm_to_json(t.component)} for t in c.terms],
        "proper": c.proper,
    }


def combination_from_json(doc: dict) -> CStarCombination:
    terms = []
    for k, t in enumerate(doc["terms"]):
        terms.append(CStarTerm(matrix_from_json(t["T"], f"$.terms[{k}].T"),
                               povm_from_json(t["povm"], f"$.terms[{k}].povm")))
    return CStarCombination(tuple(terms))


def equivalence_to_json(cert: EquivalenceCertificate, outcomes=None) -> dict:
    out: dict = {"verdict": cert.verdict, "max_word_length": cert.max_word_length}
    if cert.unitary is not None:
        out["U"] = matrix_to_json(cert.unitary)
    if cert.word is not None:
        out["word"] = [int(i) for i in cert.word]
        if outcomes is not None:
            out["word_labels"] = [outcomes[i] for i in cert.word]
        out["traces"] = [_complex(t) for t in cert.traces]
    return out


def derivative_to_json(rn: RadonNikodymDerivative) -> dict:
    return {"D": matrix_to_json(rn.D), "blocks": [[o, r] for o, r in rn.blocks]}


def ucp_to_json(u: UcpMap) -> dict:
    doc = povm_to_json(u.backing)
    doc["role"] = "ucp"
    return doc


def ucp_from_json(doc: dict) -> UcpMap:
    if doc.get("role") != "ucp":
        raise DocumentError("expected role 'ucp'", "$.role")
    return UcpMap(povm_from_json(doc))


def load_povm(text: str) -> FinitePOVM:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from exc
    return povm_from_json(doc)


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)
