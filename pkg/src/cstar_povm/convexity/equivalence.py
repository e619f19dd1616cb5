"""Simultaneous unitary equivalence of two effect tuples.

Inequivalence is certified by a word ``w`` over outcome indices whose traces
``tr(w(mu1))`` and ``tr(w(mu2))`` differ. Equivalence is certified only by an
explicit unitary: a generic element ``X`` of the intertwiner space
``{X : mu1_i X = X mu2_i}`` is invertible when the tuples are equivalent, and
its polar part is then a unitary intertwiner.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatchError, OutcomeMismatchError
from ..matrix_kernel import DEFAULT_TOL, Tolerance, allclose, dagger, nullspace
from ..povm import FinitePOVM

__all__ = [
    "EQUIVALENT",
    "INEQUIVALENT",
    "INCONCLUSIVE",
    "EquivalenceCertificate",
    "unitary_equivalent",
    "find_distinguishing_word",
    "word_trace",
    "certificate_defects",
]

EQUIVALENT = "equivalent"
INEQUIVALENT = "inequivalent"
INCONCLUSIVE = "inconclusive"

DEFAULT_WORD_CAP = 6
# words per layer beyond which the breadth-first search stops early
MAX_LAYER_WORDS = 250_000


@dataclass(frozen=True, eq=False)
class EquivalenceCertificate:
    verdict: str
    max_word_length: int
    unitary: np.ndarray | None = None
    word: tuple | None = None
    traces: tuple | None = None
    searched_length: int = 0

    @property
    def word_labels(self) -> list | None:
        return None if self.word is None else list(self.word)


def word_trace(effects: np.ndarray, word) -> complex:
    """Trace of the product ``effects[w_1] @ effects[w_2] @ ...``."""
    m = np.eye(effects.shape[1], dtype=complex)
    for i in word:
        m = m @ effects[i]
    return complex(np.trace(m))


def find_distinguishing_word(a: np.ndarray, b: np.ndarray, max_len: int, threshold: float):
    """Breadth-first search for a trace-word separating two tuples.

    Returns ``(word, (tr_a, tr_b), searched_length)``; ``word`` is ``None``
    when nothing up to the searched length separates them.
    """
    n, d, _ = a.shape
    prod_a = np.eye(d, dtype=complex)[None]
    prod_b = np.eye(d, dtype=complex)[None]
    words = [()]
    searched = 0
    for length in range(1, max_len + 1):
        # traces of every one-letter extension, without forming the products
        ta = np.einsum("wab,iba->wi", prod_a, a)
        tb = np.einsum("wab,iba->wi", prod_b, b)
        diff = np.abs(ta - tb)
        hit = np.argwhere(diff > threshold)
        searched = length
        if hit.size:
            w, i = (int(x) for x in hit[np.argmax(diff[hit[:, 0], hit[:, 1]])])
            return words[w] + (i,), (complex(ta[w, i]), complex(tb[w, i])), length
        if length == max_len or len(words) * n > MAX_LAYER_WORDS:
            break
        prod_a = np.einsum("wab,ibc->wiac", prod_a, a).reshape(-1, d, d)
        prod_b = np.einsum("wab,ibc->wiac", prod_b, b).reshape(-1, d, d)
        words = [w + (i,) for w in words for i in range(n)]
    return None, None, searched


def _construct_unitary(a: np.ndarray, b: np.ndarray, tol: Tolerance, seed: int, attempts: int = 4):
    n, d, _ = a.shape
    eye = np.eye(d)
    # row-major vec: vec(A X) = (A kron I) vec X, vec(X B) = (I kron B^T) vec X
    big = np.vstack([np.kron(ai, eye) - np.kron(eye, bi.T) for ai, bi in zip(a, b)])
    scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    null = nullspace(big, tol, scale)
    if null.shape[1] == 0:
        return None
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        c = rng.standard_normal(null.shape[1]) + 1j * rng.standard_normal(null.shape[1])
        x = (null @ c).reshape(d, d)
        u_, s, vh = np.linalg.svd(x)
        if s[-1] <= tol.eps_rank * s[0]:
            continue
        u = u_ @ vh
        if _unitary_ok(u, a, b, tol):
            return u
    return None


def _unitary_ok(u, a, b, tol: Tolerance) -> bool:
    d = u.shape[0]
    if not allclose(dagger(u) @ u, np.eye(d), tol.check):
        return False
    return all(allclose(dagger(u) @ ai @ u, bi, tol.check) for ai, bi in zip(a, b))


def unitary_equivalent(p1: FinitePOVM, p2: FinitePOVM, tol: Tolerance = DEFAULT_TOL,
                       max_word_length: int = DEFAULT_WORD_CAP, seed: int = 0) -> EquivalenceCertificate:
    """Decide whether ``p2_i = U^* p1_i U`` for a single unitary ``U``.

    ``inconclusive`` is returned when no separating word exists up to the cap
    and no unitary could be built; equivalence is never claimed without a
    verified ``U``.
    """
    if p1.outcomes != p2.outcomes:
        raise OutcomeMismatchError("POVMs must share the outcome list")
    if p1.dim != p2.dim:
        raise DimensionMismatchError("POVMs must act on the same space")
    a = p1.effects
    b = p2.effects
    word, traces, searched = find_distinguishing_word(a, b, max_word_length, tol.check)
    if word is not None:
        return EquivalenceCertificate(INEQUIVALENT, max_word_length, word=word, traces=traces,
                                      searched_length=searched)
    u = _construct_unitary(a, b, tol, seed)
    if u is not None:
        return EquivalenceCertificate(EQUIVALENT, max_word_length, unitary=u, searched_length=searched)
    return EquivalenceCertificate(INCONCLUSIVE, max_word_length, searched_length=searched)


def certificate_defects(cert: EquivalenceCertificate, p1: FinitePOVM, p2: FinitePOVM,
                        tol: Tolerance = DEFAULT_TOL) -> list[str]:
    """Independent re-check of an equivalence certificate."""
    if cert.verdict == EQUIVALENT:
        if cert.unitary is None or not _unitary_ok(cert.unitary, p1.effects, p2.effects, tol):
            return ["unitary"]
    elif cert.verdict == INEQUIVALENT:
        if cert.word is None:
            return ["word"]
        t1 = word_trace(p1.effects, cert.word)
        t2 = word_trace(p2.effects, cert.word)
        if abs(t1 - t2) <= tol.check:
            return ["word"]
    elif cert.verdict != INCONCLUSIVE:
        return ["verdict"]
    return []
