"""Tolerance-aware dense Hermitian linear algebra.

Operators are plain 2-D ``numpy`` arrays. Every spectral routine symmetrizes
its input as ``(A + A^H) / 2`` before calling ``eigh``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatchError, NotHermitianError, NotPSDError, PovmError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "hermitian_part",
    "is_hermitian",
    "require_hermitian",
    "is_psd",
    "min_eigenvalue",
    "sqrt_psd",
    "inv_sqrt_pd",
    "pinv_psd",
    "borel_apply",
    "range_rank",
    "nullspace",
    "f_rs",
    "block_diag",
    "dagger",
    "allclose",
    "same_span",
    "random_unitary",
]


@dataclass(frozen=True)
class Tolerance:
    """Thresholds used for every numerical decision.

    eps_eq
        Absolute entrywise equality threshold.
    eps_psd
        Most negative admissible eigenvalue, multiplied by ``dim * max|a_ij|``.
    eps_rank
        Singular value cutoff relative to the largest singular value.
    """

    eps_eq: float = 1e-9
    eps_psd: float = 1e-9
    eps_rank: float = 1e-9

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise ValueError(f"tolerance {name} must be strictly positive, got {value}")

    @classmethod
    def uniform(cls, eps: float) -> "Tolerance":
        return cls(eps, eps, eps)

    @property
    def check(self) -> float:
        """Threshold used when re-verifying constructed identities."""
        return 10 * self.eps_eq

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOL = Tolerance()


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermitian_part(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    return (a + a.conj().T) / 2


def _square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    return a


def is_hermitian(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = _square(a)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol.eps_eq)


def require_hermitian(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Return the symmetrized operator, raising if ``a`` is not Hermitian."""
    a = _square(a)
    if not is_hermitian(a, tol):
        dev = np.max(np.abs(a - a.conj().T))
        raise NotHermitianError(f"operator is not Hermitian (max |A - A^H| = {dev:.3e})")
    return hermitian_part(a)


def allclose(a, b, atol: float) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.max(np.abs(a - b), initial=0.0) <= atol)


def _psd_threshold(a: np.ndarray, tol: Tolerance, scale: float | None = None) -> float:
    if scale is None:
        scale = float(np.max(np.abs(a), initial=0.0))
    return tol.eps_psd * a.shape[0] * scale


def min_eigenvalue(a) -> float:
    a = hermitian_part(_square(a))
    if a.shape[0] == 0:
        return 0.0
    return float(np.linalg.eigvalsh(a)[0])


def is_psd(a, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> bool:
    """Minimum eigenvalue at least ``-eps_psd * dim * scale``.

    ``scale`` defaults to ``max|a_ij|``; pass the size of the operands when
    ``a`` is a difference that may be pure round-off.
    """
    a = require_hermitian(a, tol)
    if a.shape[0] == 0:
        return True
    return min_eigenvalue(a) >= -_psd_threshold(a, tol, scale)


def _eigh(a: np.ndarray):
    w, u = np.linalg.eigh(hermitian_part(a))
    return w, u


def _apply(u: np.ndarray, values: np.ndarray) -> np.ndarray:
    return hermitian_part((u * values) @ u.conj().T)


def sqrt_psd(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a PSD operator."""
    a = require_hermitian(a, tol)
    w, u = _eigh(a)
    if w.size and w[0] < -_psd_threshold(a, tol):
        raise NotPSDError(f"not PSD: minimum eigenvalue {w[0]:.3e}")
    return _apply(u, np.sqrt(np.clip(w, 0.0, None)))


def inv_sqrt_pd(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``A^{-1/2}`` for a positive definite operator."""
    a = require_hermitian(a, tol)
    w, u = _eigh(a)
    if w.size and w[0] <= tol.eps_rank * max(w[-1], 0.0):
        raise PovmError(f"operator is not positive definite (minimum eigenvalue {w[0]:.3e})")
    return _apply(u, 1.0 / np.sqrt(w))


def pinv_psd(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a PSD operator, eigenvalue cutoff relative to the largest."""
    a = require_hermitian(a, tol)
    w, u = _eigh(a)
    if w.size and w[0] < -_psd_threshold(a, tol):
        raise NotPSDError(f"not PSD: minimum eigenvalue {w[0]:.3e}")
    top = float(np.max(np.abs(w), initial=0.0))
    keep = w > tol.eps_rank * top
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    return _apply(u, inv)


def borel_apply(a, f: Callable[[float], float], tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Spectral calculus: ``U diag(f(lambda_i)) U^*`` for ``A = U diag(lambda_i) U^*``.

    ``f`` is evaluated pointwise on the eigenvalues, so discontinuous (Borel)
    functions are fine. Raises if ``f`` fails or returns a non-finite value.
    """
    a = require_hermitian(a, tol)
    w, u = _eigh(a)
    values = np.empty(w.shape, dtype=complex)
    for k, lam in enumerate(w):
        try:
            with np.errstate(all="raise"):
                value = f(float(lam))
        except (ArithmeticError, ValueError) as exc:
            raise PovmError(f"function undefined at eigenvalue {lam!r}: {exc}") from exc
        if value is None or not np.isfinite(value):
            raise PovmError(f"function undefined at eigenvalue {lam!r}")
        values[k] = value
    out = (u * values) @ u.conj().T
    if np.all(np.abs(values.imag) == 0):
        out = hermitian_part(out)
    return out


def range_rank(a, tol: Tolerance = DEFAULT_TOL) -> tuple[int, np.ndarray]:
    """Rank and an orthonormal basis (as columns) of the range of ``a``."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0, np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a)
    if s.size == 0 or s[0] == 0:
        return 0, np.zeros((a.shape[0], 0), dtype=complex)
    rank = int(np.sum(s > tol.eps_rank * s[0]))
    return rank, u[:, :rank]


def nullspace(m, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``m``.

    Singular values up to ``eps_rank * max(top, scale)`` count as zero, so a
    system that is round-off only (relative to ``scale``) has a full kernel.
    """
    m = np.asarray(m)
    ncols = m.shape[1]
    if m.shape[0] == 0 or ncols == 0:
        return np.eye(ncols, dtype=m.dtype)
    _, s, vh = np.linalg.svd(m)
    top = float(s[0]) if s.size else 0.0
    cutoff = tol.eps_rank * max(top, scale or 0.0)
    rank = int(np.sum(s > cutoff)) if top > 0 else 0
    return vh[rank:].conj().T


def same_span(a: Sequence[np.ndarray], b: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether two families of equally shaped arrays span the same complex subspace."""
    va = np.array([np.ravel(x) for x in a], dtype=complex).reshape(len(a), -1)
    vb = np.array([np.ravel(x) for x in b], dtype=complex).reshape(len(b), -1)
    if va.shape[0] == 0 or vb.shape[0] == 0:
        return va.shape[0] == vb.shape[0] == 0
    ra = range_rank(va.T, tol)[0]
    rb = range_rank(vb.T, tol)[0]
    rab = range_rank(np.vstack([va, vb]).T, tol)[0]
    return ra == rb == rab


def f_rs(r: float, s: float) -> Callable[[float], float]:
    """The piecewise function equal to 1 off ``[r, s]`` and ``r/(1-r) (1/t - 1)`` on it.

    Arguments are clamped to ``[0, 1]`` first so round-off overshoot of a
    contraction's spectrum never leaves the domain.
    """
    if not 0 < r < s < 1:
        raise ValueError(f"need 0 < r < s < 1, got r={r}, s={s}")
    coef = r / (1 - r)

    def f(t: float) -> float:
        t = min(max(t, 0.0), 1.0)
        if r <= t <= s:
            return coef * (1.0 / t - 1.0)
        return 1.0

    return f


def block_diag(*blocks: np.ndarray) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via phase-corrected QR."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
