"""Extremality in the convex set of normalized POVMs.

``mu`` is extreme iff ``D -> V^* D V`` is injective on the commutant of its
minimal dilation. Since the commutant is *-closed it suffices to test the
Hermitian slice, which turns the question into the rank of a real matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dilation import NaimarkDilation, dilation_commutant, naimark_dilate
from ..errors import CertificateError
from ..matrix_kernel import DEFAULT_TOL, Tolerance, allclose, dagger, nullspace
from ..povm import FinitePOVM, is_normalized

__all__ = ["ExtremeResult", "extreme_test", "extreme_split", "compression_matrix"]


@dataclass(frozen=True, eq=False)
class ExtremeResult:
    extreme: bool
    dilation: NaimarkDilation
    witness: np.ndarray | None = None


def compression_matrix(dil: NaimarkDilation, basis) -> np.ndarray:
    """Real matrix of ``D -> V^* D V`` from Hermitian-basis coordinates to ``(Re, Im)`` entries."""
    v = dil.isometry
    if not basis:
        return np.zeros((2 * dil.dim ** 2, 0))
    cols = np.column_stack([(dagger(v) @ h @ v).ravel() for h in basis])
    return np.vstack([cols.real, cols.imag])


def extreme_split(dil: NaimarkDilation, witness: np.ndarray) -> tuple[FinitePOVM, FinitePOVM]:
    """The two POVMs ``V^*(I +- D) pi(.) V`` whose midpoint is the source."""
    eye = np.eye(dil.dilation_dim)
    plus = FinitePOVM(dil.source.outcomes, dil.compress_blocks(eye + witness))
    minus = FinitePOVM(dil.source.outcomes, dil.compress_blocks(eye - witness))
    return plus, minus


def extreme_test(p: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> ExtremeResult:
    dil = naimark_dilate(p, tol)
    basis = dilation_commutant(dil).hermitian_basis
    mat = compression_matrix(dil, basis)
    if mat.shape[1] == 0:
        return ExtremeResult(True, dil)
    null = nullspace(mat, tol, scale=1.0)
    if null.shape[1] == 0:
        return ExtremeResult(True, dil)

    d = sum(c * h for c, h in zip(null[:, 0].real, basis))
    d = (d + dagger(d)) / 2
    d = d / np.linalg.norm(d, 2)
    _verify_witness(dil, d, tol)
    return ExtremeResult(False, dil, d)


def _verify_witness(dil: NaimarkDilation, d: np.ndarray, tol: Tolerance):
    if not allclose(dil.compress(d), np.zeros((dil.dim, dil.dim)), tol.check):
        raise CertificateError("extreme witness does not satisfy V^* D V = 0")
    for pi in dil.spectral_effects():
        if not allclose(d @ pi, pi @ d, tol.check):
            raise CertificateError("extreme witness is not in the dilation commutant")
    plus, minus = extreme_split(dil, d)
    for q in (plus, minus):
        if not is_normalized(q, tol):
            raise CertificateError("extreme split produced an invalid POVM")
    if allclose(plus.effects, minus.effects, tol.check):
        raise CertificateError("extreme split is trivial")
