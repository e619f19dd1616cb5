"""C*-extreme decision and witness decompositions.

For a finite outcome set and finite-dimensional space the C*-extreme points
are exactly the projection valued measures, so the verdict is ``is_pvm``.
A negative verdict is backed by an explicit proper two-term C*-convex
decomposition whose first component is certified inequivalent to the input.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dilation import NaimarkDilation, naimark_dilate
from ..errors import (
    CertificateError,
    NotHermitianError,
    NotNormalizedError,
    NotPSDError,
    SingularOperatorError,
    WitnessSearchError,
    PovmError,
)
from ..matrix_kernel import (
    DEFAULT_TOL,
    Tolerance,
    allclose,
    hermitian_part,
    inv_sqrt_pd,
    is_hermitian,
    is_psd,
    random_unitary,
    sqrt_psd,
)
from ..povm import FinitePOVM, is_normalized, is_pvm
from .combination import CStarCombination, CStarTerm, combine
from .equivalence import INEQUIVALENT, EquivalenceCertificate, certificate_defects, unitary_equivalent

__all__ = [
    "CStarVerdict",
    "witness_decomposition",
    "cstar_extreme_test",
    "decomposition_defects",
    "random_block_projection",
]

SPECTRAL = "spectral"
DEFAULT_TRIALS = 64
FLOOR = 0.1


@dataclass(frozen=True, eq=False)
class CStarVerdict:
    cstar_extreme: bool
    certificate: str | CStarCombination
    equivalence: EquivalenceCertificate | None = None
    witness_D: np.ndarray | None = None
    alpha: float | None = None
    trials: int = 0


def witness_decomposition(p: FinitePOVM, D: np.ndarray, alpha: float,
                          dilation: NaimarkDilation | None = None,
                          tol: Tolerance = DEFAULT_TOL) -> CStarCombination:
    """Two-term proper decomposition built from a positive commutant element ``D``.

    ``T1 = (a V^*DV)^{1/2}``, ``T2 = (I - a V^*DV)^{1/2}``,
    ``mu1 = T1^{-1} (a V^* D pi(.) V) T1^{-1}`` and
    ``mu2 = T2^{-1} (V^* (I - a D) pi(.) V) T2^{-1}``.
    """
    dil = dilation if dilation is not None else naimark_dilate(p, tol)
    D = np.asarray(D, dtype=complex)
    if D.shape != (dil.dilation_dim, dil.dilation_dim):
        raise PovmError(f"D must be {dil.dilation_dim}x{dil.dilation_dim}")
    if not is_hermitian(D, tol) or not is_psd(D, tol):
        raise NotPSDError("D must be a positive operator")
    D = hermitian_part(D)
    for pi in dil.spectral_effects():
        if not allclose(D @ pi, pi @ D, tol.check):
            raise PovmError("D is not in the commutant of the dilation")
    if not np.linalg.norm(alpha * D, 2) < 1:
        raise PovmError("need ||alpha D|| < 1")
    if not alpha > 0:
        raise PovmError("alpha must be positive")

    compressed = alpha * dil.compress(D)
    w = np.linalg.eigvalsh(hermitian_part(compressed))
    if w[0] <= tol.eps_rank * max(w[-1], 1.0):
        raise SingularOperatorError("V^* D V is singular")
    eye = np.eye(p.dim)
    t1 = sqrt_psd(compressed, tol)
    t2 = sqrt_psd(eye - compressed, tol)
    t1_inv = inv_sqrt_pd(compressed, tol)
    t2_inv = inv_sqrt_pd(eye - compressed, tol)

    first = [t1_inv @ e @ t1_inv for e in dil.compress_blocks(alpha * D)]
    second = [t2_inv @ e @ t2_inv for e in dil.compress_blocks(np.eye(dil.dilation_dim) - alpha * D)]
    return CStarCombination((
        CStarTerm(t1, FinitePOVM(p.outcomes, [hermitian_part(e) for e in first])),
        CStarTerm(t2, FinitePOVM(p.outcomes, [hermitian_part(e) for e in second])),
    ))


def decomposition_defects(c: CStarCombination, p: FinitePOVM, tol: Tolerance = DEFAULT_TOL,
                          need_proper: bool = True) -> list[str]:
    bad = []
    try:
        if not allclose(combine(c, tol).effects, p.effects, tol.check):
            bad.append("recombination")
    except PovmError:
        bad.append("coefficient_sum")
    if need_proper and not c.is_proper(tol):
        bad.append("proper")
    for k, t in enumerate(c.terms):
        if not is_normalized(t.component, tol):
            bad.append(f"component[{k}]")
    return bad


def random_block_projection(dil: NaimarkDilation, rng: np.random.Generator) -> np.ndarray:
    """Direct sum of random projections, one per dilation block, of random rank."""
    size = dil.dilation_dim
    out = np.zeros((size, size), dtype=complex)
    for i, (off, rank) in enumerate(dil.blocks):
        if rank == 0:
            continue
        k = int(rng.integers(0, rank + 1))
        if k == 0:
            continue
        u = random_unitary(rank, rng)[:, :k]
        out[off:off + rank, off:off + rank] = u @ u.conj().T
    return out


def cstar_extreme_test(p: FinitePOVM, tol: Tolerance = DEFAULT_TOL, seed: int = 0,
                       max_trials: int = DEFAULT_TRIALS, max_word_length: int = 6) -> CStarVerdict:
    if not is_normalized(p, tol):
        raise NotNormalizedError("C*-extremity is decided for normalized POVMs")
    if is_pvm(p, tol):
        return CStarVerdict(True, SPECTRAL)

    dil = naimark_dilate(p, tol)
    rng = np.random.default_rng(seed)
    size = dil.dilation_dim
    eye = np.eye(size)
    spectral = dil.spectral_effects()
    for trial in range(1, max_trials + 1):
        # spectral projections first (they give point-mass components), then random ones
        proj = spectral[trial - 1] if trial <= len(spectral) else random_block_projection(dil, rng)
        if allclose(proj, 0 * proj, tol.eps_eq) or allclose(proj, eye, tol.eps_eq):
            continue
        # a bare projection breaks the most symmetry; the floor is only needed
        # when its compression is singular
        w = np.linalg.eigvalsh(hermitian_part(dil.compress(proj)))
        D = proj if w[0] > tol.eps_rank * max(w[-1], 1.0) else proj + FLOOR * (eye - proj)
        alpha = 0.9 / np.linalg.norm(D, 2)
        comb = witness_decomposition(p, D, alpha, dil, tol)
        cert = unitary_equivalent(comb.terms[0].component, p, tol, max_word_length, seed=trial)
        if cert.verdict != INEQUIVALENT:
            continue
        bad = decomposition_defects(comb, p, tol)
        bad += certificate_defects(cert, comb.terms[0].component, p, tol)
        if bad:
            raise CertificateError(f"witness decomposition failed verification: {bad}")
        return CStarVerdict(False, comb, cert, D, float(alpha), trial)
    raise WitnessSearchError(f"no inequivalent witness found in {max_trials} trials")
