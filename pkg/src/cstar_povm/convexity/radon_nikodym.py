"""Operator Radon-Nikodym derivative of a dominated POVM."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dilation import NaimarkDilation, naimark_dilate
from ..errors import CertificateError, DimensionMismatchError, NotDominatedError, OutcomeMismatchError
from ..matrix_kernel import DEFAULT_TOL, Tolerance, allclose, dagger, hermitian_part, is_psd
from ..povm import FinitePOVM

__all__ = ["RadonNikodymDerivative", "radon_nikodym", "derivative_defects", "check_domination"]


@dataclass(frozen=True, eq=False)
class RadonNikodymDerivative:
    D: np.ndarray
    dilation: NaimarkDilation

    @property
    def blocks(self):
        return self.dilation.blocks


def check_domination(nu: FinitePOVM, mu: FinitePOVM, tol: Tolerance = DEFAULT_TOL):
    """Raise unless ``mu_i - nu_i`` and ``nu_i`` are PSD for every outcome.

    Subset-level domination then follows because ``mu(A) - nu(A)`` is a sum of
    per-outcome differences.
    """
    if nu.outcomes != mu.outcomes:
        raise OutcomeMismatchError("nu and mu must share the outcome list")
    if nu.dim != mu.dim:
        raise DimensionMismatchError("nu and mu must act on the same space")
    for x, a, b in zip(mu.outcomes, nu.effects, mu.effects):
        if not is_psd(a, tol, scale=1.0):
            raise NotDominatedError(f"nu is not positive at outcome {x!r}")
        if not is_psd(b - a, tol, scale=1.0):
            raise NotDominatedError(f"nu is not dominated by mu at outcome {x!r}")


def radon_nikodym(nu: FinitePOVM, mu: FinitePOVM, tol: Tolerance = DEFAULT_TOL,
                  dilation: NaimarkDilation | None = None) -> RadonNikodymDerivative:
    """Block-diagonal ``0 <= D <= I`` with ``nu(.) = V^* D pi(.) V``.

    On block ``i`` the row block ``V_i`` has full row rank, so
    ``D_i = (V_i^+)^* nu_i V_i^+`` is the unique solution.
    """
    check_domination(nu, mu, tol)
    dil = dilation if dilation is not None else naimark_dilate(mu, tol)
    size = dil.dilation_dim
    d = np.zeros((size, size), dtype=complex)
    for i, x in enumerate(mu.outcomes):
        sl = dil.block_slice(i)
        vi = dil.block_rows(i)
        if vi.shape[0] == 0:
            if not allclose(nu.effects[i], 0 * nu.effects[i], tol.check):
                raise NotDominatedError(f"not dominated: nu charges null outcome {x!r}")
            continue
        # V_i V_i^* = diag(eigenvalues), so the right inverse is explicit
        gram = vi @ dagger(vi)
        right_inv = dagger(vi) @ np.linalg.inv(gram)
        di = hermitian_part(dagger(right_inv) @ nu.effects[i] @ right_inv)
        if not allclose(dagger(vi) @ di @ vi, nu.effects[i], tol.check):
            raise NotDominatedError(f"not dominated: nu at {x!r} leaves the range of mu")
        d[sl, sl] = di
    out = RadonNikodymDerivative(d, dil)
    bad = derivative_defects(out, nu, tol)
    if bad:
        raise CertificateError(f"derivative failed verification: {bad}")
    return out


def derivative_defects(rn: RadonNikodymDerivative, nu: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> list[str]:
    bad = []
    d = rn.D
    dil = rn.dilation
    if not is_psd(d, tol, scale=1.0):
        bad.append("positive")
    if not is_psd(np.eye(d.shape[0]) - d, tol, scale=1.0):
        bad.append("contraction")
    for pi in dil.spectral_effects():
        if not allclose(d @ pi, pi @ d, tol.check):
            bad.append("commutant")
            break
    for x, got, want in zip(nu.outcomes, dil.compress_blocks(d), nu.effects):
        if not allclose(got, want, tol.check):
            bad.append(f"reconstruction[{x}]")
    return bad
