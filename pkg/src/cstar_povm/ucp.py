"""UCP maps on C(X) for finite X, i.e. on C^n with the indicator basis.

A function on the outcomes is a length-``n`` vector, and ``phi(f) = sum_i f_i mu_i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .convexity import CStarVerdict, cstar_extreme_test
from .dilation import NaimarkDilation, naimark_dilate
from .errors import CertificateError, DimensionMismatchError, NotNormalizedError, NotPSDError
from .matrix_kernel import DEFAULT_TOL, Tolerance, allclose, block_diag, is_psd
from .povm import FinitePOVM, is_pvm, validate

__all__ = [
    "UcpMap",
    "Stinespring",
    "ucp_from_povm",
    "povm_from_ucp",
    "choi",
    "is_cp",
    "is_homomorphism",
    "stinespring",
    "cstar_extreme_ucp",
]


@dataclass(frozen=True, eq=False)
class UcpMap:
    """The map ``f -> sum_i f_i mu_i`` backed by a POVM.

    Construction does not validate; use :func:`ucp_from_povm` for a checked map.
    """

    backing: FinitePOVM

    @property
    def n(self) -> int:
        return self.backing.n

    def __call__(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=complex).ravel()
        if f.size != self.n:
            raise DimensionMismatchError(f"function vector must have length {self.n}")
        return np.einsum("i,iab->ab", f, self.backing.effects)

    def indicator_images(self) -> list[np.ndarray]:
        return [self(np.eye(self.n)[i]) for i in range(self.n)]


def ucp_from_povm(p: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> UcpMap:
    report = validate(p, tol)
    if not (report.psd_ok and report.normalized):
        raise NotNormalizedError("a UCP map needs a normalized POVM")
    return UcpMap(p)


def povm_from_ucp(images: Sequence[np.ndarray] | UcpMap, outcomes: Sequence | None = None,
                  tol: Tolerance = DEFAULT_TOL) -> FinitePOVM:
    """Recover the POVM from the images of the indicator functions."""
    if isinstance(images, UcpMap):
        outcomes = images.backing.outcomes if outcomes is None else outcomes
        images = images.indicator_images()
    p = FinitePOVM.from_effects(images, outcomes)
    for x, e in zip(p.outcomes, p.effects):
        if not is_psd(e, tol, scale=1.0):
            raise NotPSDError(f"image of the indicator of {x!r} is not positive")
    if not validate(p, tol).normalized:
        raise NotNormalizedError("indicator images do not sum to the identity")
    return p


def choi(u: UcpMap) -> np.ndarray:
    """Choi matrix ``sum_ij E_ij (x) phi(E_ij)``; for C^n only diagonal units survive, outcome-major."""
    return block_diag(*u.backing.effects)


def is_cp(u: UcpMap, tol: Tolerance = DEFAULT_TOL) -> bool:
    return is_psd(choi(u), tol)


def is_homomorphism(u: UcpMap, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Multiplicativity on the indicator basis, cross-checked against ``is_pvm``."""
    eye = np.eye(u.n)
    images = u.indicator_images()
    multiplicative = all(
        allclose(u(eye[i] * eye[j]), images[i] @ images[j], tol.eps_eq)
        for i in range(u.n)
        for j in range(u.n)
    )
    if multiplicative != is_pvm(u.backing, tol):
        raise CertificateError("homomorphism test disagrees with the PVM test")
    return multiplicative


@dataclass(frozen=True, eq=False)
class Stinespring:
    dilation: NaimarkDilation

    @property
    def isometry(self) -> np.ndarray:
        return self.dilation.isometry

    def representation(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=complex).ravel()
        return np.einsum("i,iab->ab", f, np.array(self.dilation.spectral_effects()))


def stinespring(u: UcpMap, tol: Tolerance = DEFAULT_TOL, seed: int = 0, samples: int = 8) -> Stinespring:
    """Stinespring triple from the Naimark dilation, checked on indicators and random vectors."""
    st = Stinespring(naimark_dilate(u.backing, tol))
    v = st.isometry
    rng = np.random.default_rng(seed)
    checks = list(np.eye(u.n)) + [rng.standard_normal(u.n) + 1j * rng.standard_normal(u.n)
                                  for _ in range(samples)]
    for f in checks:
        scale = max(1.0, float(np.max(np.abs(f))))
        if not allclose(v.conj().T @ st.representation(f) @ v, u(f), tol.check * scale):
            raise CertificateError("Stinespring dilation does not reproduce the map")
    return st


def cstar_extreme_ucp(u: UcpMap, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> CStarVerdict:
    verdict = cstar_extreme_test(u.backing, tol, seed)
    if verdict.cstar_extreme != is_homomorphism(u, tol):
        raise CertificateError("C*-extreme verdict disagrees with the homomorphism test")
    return verdict
