"""C*-convex combinations ``mu = sum_i T_i^* mu_i(.) T_i`` and the Krein-Milman decomposition."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CertificateError, CoefficientSumError, DimensionMismatchError, OutcomeMismatchError
from ..matrix_kernel import DEFAULT_TOL, Tolerance, allclose, dagger, sqrt_psd
from ..povm import FinitePOVM, dirac, effect_is_zero, validate

__all__ = ["CStarTerm", "CStarCombination", "combine", "krein_milman_decompose"]


@dataclass(frozen=True, eq=False)
class CStarTerm:
    coefficient: np.ndarray
    component: FinitePOVM


@dataclass(frozen=True, eq=False)
class CStarCombination:
    terms: tuple

    def __post_init__(self):
        terms = tuple(t if isinstance(t, CStarTerm) else CStarTerm(np.asarray(t[0], dtype=complex), t[1])
                      for t in self.terms)
        if not terms:
            raise ValueError("a C*-convex combination needs at least one term")
        ref = terms[0].component
        for t in terms:
            if t.component.outcomes != ref.outcomes:
                raise OutcomeMismatchError("all components must share one outcome list")
            if t.component.dim != ref.dim or t.coefficient.shape != (ref.dim, ref.dim):
                raise DimensionMismatchError("coefficients and components must act on the same space")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return self.terms[0].component.dim

    def coefficient_sum(self) -> np.ndarray:
        return sum(dagger(t.coefficient) @ t.coefficient for t in self.terms)

    def is_proper(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        """Every coefficient invertible (smallest singular value above ``eps_rank``)."""
        return all(np.linalg.svd(t.coefficient, compute_uv=False)[-1] > tol.eps_rank for t in self.terms)

    @property
    def proper(self) -> bool:
        return self.is_proper()


def combine(c: CStarCombination, tol: Tolerance = DEFAULT_TOL) -> FinitePOVM:
    if not allclose(c.coefficient_sum(), np.eye(c.dim), tol.check):
        raise CoefficientSumError("coefficients violate sum T_i^* T_i = I")
    effects = sum(
        np.einsum("ba,ibc,cd->iad", t.coefficient.conj(), t.component.effects, t.coefficient)
        for t in c.terms
    )
    return FinitePOVM(c.terms[0].component.outcomes, effects)


def krein_milman_decompose(p: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> CStarCombination:
    """Write ``p`` as ``sum_i S_i^* delta_{x_i} S_i`` with ``S_i = mu_i^{1/2}`` over supported outcomes."""
    report = validate(p, tol)
    if not (report.psd_ok and report.normalized):
        raise CertificateError("Krein-Milman decomposition needs a normalized POVM")
    terms = [
        CStarTerm(sqrt_psd(e, tol), dirac(p.outcomes, x, p.dim))
        for x, e in zip(p.outcomes, p.effects)
        if not effect_is_zero(e, tol)
    ]
    out = CStarCombination(tuple(terms))
    if not allclose(combine(out, tol).effects, p.effects, tol.check):
        raise CertificateError("Krein-Milman decomposition failed to recombine")
    return out
