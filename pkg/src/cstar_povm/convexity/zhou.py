"""Domination test against C*-extremity and the spectral probe that feeds it.

A C*-extreme ``mu`` admits, for every ``nu <= mu`` with invertible total, an
invertible ``S`` with ``nu(.) = S^* mu(.) S``. Writing ``S = W nu(X)^{1/2}``
reduces this to unitary equivalence of ``mu`` with the normalized tuple
``nu(X)^{-1/2} nu_i nu(X)^{-1/2}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import CertificateError, CommutationError, SingularOperatorError, VacuousProbeError, PovmError
from ..matrix_kernel import (
    DEFAULT_TOL,
    Tolerance,
    allclose,
    borel_apply,
    dagger,
    f_rs,
    hermitian_part,
    inv_sqrt_pd,
    is_psd,
    sqrt_psd,
)
from ..povm import FinitePOVM, is_normalized, subset_effect
from .equivalence import EQUIVALENT, INCONCLUSIVE, EquivalenceCertificate, unitary_equivalent
from .radon_nikodym import check_domination

__all__ = [
    "ZhouResult",
    "zhou_test",
    "spectral_probe",
    "default_probe_window",
    "probe_lower_bound",
    "normalized_tuple",
]


@dataclass(frozen=True, eq=False)
class ZhouResult:
    """``exists_S`` is ``None`` when the equivalence search was inconclusive."""

    exists_S: bool | None
    certificate: EquivalenceCertificate
    S: np.ndarray | None = None
    reduced: FinitePOVM | None = None


def normalized_tuple(nu: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> FinitePOVM:
    total = nu.total()
    w = np.linalg.eigvalsh(hermitian_part(total))
    if w[0] <= tol.eps_rank * max(w[-1], 1.0):
        raise SingularOperatorError("Zhou criterion needs invertible total")
    r = inv_sqrt_pd(total, tol)
    return FinitePOVM(nu.outcomes, [hermitian_part(r @ e @ r) for e in nu.effects])


def zhou_test(mu: FinitePOVM, nu: FinitePOVM, tol: Tolerance = DEFAULT_TOL,
              max_word_length: int = 6, seed: int = 0) -> ZhouResult:
    """Search for invertible ``S`` with ``nu(.) = S^* mu(.) S``.

    A negative answer refutes C*-extremity of ``mu``: it is returned together
    with the trace word separating ``mu`` from the normalized tuple.
    """
    if not is_normalized(mu, tol):
        raise PovmError("mu must be a normalized POVM")
    check_domination(nu, mu, tol)
    reduced = normalized_tuple(nu, tol)
    cert = unitary_equivalent(mu, reduced, tol, max_word_length, seed)
    if cert.verdict == EQUIVALENT:
        s = cert.unitary @ sqrt_psd(nu.total(), tol)
        for got, want in zip(mu.effects, nu.effects):
            if not allclose(dagger(s) @ got @ s, want, tol.check):
                raise CertificateError("constructed S does not reproduce nu")
        return ZhouResult(True, cert, s, reduced)
    if cert.verdict == INCONCLUSIVE:
        return ZhouResult(None, cert, None, reduced)
    return ZhouResult(False, cert, None, reduced)


def probe_lower_bound(r: float, s: float) -> float:
    """Lower bound ``(r/(1-r)) ((1-s)/s)`` of ``f_rs`` on ``[0, 1]``."""
    return (r / (1 - r)) * ((1 - s) / s)


def default_probe_window(p: FinitePOVM, subset: Sequence, tol: Tolerance = DEFAULT_TOL) -> tuple[float, float]:
    """``(r, s)`` bracketing the eigenvalue of ``mu(E)`` farthest from ``{0, 1}``."""
    w = np.linalg.eigvalsh(hermitian_part(subset_effect(p, subset)))
    dist = np.minimum(w, 1 - w)
    k = int(np.argmax(dist))
    lam = float(w[k])
    gap = float(dist[k])
    if gap <= max(tol.eps_psd, 1e-7):
        raise VacuousProbeError("vacuous probe: mu(E) is a projection within tolerance")
    delta = min(0.25, gap) * 0.5
    return lam * (1 - delta), lam * (1 + delta)


def spectral_probe(p: FinitePOVM, subset: Sequence, r: float | None = None, s: float | None = None,
                   tol: Tolerance = DEFAULT_TOL, strict: bool = True) -> FinitePOVM:
    """``nu(B) = mu(B n E) f_rs(mu(E)) + mu(B \\ E)`` on singletons.

    Requires every ``mu(x)``, ``x`` in ``E``, to commute with ``mu(E)``. With
    ``strict`` (the default) a window ``(r, s)`` missing the spectrum of
    ``mu(E)`` is an error, since the probe would return ``mu`` unchanged.
    """
    if not is_normalized(p, tol):
        raise PovmError("spectral probe needs a normalized POVM")
    subset = [str(x) for x in subset]
    for x in subset:
        p.index(x)
    if r is None or s is None:
        r, s = default_probe_window(p, subset, tol)
    if not 0 < r < s < 1:
        raise PovmError(f"need 0 < r < s < 1, got r={r}, s={s}")
    m_e = subset_effect(p, subset)
    for x in subset:
        e = p.effect(x)
        if not allclose(e @ m_e, m_e @ e, tol.check):
            raise CommutationError(f"mu({x!r}) does not commute with mu(E)")
    w = np.linalg.eigvalsh(hermitian_part(m_e))
    if strict and not np.any((w > r) & (w < s)):
        raise VacuousProbeError("vacuous probe: spectrum of mu(E) misses (r, s)")

    f_of = borel_apply(m_e, f_rs(r, s), tol)
    members = set(subset)
    effects = [hermitian_part(e @ f_of) if x in members else e for x, e in zip(p.outcomes, p.effects)]
    nu = FinitePOVM(p.outcomes, effects)

    alpha = probe_lower_bound(r, s)
    if not is_psd(nu.total() - alpha * np.eye(p.dim), tol, scale=1.0):
        raise CertificateError("probe total fell below its lower bound")
    check_domination(nu, p, tol)
    return nu
