"""Minimal Naimark dilations, commutants and intertwiner spaces.

The dilation space is a direct sum of one block per outcome; block ``i`` has
dimension ``rank(mu_i)`` and the spectral measure sends outcome ``i`` to the
coordinate projection onto block ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, NotNormalizedError, NotPVMError, OutcomeMismatchError
from .matrix_kernel import DEFAULT_TOL, Tolerance, allclose, dagger, nullspace
from .povm import FinitePOVM, is_pvm, validate

__all__ = [
    "NaimarkDilation",
    "CommutantBasis",
    "naimark_dilate",
    "dilation_defects",
    "commutant",
    "dilation_commutant",
    "hermitian_units",
    "intertwiners",
    "are_disjoint",
    "dilation_unitary",
]


@dataclass(frozen=True, eq=False)
class NaimarkDilation:
    source: FinitePOVM
    isometry: np.ndarray
    blocks: tuple  # per outcome: (offset, rank)

    @property
    def dim(self) -> int:
        return self.isometry.shape[1]

    @property
    def dilation_dim(self) -> int:
        return self.isometry.shape[0]

    def block_slice(self, i: int) -> slice:
        off, rank = self.blocks[i]
        return slice(off, off + rank)

    def block_rows(self, i: int) -> np.ndarray:
        """Row block ``V_i`` of the isometry, shape ``(rank_i, d)``."""
        return self.isometry[self.block_slice(i)]

    def spectral_effect(self, i: int) -> np.ndarray:
        p = np.zeros((self.dilation_dim, self.dilation_dim), dtype=complex)
        sl = self.block_slice(i)
        p[sl, sl] = np.eye(sl.stop - sl.start)
        return p

    def spectral_effects(self) -> list[np.ndarray]:
        return [self.spectral_effect(i) for i in range(len(self.blocks))]

    def spectral_povm(self) -> FinitePOVM:
        return FinitePOVM(self.source.outcomes, self.spectral_effects())

    def compress(self, op: np.ndarray) -> np.ndarray:
        """``V^* op V``."""
        v = self.isometry
        return dagger(v) @ op @ v

    def compress_blocks(self, op: np.ndarray) -> list[np.ndarray]:
        """``V^* op pi_i V`` for every outcome ``i``."""
        v = self.isometry
        out = []
        for i in range(len(self.blocks)):
            sl = self.block_slice(i)
            out.append(dagger(v) @ op[:, sl] @ v[sl])
        return out


def _phase_fix(vec: np.ndarray, cutoff: float = 1e-12) -> np.ndarray:
    nz = np.flatnonzero(np.abs(vec) > cutoff)
    if nz.size == 0:
        return vec
    c = vec[nz[0]]
    return vec * (abs(c) / c)


def _sorted_eigenpairs(effect: np.ndarray, tol: Tolerance):
    w, u = np.linalg.eigh((effect + dagger(effect)) / 2)
    keep = w > tol.eps_rank
    w = w[keep]
    vecs = [_phase_fix(u[:, k]) for k in np.flatnonzero(keep)]

    def key(k):
        v = vecs[k]
        return (-round(float(w[k]), 10), tuple(np.round(np.column_stack([v.real, v.imag]).ravel(), 10)))

    order = sorted(range(len(vecs)), key=key)
    if not order:
        return np.zeros(0), np.zeros((effect.shape[0], 0), dtype=complex)
    return w[order], np.column_stack([vecs[k] for k in order])


def naimark_dilate(p: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> NaimarkDilation:
    """Minimal Naimark dilation of a normalized POVM.

    Block ``i`` carries the eigenvectors of ``mu_i`` with eigenvalue above
    ``eps_rank`` (descending, phase-fixed); row block ``V_i = diag(sqrt(w)) Q^*``
    so that ``V_i^* V_i = mu_i``.
    """
    report = validate(p, tol)
    if not (report.psd_ok and report.normalized):
        raise NotNormalizedError("Naimark dilation requires a normalized POVM")
    rows = []
    blocks = []
    offset = 0
    for e in p.effects:
        w, q = _sorted_eigenpairs(e, tol)
        rows.append(np.sqrt(w)[:, None] * dagger(q))
        blocks.append((offset, len(w)))
        offset += len(w)
    v = np.vstack(rows) if offset else np.zeros((0, p.dim), dtype=complex)
    # eigenvalues under the cutoff are dropped; restore V^* V = I exactly so the
    # truncation shows up only as an O(eps_rank) compression error
    w, u = np.linalg.eigh(dagger(v) @ v)
    v = v @ ((u / np.sqrt(w)) @ dagger(u))
    return NaimarkDilation(p, v, tuple(blocks))


def dilation_defects(dil: NaimarkDilation, tol: Tolerance = DEFAULT_TOL) -> list[str]:
    """Names of violated dilation invariants (empty when the dilation is valid)."""
    bad = []
    v = dil.isometry
    if not allclose(dagger(v) @ v, np.eye(dil.dim), tol.eps_eq):
        bad.append("isometry")
    for i, e in enumerate(dil.source.effects):
        sl = dil.block_slice(i)
        if not allclose(dagger(v[sl]) @ v[sl], e, tol.check):
            bad.append(f"compression[{dil.source.outcomes[i]}]")
    offsets = [off for off, _ in dil.blocks]
    expected = np.cumsum([0] + [r for _, r in dil.blocks])[:-1]
    if list(offsets) != list(expected) or sum(r for _, r in dil.blocks) != dil.dilation_dim:
        bad.append("block_layout")
    for i, e in enumerate(dil.source.effects):
        rank = int(np.sum(np.linalg.eigvalsh((e + dagger(e)) / 2) > tol.eps_rank))
        if rank != dil.blocks[i][1]:
            bad.append(f"minimality[{dil.source.outcomes[i]}]")
    return bad


@dataclass(frozen=True, eq=False)
class CommutantBasis:
    """Basis of ``{S : S G = G S for all generators G}``.

    ``basis`` spans the full complex solution space; ``hermitian_basis`` is a
    real-linear basis of its Hermitian elements. ``real_dimension`` counts the
    Hermitian slice, which for self-adjoint generator sets equals the complex
    dimension.
    """

    generators: tuple
    basis: tuple
    hermitian_basis: tuple
    dim: int = 0
    complex_dimension: int = field(init=False)
    real_dimension: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "complex_dimension", len(self.basis))
        object.__setattr__(self, "real_dimension", len(self.hermitian_basis))


def _hermitian_coordinates(m: int) -> list[np.ndarray]:
    """Frobenius-orthonormal real basis of m x m Hermitian matrices."""
    out = []
    for j in range(m):
        e = np.zeros((m, m), dtype=complex)
        e[j, j] = 1
        out.append(e)
    r = 1 / np.sqrt(2)
    for j in range(m):
        for k in range(j + 1, m):
            e = np.zeros((m, m), dtype=complex)
            e[j, k] = e[k, j] = r
            out.append(e)
            e = np.zeros((m, m), dtype=complex)
            e[j, k] = -1j * r
            e[k, j] = 1j * r
            out.append(e)
    return out


def _commutator_matrix(generators: Sequence[np.ndarray], m: int) -> np.ndarray:
    # row-major vec: vec(S G) = (I kron G^T) vec(S), vec(G S) = (G kron I) vec(S)
    eye = np.eye(m)
    return np.vstack([np.kron(eye, g.T) - np.kron(g, eye) for g in generators])


def commutant(generators: Sequence[np.ndarray], dim: int | None = None,
              tol: Tolerance = DEFAULT_TOL) -> CommutantBasis:
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if not gens:
        if dim is None:
            raise DimensionMismatchError("empty generator list needs an explicit dim")
        m = dim
    else:
        m = gens[0].shape[0]
        if any(g.shape != (m, m) for g in gens):
            raise DimensionMismatchError("generators must be square of equal size")
    if not gens:
        full = [u.reshape(m, m) for u in np.eye(m * m, dtype=complex)]
        herm = _hermitian_coordinates(m)
        return CommutantBasis((), tuple(full), tuple(herm), m)

    big = _commutator_matrix(gens, m)
    scale = max(float(np.linalg.norm(g, 2)) for g in gens)
    null = nullspace(big, tol, scale)
    basis = tuple(null[:, k].reshape(m, m) for k in range(null.shape[1]))

    coords = _hermitian_coordinates(m)
    hmat = np.column_stack([h.ravel() for h in coords])
    image = big @ hmat
    real_null = nullspace(np.vstack([image.real, image.imag]), tol, scale)
    herm = tuple(
        sum(c * h for c, h in zip(real_null[:, k].real, coords)) for k in range(real_null.shape[1])
    )
    return CommutantBasis(tuple(gens), basis, herm, m)


def hermitian_units(offset: int, rank: int, size: int) -> list[np.ndarray]:
    """Orthonormal Hermitian basis of the operators supported on one diagonal block."""
    out = []
    for h in _hermitian_coordinates(rank):
        e = np.zeros((size, size), dtype=complex)
        e[offset:offset + rank, offset:offset + rank] = h
        out.append(e)
    return out


def dilation_commutant(dil: NaimarkDilation) -> CommutantBasis:
    """Closed form: the commutant of a block-coordinate PVM is block-diagonal operators."""
    size = dil.dilation_dim
    units = []
    herm = []
    for off, rank in dil.blocks:
        for j in range(rank):
            for k in range(rank):
                e = np.zeros((size, size), dtype=complex)
                e[off + j, off + k] = 1
                units.append(e)
        herm.extend(hermitian_units(off, rank, size))
    return CommutantBasis(tuple(dil.spectral_effects()), tuple(units), tuple(herm), size)


def _as_effect_list(pvm) -> list[np.ndarray]:
    if isinstance(pvm, FinitePOVM):
        return list(pvm.effects)
    return [np.asarray(e, dtype=complex) for e in pvm]


def _require_pvm(effects: list[np.ndarray], tol: Tolerance):
    if not is_pvm(FinitePOVM.from_effects(effects), tol):
        raise NotPVMError("intertwiners are defined here for projection valued measures only")


def intertwiners(pi1, pi2, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Basis of ``{T : T pi1_i = pi2_i T for all i}``; ``T`` maps the space of ``pi1`` to that of ``pi2``."""
    e1 = _as_effect_list(pi1)
    e2 = _as_effect_list(pi2)
    if len(e1) != len(e2):
        raise OutcomeMismatchError("spectral measures must share the outcome list")
    _require_pvm(e1, tol)
    _require_pvm(e2, tol)
    m1 = e1[0].shape[0]
    m2 = e2[0].shape[0]
    # row-major vec of T (m2 x m1): vec(T P) = (I kron P^T) vec T, vec(Q T) = (Q kron I) vec T
    rows = [np.kron(np.eye(m2), a.T) - np.kron(b, np.eye(m1)) for a, b in zip(e1, e2)]
    null = nullspace(np.vstack(rows), tol, scale=1.0)
    return [null[:, k].reshape(m2, m1) for k in range(null.shape[1])]


def are_disjoint(p1: FinitePOVM, p2: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> bool:
    if p1.outcomes != p2.outcomes:
        raise OutcomeMismatchError("spectral measures must share the outcome list")
    return not intertwiners(p1, p2, tol)


def dilation_unitary(a: NaimarkDilation, b: NaimarkDilation, tol: Tolerance = DEFAULT_TOL) -> np.ndarray | None:
    """Unitary ``W`` with ``W V_a = V_b`` and ``W pi_a = pi_b W``, or ``None``.

    Solved as a least-squares problem over the intertwiner space of the two
    spectral measures, then checked for unitarity.
    """
    if a.dilation_dim != b.dilation_dim:
        return None
    basis = intertwiners(a.spectral_effects(), b.spectral_effects(), tol)
    if not basis:
        return None
    lhs = np.column_stack([(t @ a.isometry).ravel() for t in basis])
    coef, *_ = np.linalg.lstsq(lhs, b.isometry.ravel(), rcond=None)
    w = sum(c * t for c, t in zip(coef, basis))
    ok = (
        allclose(dagger(w) @ w, np.eye(w.shape[0]), tol.check)
        and allclose(w @ a.isometry, b.isometry, tol.check)
    )
    return w if ok else None
