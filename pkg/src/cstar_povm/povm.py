"""Finite POVMs and their structural predicates.

A POVM on a finite outcome set is stored as one effect per outcome. The value
on a subset is always the sum of its singleton effects. Subnormalized POVMs
(total <= I) are allowed, normalization is a predicate.

In the discrete sigma-algebra of a finite set every supported singleton is an
atom and every POVM is purely atomic, so ``atoms`` coincides with ``support``
and the non-atomic part of any POVM is zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatchError, OutcomeMismatchError, PovmError
from .matrix_kernel import (
    DEFAULT_TOL,
    Tolerance,
    block_diag,
    hermitian_part,
    is_hermitian,
    is_psd,
)

__all__ = [
    "FinitePOVM",
    "ValidationReport",
    "IsoWitness",
    "validate",
    "is_normalized",
    "is_pvm",
    "effect_is_zero",
    "support",
    "atoms",
    "subset_effect",
    "pairing_measure",
    "direct_sum",
    "mutually_singular",
    "coarsen",
    "measure_isomorphic",
    "relabel",
    "permute",
    "pad_zero_outcomes",
    "dirac",
]


@dataclass(frozen=True, eq=False)
class FinitePOVM:
    """Outcome labels plus one positive operator per outcome.

    ``effects`` is stored as a read-only ``(n, d, d)`` complex array. Effects
    are checked to be Hermitian on construction and stored symmetrized;
    positivity and normalization are reported by :func:`validate`.
    """

    outcomes: tuple
    effects: np.ndarray

    def __post_init__(self):
        outcomes = tuple(str(x) for x in self.outcomes)
        if len(set(outcomes)) != len(outcomes):
            raise PovmError(f"outcome labels must be distinct: {list(outcomes)}")
        mats = [np.asarray(e, dtype=complex) for e in self.effects]
        if len(mats) != len(outcomes):
            raise DimensionMismatchError(
                f"{len(outcomes)} outcomes but {len(mats)} effects"
            )
        if not mats:
            raise PovmError("a POVM needs at least one outcome")
        shapes = {m.shape for m in mats}
        if len(shapes) != 1:
            raise DimensionMismatchError(f"effects have mismatched shapes {sorted(shapes)}")
        (shape,) = shapes
        if len(shape) != 2 or shape[0] != shape[1] or shape[0] == 0:
            raise DimensionMismatchError(f"effects must be square and nonempty, got {shape}")
        for label, m in zip(outcomes, mats):
            if not is_hermitian(m, DEFAULT_TOL):
                raise PovmError(f"effect for outcome {label!r} is not Hermitian")
        arr = np.array([hermitian_part(m) for m in mats])
        arr.setflags(write=False)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "effects", arr)

    @classmethod
    def from_effects(cls, effects: Iterable, outcomes: Sequence | None = None) -> "FinitePOVM":
        effects = [np.atleast_2d(np.asarray(e, dtype=complex)) for e in effects]
        if outcomes is None:
            outcomes = [f"x{i + 1}" for i in range(len(effects))]
        return cls(tuple(outcomes), effects)

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    @property
    def n(self) -> int:
        return len(self.outcomes)

    def index(self, label) -> int:
        try:
            return self.outcomes.index(str(label))
        except ValueError:
            raise OutcomeMismatchError(f"unknown outcome {label!r}") from None

    def effect(self, label) -> np.ndarray:
        return self.effects[self.index(label)]

    def total(self) -> np.ndarray:
        return self.effects.sum(axis=0)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"FinitePOVM(dim={self.dim}, outcomes={list(self.outcomes)})"


@dataclass(frozen=True)
class ValidationReport:
    psd_ok: bool
    total: np.ndarray
    normalized: bool
    bounded: bool


def validate(p: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """Positivity of each effect, the total, and whether the total equals (or stays below) I.

    Effect positivity is judged against the largest entry of the whole
    measure, so an effect that is zero up to round-off passes.
    """
    scale = float(np.max(np.abs(p.effects), initial=0.0))
    psd_ok = all(is_psd(e, tol, scale=scale) for e in p.effects)
    total = p.total()
    eye = np.eye(p.dim)
    normalized = bool(np.max(np.abs(total - eye)) <= tol.eps_eq)
    bounded = normalized or is_psd(eye - total, tol, scale=1.0)
    return ValidationReport(psd_ok=psd_ok, total=total, normalized=normalized, bounded=bounded)


def is_normalized(p: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> bool:
    r = validate(p, tol)
    return r.psd_ok and r.normalized


def is_pvm(p: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``mu_i mu_j = delta_ij mu_i`` for all outcome pairs."""
    e = p.effects
    products = np.einsum("iab,jbc->ijac", e, e)
    target = np.zeros_like(products)
    idx = np.arange(p.n)
    target[idx, idx] = e
    return bool(np.max(np.abs(products - target)) <= tol.eps_eq)


def effect_is_zero(effect: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    # effects are bounded by I, so the rank cutoff is taken against the identity
    return float(np.linalg.norm(effect, 2)) <= tol.eps_rank


def support(p: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> tuple:
    return tuple(x for x, e in zip(p.outcomes, p.effects) if not effect_is_zero(e, tol))


def atoms(p: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> tuple:
    """Atoms of a finite discrete POVM: exactly its supported singletons."""
    return support(p, tol)


def subset_effect(p: FinitePOVM, labels: Iterable) -> np.ndarray:
    """``mu(A)`` as the sum of singleton effects."""
    out = np.zeros((p.dim, p.dim), dtype=complex)
    for x in labels:
        out = out + p.effect(x)
    return out


def pairing_measure(p: FinitePOVM, h, k) -> np.ndarray:
    """The scalar measure ``x -> <h, mu({x}) k>`` (inner product conjugate-linear in ``h``)."""
    h = np.asarray(h, dtype=complex).ravel()
    k = np.asarray(k, dtype=complex).ravel()
    if h.size != p.dim or k.size != p.dim:
        raise DimensionMismatchError(f"vectors must have length {p.dim}")
    return np.einsum("a,iab,b->i", h.conj(), p.effects, k)


def _same_outcomes(p1: FinitePOVM, p2: FinitePOVM):
    if p1.outcomes != p2.outcomes:
        raise OutcomeMismatchError(
            f"outcome lists differ: {list(p1.outcomes)} vs {list(p2.outcomes)}"
        )


def direct_sum(p1: FinitePOVM, p2: FinitePOVM) -> FinitePOVM:
    _same_outcomes(p1, p2)
    return FinitePOVM(p1.outcomes, [block_diag(a, b) for a, b in zip(p1.effects, p2.effects)])


def mutually_singular(p1: FinitePOVM, p2: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> bool:
    _same_outcomes(p1, p2)
    return not set(support(p1, tol)) & set(support(p2, tol))


def coarsen(p: FinitePOVM, partition: Sequence[Sequence], representatives: Sequence) -> FinitePOVM:
    """Push ``p`` forward along a partition: each group collapses onto its representative."""
    groups = [[str(x) for x in g] for g in partition]
    reps = [str(x) for x in representatives]
    if len(groups) != len(reps):
        raise PovmError("need exactly one representative per group")
    flat = [x for g in groups for x in g]
    if sorted(flat) != sorted(p.outcomes) or len(set(flat)) != len(flat):
        raise PovmError("partition must cover every outcome exactly once")
    for g, r in zip(groups, reps):
        if not g:
            raise PovmError("partition groups must be nonempty")
        if r not in g:
            raise PovmError(f"representative {r!r} is not in its group {g}")
    return FinitePOVM(tuple(reps), [subset_effect(p, g) for g in groups])


@dataclass(frozen=True)
class IsoWitness:
    """Bijection between supported outcomes of two measure-isomorphic POVMs."""

    mapping: Mapping[str, str]

    def inverse(self) -> "IsoWitness":
        return IsoWitness({v: k for k, v in self.mapping.items()})


def measure_isomorphic(p1: FinitePOVM, p2: FinitePOVM, tol: Tolerance = DEFAULT_TOL) -> IsoWitness | None:
    """Match supported outcomes by entrywise-equal effects; ``None`` when impossible.

    Null outcomes collapse in the quotient algebra and are ignored.
    """
    if p1.dim != p2.dim:
        return None
    s1 = list(support(p1, tol))
    s2 = list(support(p2, tol))
    if len(s1) != len(s2):
        return None
    e1 = {x: p1.effect(x) for x in s1}
    e2 = {y: p2.effect(y) for y in s2}
    candidates = {
        x: [y for y in s2 if np.max(np.abs(e1[x] - e2[y])) <= tol.eps_eq] for x in s1
    }
    # most constrained first keeps the backtracking shallow
    order = sorted(s1, key=lambda x: len(candidates[x]))
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def assign(i: int) -> bool:
        if i == len(order):
            return True
        x = order[i]
        for y in candidates[x]:
            if y in used:
                continue
            mapping[x] = y
            used.add(y)
            if assign(i + 1):
                return True
            del mapping[x]
            used.discard(y)
        return False

    if not assign(0):
        return None
    return IsoWitness({x: mapping[x] for x in s1})


def relabel(p: FinitePOVM, mapping: Mapping) -> FinitePOVM:
    return FinitePOVM(tuple(str(mapping.get(x, x)) for x in p.outcomes), p.effects)


def permute(p: FinitePOVM, order: Sequence[int]) -> FinitePOVM:
    """Reorder outcomes (labels travel with their effects)."""
    order = list(order)
    if sorted(order) != list(range(p.n)):
        raise PovmError("order must be a permutation of outcome indices")
    return FinitePOVM(tuple(p.outcomes[i] for i in order), p.effects[order])


def pad_zero_outcomes(p: FinitePOVM, labels: Sequence) -> FinitePOVM:
    zero = np.zeros((len(labels), p.dim, p.dim), dtype=complex)
    return FinitePOVM(p.outcomes + tuple(str(x) for x in labels), np.concatenate([p.effects, zero]))


def dirac(outcomes: Sequence, at, dim: int) -> FinitePOVM:
    """The spectral measure ``delta_x(.) I`` concentrated at outcome ``at``."""
    outcomes = tuple(str(x) for x in outcomes)
    effects = np.zeros((len(outcomes), dim, dim), dtype=complex)
    effects[outcomes.index(str(at))] = np.eye(dim)
    return FinitePOVM(outcomes, effects)


def subsets(labels: Sequence) -> Iterable[tuple]:
    """All subsets of ``labels``, smallest first."""
    for k in range(len(labels) + 1):
        yield from combinations(labels, k)
