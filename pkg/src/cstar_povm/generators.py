"""Seeded constructors for test POVMs.

Every function taking a ``seed`` is a pure function of its arguments.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import PerturbationError, PovmError, SingularOperatorError
from .matrix_kernel import DEFAULT_TOL, Tolerance, hermitian_part, inv_sqrt_pd, min_eigenvalue, random_unitary
from .povm import FinitePOVM

__all__ = [
    "random_povm",
    "random_pvm",
    "random_rank_one_povm",
    "random_commutative_povm",
    "trine_povm",
    "toeplitz_povm",
    "equal_arcs",
    "perturb_povm",
    "midpoint_split_search",
    "seeded_corpus",
]

TWO_PI = 2 * np.pi


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _check_sizes(d: int, n: int):
    if d < 1 or n < 1:
        raise PovmError("dimension and outcome count must be positive")


def random_povm(d: int, n: int, seed=0) -> FinitePOVM:
    """Normalized Gram POVM: ``S^{-1/2} G_i G_i^* S^{-1/2}`` with ``S = sum_i G_i G_i^*``."""
    _check_sizes(d, n)
    rng = _rng(seed)
    for _ in range(2):
        g = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
        a = np.einsum("iab,icb->iac", g, g.conj())
        try:
            r = inv_sqrt_pd(a.sum(axis=0))
        except PovmError:
            continue
        return FinitePOVM.from_effects([hermitian_part(r @ ai @ r) for ai in a])
    raise SingularOperatorError("Gram sum was singular twice")


def _random_ranks(d: int, n: int, rng) -> list[int]:
    if n <= d:
        cuts = np.sort(rng.choice(np.arange(1, d), size=n - 1, replace=False)) if n > 1 else []
        bounds = [0, *cuts, d]
        return [int(b - a) for a, b in zip(bounds[:-1], bounds[1:])]
    ranks = [0] * n
    for k in rng.choice(n, size=d, replace=False):
        ranks[int(k)] = 1
    return ranks


def random_pvm(d: int, n: int, seed=0) -> FinitePOVM:
    """Orthogonal projections onto column blocks of a Haar unitary; ranks sum to ``d``."""
    _check_sizes(d, n)
    rng = _rng(seed)
    ranks = _random_ranks(d, n, rng)
    u = random_unitary(d, rng)
    effects = []
    start = 0
    for r in ranks:
        cols = u[:, start:start + r]
        effects.append(cols @ cols.conj().T)
        start += r
    return FinitePOVM.from_effects(effects)


def random_rank_one_povm(d: int, n: int, seed=0) -> FinitePOVM:
    """Rank-one effects ``w_i w_i^*`` from the rows of a random ``n x d`` isometry (needs ``n >= d``)."""
    _check_sizes(d, n)
    if n < d:
        raise PovmError("rank-one POVMs need at least as many outcomes as the dimension")
    rng = _rng(seed)
    w = random_unitary(n, rng)[:, :d]
    return FinitePOVM.from_effects([np.outer(row.conj(), row) for row in w])


def random_commutative_povm(d: int, n: int, seed=0) -> FinitePOVM:
    """Diagonal POVM in a random eigenbasis: each diagonal slot is a random probability vector."""
    _check_sizes(d, n)
    rng = _rng(seed)
    probs = rng.dirichlet(np.ones(n), size=d)
    u = random_unitary(d, rng)
    return FinitePOVM.from_effects([u @ np.diag(probs[:, i]) @ u.conj().T for i in range(n)])


def trine_povm() -> FinitePOVM:
    effects = []
    for k in range(3):
        theta = TWO_PI * k / 3
        v = np.array([np.cos(theta), np.sin(theta)])
        effects.append((2 / 3) * np.outer(v, v))
    return FinitePOVM.from_effects(effects)


def equal_arcs(count: int) -> list[tuple[float, float]]:
    edges = np.linspace(0.0, TWO_PI, count + 1)
    edges[-1] = TWO_PI
    return [(float(a), float(b)) for a, b in zip(edges[:-1], edges[1:])]


def _arc_coefficients(a: float, b: float, m: int) -> np.ndarray:
    """Fourier coefficients of the indicator of ``[a, b)`` at ``-(m-1) .. m-1``."""
    k = np.arange(-(m - 1), m)
    out = np.empty(k.shape, dtype=complex)
    nz = k != 0
    out[~nz] = (b - a) / TWO_PI
    kk = k[nz]
    out[nz] = (np.exp(-1j * kk * b) - np.exp(-1j * kk * a)) / (-2j * np.pi * kk)
    return out


def toeplitz_povm(m: int, arcs: int | Sequence[tuple[float, float]] = 4) -> FinitePOVM:
    """Compressions of indicator multiplications to the first ``m`` Hardy-space modes.

    Entry ``(j, k)`` of the effect for ``[a, b)`` is the Fourier coefficient of
    its indicator at ``j - k``.
    """
    if m < 1:
        raise PovmError("truncation size must be positive")
    if isinstance(arcs, (int, np.integer)):
        arcs = equal_arcs(int(arcs))
    arcs = [(float(a), float(b)) for a, b in arcs]
    if not arcs:
        raise PovmError("need at least one arc")
    ordered = sorted(arcs)
    if abs(ordered[0][0]) > 1e-12 or abs(ordered[-1][1] - TWO_PI) > 1e-12:
        raise PovmError("arcs must cover [0, 2 pi)")
    for (a, b), (c, _) in zip(ordered[:-1], ordered[1:]):
        if abs(b - c) > 1e-12:
            raise PovmError("arcs overlap or leave a gap")
    if any(b <= a for a, b in arcs):
        raise PovmError("arcs must have positive length")
    idx = np.arange(m)
    diff = idx[:, None] - idx[None, :] + (m - 1)
    effects = [_arc_coefficients(a, b, m)[diff] for a, b in arcs]
    labels = [f"arc{i + 1}" for i in range(len(arcs))]
    return FinitePOVM.from_effects(effects, labels)


def _random_hermitian(d: int, rng) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = hermitian_part(z)
    return h / np.linalg.norm(h, 2)


def _strictly_psd(effects, slack: float = 1e-13) -> bool:
    return all(min_eigenvalue(e) >= -slack * max(1.0, float(np.max(np.abs(e)))) for e in effects)


def perturb_povm(p: FinitePOVM, epsilon: float, seed=0, retries: int = 10) -> FinitePOVM:
    """Move ``epsilon H`` from one effect to another, keeping the mirrored move valid too.

    ``p`` is the midpoint of the result and its mirror ``2p - result``; the
    step is halved until both stay positive, at most ``retries`` times.
    A strict positivity check is used so a returned pair always refutes
    extremity.
    """
    if epsilon == 0 or p.n < 2:
        return p
    rng = _rng(seed)
    i, j = (int(x) for x in rng.choice(p.n, size=2, replace=False))
    h = _random_hermitian(p.dim, rng)
    eps = float(epsilon)
    for _ in range(retries + 1):
        plus = p.effects.copy()
        plus[i] = plus[i] + eps * h
        plus[j] = plus[j] - eps * h
        minus = 2 * p.effects - plus
        if _strictly_psd(plus) and _strictly_psd(minus):
            return FinitePOVM(p.outcomes, plus)
        eps /= 2
    raise PerturbationError("no admissible perturbation within the retry cap")


def midpoint_split_search(p: FinitePOVM, trials: int = 50, epsilon: float = 0.1, seed=0):
    """Brute-force search for ``p = (p+ + p-)/2`` with ``p+ != p-``.

    Returns ``(p_plus, p_minus)`` or ``None``; a miss proves nothing.
    """
    rng = _rng(seed)
    for _ in range(trials):
        try:
            plus = perturb_povm(p, epsilon, rng)
        except PerturbationError:
            continue
        if plus is p:
            return None
        return plus, FinitePOVM(p.outcomes, 2 * p.effects - plus.effects)
    return None


def seeded_corpus(count: int, seed=0, max_dim: int = 2, max_outcomes: int = 3) -> list[FinitePOVM]:
    """Mixed corpus of Gram, projective, rank-one and commutative POVMs plus rotated trines."""
    rng = _rng(seed)
    out = []
    while len(out) < count:
        d = int(rng.integers(1, max_dim + 1))
        n = int(rng.integers(1, max_outcomes + 1))
        kind = int(rng.integers(0, 5))
        sub = int(rng.integers(0, 2**63))
        if kind == 0:
            out.append(random_povm(d, n, sub))
        elif kind == 1:
            out.append(random_pvm(d, n, sub))
        elif kind == 2 and n >= d:
            out.append(random_rank_one_povm(d, n, sub))
        elif kind == 3:
            out.append(random_commutative_povm(d, n, sub))
        elif kind == 4 and max_dim >= 2 and max_outcomes >= 3:
            u = random_unitary(2, np.random.default_rng(sub))
            t = trine_povm()
            out.append(FinitePOVM(t.outcomes, [u.conj().T @ e @ u for e in t.effects]))
    return out
