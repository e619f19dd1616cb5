import numpy as np
import pytest
from hypothesis import given, strategies as st

from cstar_povm import FinitePOVM, Tolerance
from cstar_povm.convexity import (
    CStarCombination,
    combine,
    derivative_defects,
    extreme_split,
    extreme_test,
    krein_milman_decompose,
    radon_nikodym,
)
from cstar_povm.dilation import naimark_dilate
from cstar_povm.errors import CoefficientSumError, NotDominatedError, OutcomeMismatchError
from cstar_povm.generators import (
    random_commutative_povm,
    random_povm,
    random_pvm,
    random_rank_one_povm,
    seeded_corpus,
    trine_povm,
)
from cstar_povm.matrix_kernel import block_diag, random_unitary, range_rank
from cstar_povm.povm import direct_sum, is_normalized, is_pvm, pad_zero_outcomes

TOL = Tolerance()
seeds = st.integers(0, 2**32 - 1)


def oracle_extreme(p):
    """Extreme iff the outer products of range vectors within each effect are linearly independent."""
    vecs = []
    total = 0
    for e in p.effects:
        if np.linalg.norm(e, 2) <= 1e-9:
            continue
        r, q = range_rank(e)
        total += r * r
        for j in range(r):
            for k in range(r):
                vecs.append(np.outer(q[:, j], q[:, k].conj()).ravel())
    if not vecs:
        return True
    sv = np.linalg.svd(np.array(vecs), compute_uv=False)
    return int(np.sum(sv > 1e-8 * sv[0])) == total


def test_pvm_is_extreme(qubit_pvm):
    assert extreme_test(qubit_pvm).extreme
    assert extreme_test(random_pvm(4, 3, 5)).extreme


def test_half_is_not_extreme(half):
    res = extreme_test(half)
    assert not res.extreme
    d = res.witness
    assert np.allclose(np.abs(np.diag(d)), [1, 1]) and np.isclose(d[0, 0], -d[1, 1])
    plus, minus = extreme_split(res.dilation, d)
    assert {round(plus.effects[0, 0, 0].real, 12), round(minus.effects[0, 0, 0].real, 12)} == {0.0, 1.0}


def test_trine_is_extreme(trine):
    assert extreme_test(trine).extreme


@given(seeds, st.integers(1, 3), st.integers(1, 5))
def test_extreme_matches_independent_oracle(seed, d, n):
    p = random_povm(d, n, seed)
    assert extreme_test(p).extreme == oracle_extreme(p)


@pytest.mark.parametrize("p", seeded_corpus(60, seed=4), ids=lambda p: f"d{p.dim}n{p.n}")
def test_extreme_matches_oracle_on_corpus(p):
    assert extreme_test(p).extreme == oracle_extreme(p)


@given(seeds, st.integers(2, 4))
def test_rank_one_with_n_le_d_squared(seed, d):
    # rank-one POVMs with linearly independent projectors are extreme
    p = random_rank_one_povm(d, d + 1, seed)
    assert extreme_test(p).extreme == oracle_extreme(p)


@given(seeds, st.integers(1, 3), st.integers(2, 5))
def test_extreme_witness_validity(seed, d, n):
    p = random_povm(d, n, seed)
    res = extreme_test(p)
    if res.extreme:
        return
    dil = res.dilation
    w = res.witness
    assert np.allclose(dil.compress(w), 0, atol=10 * TOL.eps_eq)
    assert abs(np.linalg.norm(w, 2) - 1) < 1e-12
    plus, minus = extreme_split(dil, w)
    assert is_normalized(plus) and is_normalized(minus)
    assert not np.allclose(plus.effects, minus.effects)
    assert np.allclose((plus.effects + minus.effects) / 2, p.effects, atol=10 * TOL.eps_eq)


def test_radon_nikodym_examples():
    mu = random_povm(2, 3, 1)
    nu = FinitePOVM(mu.outcomes, 0.3 * mu.effects)
    rn = radon_nikodym(nu, mu)
    assert np.allclose(rn.D, 0.3 * np.eye(rn.D.shape[0]), atol=1e-9)
    rn = radon_nikodym(mu, mu)
    assert np.allclose(rn.D, np.eye(rn.D.shape[0]), atol=1e-9)


def test_radon_nikodym_errors():
    mu = random_povm(2, 2, 3)
    with pytest.raises(NotDominatedError, match="x1"):
        radon_nikodym(FinitePOVM(mu.outcomes, [1.5 * mu.effects[0], mu.effects[1]]), mu)
    pvm = FinitePOVM.from_effects([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    leak = FinitePOVM(pvm.outcomes, [np.array([[0.5, 0.1], [0.1, 0.05]]), np.zeros((2, 2))])
    with pytest.raises(NotDominatedError):
        radon_nikodym(leak, pvm)
    with pytest.raises(OutcomeMismatchError):
        radon_nikodym(FinitePOVM(("a", "b"), mu.effects), mu)


@given(seeds, st.integers(1, 3), st.integers(1, 4))
def test_radon_nikodym_round_trip(seed, d, n):
    rng = np.random.default_rng(seed)
    mu = random_povm(d, n, seed)
    dil = naimark_dilate(mu)
    blocks = []
    for _, r in dil.blocks:
        u = random_unitary(r, rng)
        blocks.append(u @ np.diag(rng.uniform(0, 1, r)) @ u.conj().T)
    planted = block_diag(*blocks)
    nu = FinitePOVM(mu.outcomes, dil.compress_blocks(planted))
    rn = radon_nikodym(nu, mu, dilation=dil)
    assert np.max(np.abs(rn.D - planted)) <= 10 * TOL.eps_eq
    assert derivative_defects(rn, nu) == []


def test_combine_examples(trine):
    p = random_povm(2, 3, 9)
    assert np.allclose(combine(CStarCombination(((np.eye(2), p),))).effects, p.effects)
    r = np.eye(2) / np.sqrt(2)
    assert np.allclose(combine(CStarCombination(((r, p), (r, p)))).effects, p.effects)
    with pytest.raises(CoefficientSumError):
        combine(CStarCombination(((r, p),)))


def test_krein_milman_examples(qubit_pvm, trine):
    km = krein_milman_decompose(qubit_pvm)
    for t, e in zip(km.terms, qubit_pvm.effects):
        assert np.allclose(t.coefficient, e)
        assert is_pvm(t.component)
    km = krein_milman_decompose(trine)
    assert len(km.terms) == 3
    for k, t in enumerate(km.terms):
        theta = 2 * np.pi * k / 3
        v = np.array([np.cos(theta), np.sin(theta)])
        assert np.allclose(t.coefficient, np.sqrt(2 / 3) * np.outer(v, v), atol=1e-12)
    assert np.allclose(km.coefficient_sum(), np.eye(2), atol=1e-12)
    assert np.allclose(combine(km).effects, trine.effects, atol=1e-12)


@given(seeds, st.integers(1, 4), st.integers(1, 5))
def test_krein_milman_round_trip(seed, d, n):
    p = pad_zero_outcomes(random_povm(d, n, seed), ["z"])
    km = krein_milman_decompose(p)
    assert len(km.terms) == n
    assert all(is_pvm(t.component) for t in km.terms)
    assert np.max(np.abs(combine(km).effects - p.effects)) <= 10 * TOL.eps_eq


@given(seeds)
def test_commutative_extreme_iff_pvm(seed):
    rng = np.random.default_rng(seed)
    if rng.integers(0, 2):
        p = random_pvm(2, 2, seed)
    else:
        p = random_commutative_povm(2, 2, seed)
    # in the commutative two-outcome qubit case extreme and projective coincide
    assert extreme_test(p).extreme == is_pvm(p)


@given(seeds, st.booleans(), st.booleans())
def test_extreme_on_disjoint_direct_sums(seed, a_pvm, b_pvm):
    a = (random_pvm if a_pvm else random_povm)(2, 2, seed)
    b = (random_pvm if b_pvm else random_povm)(2, 2, seed + 1)
    za = np.zeros((2, 2))
    p1 = FinitePOVM(("x1", "x2", "x3", "x4"), [*a.effects, za, za])
    p2 = FinitePOVM(("x1", "x2", "x3", "x4"), [za, za, *b.effects])
    s = direct_sum(p1, p2)
    assert extreme_test(s).extreme == (extreme_test(a).extreme and extreme_test(b).extreme)
