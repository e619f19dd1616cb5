"""End-to-end acceptance checks at the stated sizes, tolerances and time limits.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""
import time

import numpy as np

from cstar_povm import FinitePOVM, Tolerance
from cstar_povm.convexity import (
    INEQUIVALENT,
    certificate_defects,
    combine,
    cstar_extreme_test,
    extreme_split,
    extreme_test,
    krein_milman_decompose,
    radon_nikodym,
    spectral_probe,
    witness_decomposition,
    word_trace,
    zhou_test,
)
from cstar_povm.dilation import commutant, intertwiners, naimark_dilate
from cstar_povm.errors import VacuousProbeError
from cstar_povm.generators import (
    midpoint_split_search,
    random_commutative_povm,
    random_povm,
    random_pvm,
    seeded_corpus,
    toeplitz_povm,
)
from cstar_povm.matrix_kernel import block_diag, random_unitary, same_span
from cstar_povm.povm import direct_sum, is_normalized, is_pvm, pad_zero_outcomes, permute, relabel
from cstar_povm.ucp import choi, is_homomorphism, povm_from_ucp, ucp_from_povm

TOL = Tolerance()


def mixed_sample(rng, d, n):
    seed = int(rng.integers(0, 2**63))
    return random_pvm(d, n, seed) if rng.integers(0, 2) else random_povm(d, n, seed)


def test_dilation_fidelity(criterion):
    with criterion(1, "dilation fidelity, 500 POVMs, 1e-8, < 10 s"):
        rng = np.random.default_rng(1)
        start = time.perf_counter()
        for _ in range(500):
            d = int(rng.integers(1, 5))
            n = int(rng.integers(1, 6))
            p = random_povm(d, n, int(rng.integers(0, 2**63)))
            dil = naimark_dilate(p)
            v = dil.isometry
            assert np.max(np.abs(v.conj().T @ v - np.eye(d))) <= 1e-8
            for i, e in enumerate(p.effects):
                pi = dil.spectral_effect(i)
                assert np.max(np.abs(v.conj().T @ pi @ v - e)) <= 1e-8
            ranks = [int(np.sum(np.linalg.eigvalsh(e) > 1e-9)) for e in p.effects]
            assert dil.dilation_dim == sum(ranks)
        assert time.perf_counter() - start < 10


def test_radon_nikodym_round_trip(criterion):
    with criterion(2, "Radon-Nikodym round trip, 200 planted D, 1e-8, < 10 s"):
        rng = np.random.default_rng(2)
        start = time.perf_counter()
        for _ in range(200):
            d = int(rng.integers(1, 4))
            n = int(rng.integers(1, 5))
            mu = random_povm(d, n, int(rng.integers(0, 2**63)))
            dil = naimark_dilate(mu)
            blocks = []
            for _, r in dil.blocks:
                u = random_unitary(r, rng)
                blocks.append(u @ np.diag(rng.uniform(0, 1, r)) @ u.conj().T)
            planted = block_diag(*blocks)
            nu = FinitePOVM(mu.outcomes, dil.compress_blocks(planted))
            rn = radon_nikodym(nu, mu, dilation=dil)
            assert np.max(np.abs(rn.D - planted)) <= 1e-8
        assert time.perf_counter() - start < 10


def test_extreme_oracle_agreement(criterion):
    with criterion(3, "extreme test vs perturbation oracle, corpus of 200, < 60 s"):
        start = time.perf_counter()
        corpus = [p for p in seeded_corpus(200, seed=3, max_dim=2, max_outcomes=3) if p.dim <= 2 and p.n <= 3]
        assert len(corpus) == 200
        refuted = 0
        for k, p in enumerate(corpus):
            res = extreme_test(p)
            split = midpoint_split_search(p, trials=50, seed=k)
            if res.extreme:
                assert split is None
            else:
                w = res.witness
                assert np.max(np.abs(res.dilation.compress(w))) <= 10 * TOL.eps_eq
                assert np.linalg.norm(w, 2) > 0.5
                plus, minus = extreme_split(res.dilation, w)
                assert is_normalized(plus) and is_normalized(minus)
            if split is not None:
                refuted += 1
                plus, minus = split
                assert np.allclose((plus.effects + minus.effects) / 2, p.effects)
        assert refuted > 0
        assert time.perf_counter() - start < 60


def test_finite_dimensional_cstar_theorem(criterion):
    with criterion(4, "C*-extreme iff PVM, 1000 POVMs with verified certificates, < 120 s"):
        start = time.perf_counter()
        corpus = seeded_corpus(1000, seed=4, max_dim=3, max_outcomes=4)
        non_pvm = 0
        for k, p in enumerate(corpus):
            res = cstar_extreme_test(p, seed=k)
            assert res.cstar_extreme == is_pvm(p)
            if res.cstar_extreme:
                continue
            non_pvm += 1
            comb = res.certificate
            assert comb.is_proper()
            first = comb.terms[0].component
            assert res.equivalence.verdict == INEQUIVALENT
            assert certificate_defects(res.equivalence, first, p) == []
            t1 = word_trace(first.effects, res.equivalence.word)
            t2 = word_trace(p.effects, res.equivalence.word)
            assert abs(t1 - t2) > 10 * TOL.eps_eq
            assert np.max(np.abs(combine(comb).effects - p.effects)) <= 1e-8
        assert 0 < non_pvm < len(corpus)
        assert time.perf_counter() - start < 120


def test_hand_computed_witness(criterion):
    with criterion(5, "scalar witness {0.5, 0.5}, D = diag(1,0), alpha = 0.9, 1e-12"):
        half = FinitePOVM.from_effects([[[0.5]], [[0.5]]])
        comb = witness_decomposition(half, np.diag([1.0, 0.0]), 0.9)
        t1, t2 = (t.coefficient for t in comb.terms)
        mu1, mu2 = (t.component for t in comb.terms)
        assert abs((t1 @ t1)[0, 0] - 0.45) <= 1e-12
        assert abs((t2 @ t2)[0, 0] - 0.55) <= 1e-12
        assert np.max(np.abs(mu1.effects.ravel() - [1, 0])) <= 1e-12
        assert np.max(np.abs(mu2.effects.ravel() - [1 / 11, 10 / 11])) <= 1e-12


def test_spectral_probe_pipeline(criterion):
    with criterion(6, "probe + Zhou refutes 100 commutative non-PVMs; hand case 1e-12"):
        rng = np.random.default_rng(6)
        count = 0
        while count < 100:
            d = int(rng.integers(1, 4))
            n = int(rng.integers(2, 5))
            p = random_commutative_povm(d, n, int(rng.integers(0, 2**63)))
            if is_pvm(p):
                continue
            count += 1
            nu = None
            for x in p.outcomes:
                try:
                    nu = spectral_probe(p, [x])
                    break
                except VacuousProbeError:
                    continue
            assert nu is not None
            assert zhou_test(p, nu).exists_S is False
        half = FinitePOVM.from_effects([[[0.5]], [[0.5]]])
        nu = spectral_probe(half, ["x1"], 0.25, 0.75)
        assert np.max(np.abs(nu.effects.ravel() - [1 / 6, 1 / 2])) <= 1e-12
        assert zhou_test(half, nu).exists_S is False


def test_direct_sum_theorem(criterion):
    with criterion(7, "direct sums of 100 mutually singular pairs; disjoint spectral measures"):
        rng = np.random.default_rng(7)
        for k in range(100):
            d1, d2 = (int(x) for x in rng.integers(1, 3, size=2))
            n1, n2 = (int(x) for x in rng.integers(1, 4, size=2))
            a = mixed_sample(rng, d1, n1)
            b = mixed_sample(rng, d2, n2)
            labels = tuple(f"x{i + 1}" for i in range(n1 + n2))
            p1 = FinitePOVM(labels, [*a.effects, *[np.zeros((d1, d1))] * n2])
            p2 = FinitePOVM(labels, [*[np.zeros((d2, d2))] * n1, *b.effects])
            s = direct_sum(p1, p2)
            want = cstar_extreme_test(a, seed=k).cstar_extreme and cstar_extreme_test(b, seed=k).cstar_extreme
            assert cstar_extreme_test(s, seed=k).cstar_extreme == want
            assert extreme_test(s).extreme == (extreme_test(a).extreme and extreme_test(b).extreme)
            pi1 = naimark_dilate(p1).spectral_effects()
            pi2 = naimark_dilate(p2).spectral_effects()
            assert intertwiners(pi1, pi2) == []


def test_krein_milman(criterion):
    with criterion(8, "Krein-Milman decomposition of 200 POVMs, 1e-10"):
        rng = np.random.default_rng(8)
        for _ in range(200):
            d = int(rng.integers(1, 5))
            n = int(rng.integers(1, 6))
            p = random_povm(d, n, int(rng.integers(0, 2**63)))
            km = krein_milman_decompose(p)
            assert np.max(np.abs(km.coefficient_sum() - np.eye(d))) <= 1e-10
            assert np.max(np.abs(combine(km).effects - p.effects)) <= 1e-10
            assert all(is_pvm(t.component) for t in km.terms)


def test_ucp_correspondence(criterion):
    with criterion(9, "UCP correspondence on 200 instances, < 30 s"):
        rng = np.random.default_rng(9)
        start = time.perf_counter()
        for _ in range(200):
            d = int(rng.integers(1, 4))
            n = int(rng.integers(1, 5))
            p = mixed_sample(rng, d, n)
            u = ucp_from_povm(p)
            back = povm_from_ucp(u)
            assert np.array_equal(back.effects, p.effects) and back.outcomes == p.outcomes
            assert is_homomorphism(u) == is_pvm(p)
            assert np.linalg.eigvalsh(choi(u))[0] >= -1e-12
            fs = list(np.eye(n)) + [rng.standard_normal(n) + 1j * rng.standard_normal(n) for _ in range(8)]
            images = [u(f) for f in fs]
            images += [im.conj().T for im in images]
            assert same_span(commutant(list(p.effects)).basis, commutant(images).basis)
        assert time.perf_counter() - start < 30


def test_toeplitz_exemplar(criterion):
    with criterion(10, "Toeplitz truncation m = 8, 4 arcs: refuted with verified certificate"):
        p = toeplitz_povm(8, 4)
        assert np.max(np.abs(p.total() - np.eye(8))) <= 1e-12
        assert not is_pvm(p)
        res = cstar_extreme_test(p)
        assert not res.cstar_extreme
        first = res.certificate.terms[0].component
        assert certificate_defects(res.equivalence, first, p) == []
        assert np.max(np.abs(combine(res.certificate).effects - p.effects)) <= 10 * TOL.eps_eq
        assert res.certificate.is_proper()


def test_isomorphism_invariance(criterion):
    with criterion(11, "verdicts invariant under relabelling and zero padding, 100 instances"):
        rng = np.random.default_rng(11)
        for k in range(100):
            d = int(rng.integers(1, 4))
            n = int(rng.integers(1, 4))
            p = mixed_sample(rng, d, n)
            q = relabel(p, {x: f"y{x}" for x in p.outcomes})
            q = pad_zero_outcomes(q, [f"z{j}" for j in range(int(rng.integers(0, 3)))])
            q = permute(q, list(rng.permutation(q.n)))
            assert is_pvm(p) == is_pvm(q)
            assert extreme_test(p).extreme == extreme_test(q).extreme
            assert cstar_extreme_test(p, seed=k).cstar_extreme == cstar_extreme_test(q, seed=k).cstar_extreme
