import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphon_spectra import operator_spectrum
from graphon_spectra.linalg import (
    ProjectionKernel,
    SignedSpectrum,
    eigh_hermitian,
    eigh_symmetric,
    group_distinct,
    hs_distance,
    hs_inner,
    projection_kernel,
    signed_order,
    truncate_alpha,
)
from helpers import random_graphon

# eigenvalues of the S3 model matrix, (r +- sqrt(p^2 + q^2 - pq)) with r=.6, p=.1, q=.3
S3_MODEL_EIGS = np.array([1.0, 0.6 + np.sqrt(0.07), 0.6 + np.sqrt(0.07),
                          0.6 - np.sqrt(0.07), 0.6 - np.sqrt(0.07), 0.2])


def _weighted_gram(spec):
    v = spec.vectors
    return (v.conj().T * spec.weights) @ v


class TestEighSymmetric:
    def test_single_cell(self):
        s = eigh_symmetric([[0.3]], [1.0])
        np.testing.assert_allclose(s.values, [0.3])
        np.testing.assert_allclose(s.eigvec(1), [1.0])

    def test_s3_model_matrix(self, s3):
        s = eigh_symmetric(s3.graphon.values, np.full(6, 1 / 6))
        np.testing.assert_allclose(s.values, S3_MODEL_EIGS / 6, atol=1e-12)
        assert s.zero_rank == 0
        assert s.indices.tolist() == [1, 2, 3, 4, 5, 6]

    def test_two_cell_antidiagonal(self):
        a = 0.4
        s = eigh_symmetric([[0, a], [a, 0]], [0.5, 0.5])
        np.testing.assert_allclose(s.values, [a / 2, -a / 2])
        assert s.indices.tolist() == [1, -1]
        # unit norm under weights 1/2 means entries of magnitude 1
        np.testing.assert_allclose(s.eigvec(1), [1, 1])
        np.testing.assert_allclose(s.eigvec(-1), [1, -1])

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            eigh_symmetric([[0, 1], [0.5, 0]], [0.5, 0.5])

    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            eigh_symmetric(np.eye(2), [0.7, 0.7])
        with pytest.raises(ValueError):
            eigh_symmetric(np.eye(2), [1.5, -0.5])
        with pytest.raises(ValueError):
            eigh_symmetric(np.eye(2), [1.0])

    def test_partial_solve_matches_full(self, rng):
        w = random_graphon(rng, 30)
        full = eigh_symmetric(w.values, w.cell_measures)
        part = eigh_symmetric(w.values, w.cell_measures, top=4)
        assert not part.complete and part.zero_rank is None
        np.testing.assert_allclose(part.values, full.pos_eigs[:4], atol=1e-12)

    def test_kernel_is_counted_not_stored(self):
        s = eigh_symmetric(np.ones((4, 4)) * 0.5, np.full(4, 0.25))
        assert len(s) == 1 and s.zero_rank == 3
        np.testing.assert_allclose(s.values, [0.5])

    def test_residuals(self, rng):
        w = random_graphon(rng, 12)
        s = eigh_symmetric(w.values, w.cell_measures)
        for i in s.indices:
            v = s.eigvec(i)
            res = w.values @ (w.cell_measures * v) - s.eigval(i) * v
            assert np.linalg.norm(res) <= 1e-9


class TestEighHermitian:
    def test_identity(self):
        vals, _ = eigh_hermitian(np.eye(2))
        np.testing.assert_allclose(vals, [1, 1])

    def test_s3_standard_block(self):
        # pi(gamma) for the standard irrep of S3, as printed
        m = np.array([[0.85, 0.0866025], [0.0866025, 0.35]]) / 6
        vals, _ = eigh_hermitian(m)
        np.testing.assert_allclose(vals * 6, [0.8645751, 0.3354249], atol=1e-7)

    def test_pauli_y(self):
        vals, vecs = eigh_hermitian([[0, 1j], [-1j, 0]])
        np.testing.assert_allclose(vals, [1, -1], atol=1e-15)
        m = np.array([[0, 1j], [-1j, 0]])
        assert np.abs(m @ vecs - vecs * vals).max() < 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            eigh_hermitian([[0, 1j], [1j, 0]])


class TestSignedOrder:
    def test_mixed_signs(self):
        assert signed_order([0.5, -0.5, 0.2]).tolist() == [1, -1, 2]

    def test_all_zero(self):
        assert signed_order([0.0, 0.0, 0.0], 1e-12).tolist() == [0, 0, 0]

    def test_table1_model_values(self):
        labels = signed_order([1.0, .8646, .8646, .3354, .3354, .2])
        assert labels.tolist() == [1, 2, 3, 4, 5, 6]

    def test_most_negative_is_minus_one(self):
        assert signed_order([-0.1, -0.4, 0.3]).tolist() == [-2, -1, 1]

    def test_ties_keep_position(self):
        assert signed_order([0.2, 0.5, 0.2]).tolist() == [2, 1, 3]

    @given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=12),
           st.randoms(use_true_random=False))
    def test_permutation_invariant(self, vals, rnd):
        perm = list(range(len(vals)))
        rnd.shuffle(perm)
        a = signed_order(vals, 1e-9)
        b = signed_order([vals[p] for p in perm], 1e-9)
        mapping_a = {int(lab): vals[i] for i, lab in enumerate(a) if lab}
        mapping_b = {int(lab): vals[p] for lab, p in zip(b, perm) if lab}
        assert mapping_a == mapping_b


class TestGroupDistinct:
    def test_near_tie(self):
        s = SignedSpectrum.from_pairs([0.5, 0.5 - 1e-12, 0.3], np.eye(3), np.full(3, 1 / 3))
        groups = group_distinct(s, 1e-9)
        assert [g.index_set for g in groups] == [(1, 2), (3,)]

    def test_s3_multiplicities(self, s3):
        groups = group_distinct(operator_spectrum(s3.graphon))
        assert [g.multiplicity for g in groups] == [1, 2, 2, 1]

    def test_distinct_spectrum_gives_singletons(self):
        s = SignedSpectrum.from_pairs([0.4, -0.2, 0.1, -0.3], np.eye(4), np.full(4, 0.25))
        groups = group_distinct(s)
        assert all(g.multiplicity == 1 for g in groups)
        assert [g.index_set for g in groups] == [(1,), (2,), (-1,), (-2,)]

    def test_negative_rel_tol(self):
        s = SignedSpectrum.from_pairs([0.4], np.eye(1), [1.0])
        with pytest.raises(ValueError):
            group_distinct(s, -1)


class TestTruncation:
    def test_alpha_above_radius(self, s3):
        k = truncate_alpha(operator_spectrum(s3.graphon), 1.0)
        assert np.all(k == 0)

    def test_s3_rank_three(self, s3):
        k = truncate_alpha(operator_spectrum(s3.graphon), 0.1)
        # independent route: plain eigh of D^1/2 M D^1/2, keep |lambda| > 0.1
        b = s3.graphon.values / 6
        vals, vecs = np.linalg.eigh(b)
        keep = np.abs(vals) > 0.1
        expected = (vecs[:, keep] * vals[keep]) @ vecs[:, keep].T * 6
        assert np.linalg.matrix_rank(k, tol=1e-9) == 3
        np.testing.assert_allclose(k, expected, atol=1e-12)

    def test_small_alpha_recovers_graphon(self, rng):
        w = random_graphon(rng, 9)
        k = truncate_alpha(operator_spectrum(w), 1e-14)
        mm = np.outer(w.cell_measures, w.cell_measures)
        assert np.sqrt(np.sum(mm * (k - w.values) ** 2)) <= 1e-9

    def test_rejects_nonpositive_alpha(self, s3):
        with pytest.raises(ValueError):
            truncate_alpha(operator_spectrum(s3.graphon), 0.0)


class TestProjections:
    def test_empty_set(self, s3):
        p = projection_kernel(operator_spectrum(s3.graphon), [])
        assert p.rank == 0 and np.all(p.matrix == 0)

    def test_s3_mu2_constant_diagonal(self, s3):
        p = projection_kernel(operator_spectrum(s3.graphon), [2, 3])
        np.testing.assert_allclose(np.diag(p.matrix), 2.0, atol=1e-12)
        assert abs(p.trace() - 2) < 1e-12

    def test_full_set_is_identity(self, rng):
        w = random_graphon(rng, 5)
        s = operator_spectrum(w)
        p = projection_kernel(s, s.indices.tolist())
        f = rng.normal(size=5)
        np.testing.assert_allclose(p.apply(f), f, atol=1e-10)

    def test_unknown_index(self, s3):
        with pytest.raises(KeyError):
            projection_kernel(operator_spectrum(s3.graphon), [7])

    def test_hs_distance_identical(self, s3):
        p = projection_kernel(operator_spectrum(s3.graphon), [2, 3])
        assert hs_distance(p, p) == 0.0

    def test_hs_orthogonal_rank_one(self):
        w = np.array([0.5, 0.5])
        e1 = np.sqrt(2) * np.array([1.0, 0.0])
        e2 = np.sqrt(2) * np.array([0.0, 1.0])
        p = ProjectionKernel(np.outer(e1, e1), w, 1)
        q = ProjectionKernel(np.outer(e2, e2), w, 1)
        # each rank-one projection has HS norm 1
        assert abs(hs_distance(p, q) - np.sqrt(2)) < 1e-15

    @pytest.mark.parametrize("theta", [0.1, 0.7, np.pi / 4, 1.3])
    def test_hs_angle(self, theta):
        w = np.array([0.5, 0.5])
        a = np.sqrt(2) * np.array([1.0, 0.0])
        b = np.sqrt(2) * np.array([np.cos(theta), np.sin(theta)])
        p = ProjectionKernel(np.outer(a, a), w, 1)
        q = ProjectionKernel(np.outer(b, b), w, 1)
        assert abs(hs_distance(p, q) - np.sqrt(2) * np.sin(theta)) < 1e-12

    def test_weight_mismatch(self):
        p = ProjectionKernel(np.eye(2), np.array([0.5, 0.5]), 1)
        q = ProjectionKernel(np.eye(2), np.array([0.25, 0.75]), 1)
        with pytest.raises(ValueError):
            hs_distance(p, q)


def _graphons(min_k=1, max_k=8):
    return st.builds(
        lambda seed, k: random_graphon(np.random.default_rng(seed), k),
        st.integers(0, 2 ** 32 - 1), st.integers(min_k, max_k))


class TestSpectralProperties:
    @given(_graphons())
    def test_hilbert_schmidt_identity(self, w):
        s = operator_spectrum(w)
        mm = np.outer(w.cell_measures, w.cell_measures)
        assert abs(np.sum(s.values ** 2) - np.sum(mm * w.values ** 2)) <= 1e-8

    @given(_graphons())
    def test_reconstruction(self, w):
        s = operator_spectrum(w)
        mm = np.outer(w.cell_measures, w.cell_measures)
        err = np.sqrt(np.sum(mm * np.abs(s.reconstruct() - w.values) ** 2))
        assert err <= 1e-8

    @given(_graphons())
    def test_orthonormal(self, w):
        s = operator_spectrum(w)
        np.testing.assert_allclose(_weighted_gram(s), np.eye(len(s)), atol=1e-10)

    @given(_graphons(2))
    def test_projection_invariants(self, w):
        s = operator_spectrum(w)
        groups = group_distinct(s)
        kernels = [projection_kernel(s, g.index_set) for g in groups]
        for g, p in zip(groups, kernels):
            np.testing.assert_allclose(p.matrix, p.matrix.conj().T, atol=1e-12)
            np.testing.assert_allclose(p.compose(p).matrix, p.matrix, atol=1e-9)
            assert abs(p.trace() - g.multiplicity) <= 1e-9
        for a in range(len(kernels)):
            for b in range(a + 1, len(kernels)):
                assert abs(hs_inner(kernels[a], kernels[b])) <= 1e-9

    @given(_graphons(), st.floats(0.01, 0.5))
    def test_truncation_bands_sum(self, w, alpha):
        s = operator_spectrum(w)
        low = s.vectors[:, np.abs(s.values) <= alpha]
        lv = s.values[np.abs(s.values) <= alpha]
        band = (low * lv) @ low.conj().T
        np.testing.assert_allclose(truncate_alpha(s, alpha) + band, s.reconstruct(), atol=1e-12)

    @given(_graphons())
    def test_sign_convention(self, w):
        s = operator_spectrum(w)
        for col in s.vectors.T:
            mags = np.abs(col)
            first = int(np.argmax(mags >= mags.max() * (1 - 1e-8)))
            assert col[first].real > 0 and abs(np.imag(col[first])) < 1e-15
