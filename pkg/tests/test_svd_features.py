"""
Tests for truncated SVDs, regularized inverses and feature-set construction.
"""

import numpy as np
import pytest

from src.methods.kernels import KernelSpec, Parity
from src.methods.svd_features import (
    InverseMode,
    MatrixSample,
    build_feature_set,
    inverse_sqrt,
    pseudo_inverse,
    regularized_inverse,
    truncate_all,
    truncated_svd,
)
from src.utils.errors import (
    DimensionMismatchError,
    IllConditionedError,
    InvalidParameterError,
    KernelParityError,
    NonFiniteInputError,
    RankDeficientError,
    RepeatedSingularValueError,
)


class TestMatrixSample:

    def test_shapes(self, random_sample):
        assert (random_sample.n, random_sample.p1, random_sample.p2) == (20, 6, 5)
        assert len(random_sample) == 20

    def test_from_matrices_rejects_mixed_shapes(self):
        with pytest.raises(DimensionMismatchError):
            MatrixSample.from_matrices([np.eye(2), np.eye(3)])

    def test_rejects_non_finite(self):
        obs = np.ones((2, 2, 2))
        obs[1, 0, 0] = np.inf
        with pytest.raises(NonFiniteInputError):
            MatrixSample(obs)


class TestTruncatedSvd:

    def test_rank_one_of_diagonal(self):
        svd = truncated_svd(np.diag([3.0, 1.0]), 1)
        np.testing.assert_allclose(svd.singular_values, [3.0])
        np.testing.assert_allclose(np.abs(svd.left_vectors[:, 0]), [1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(np.abs(svd.right_vectors[:, 0]), [1.0, 0.0], atol=1e-15)
        # joint sign: u v' reproduces the leading block with a positive sign
        assert svd.left_vectors[0, 0] * svd.right_vectors[0, 0] > 0

    def test_full_rank_of_diagonal(self):
        np.testing.assert_allclose(truncated_svd(np.diag([3.0, 1.0]), 2).singular_values, [3.0, 1.0])

    def test_truncation_error_is_next_singular_value(self, rng):
        X = rng.standard_normal((4, 3))
        svd = truncated_svd(X, 2)
        full = np.linalg.svd(X, compute_uv=False)
        assert np.linalg.norm(X - svd.reconstruct(), 2) == pytest.approx(full[2], rel=1e-10)

    def test_rank_deficiency(self):
        X = np.outer([1.0, 2.0, 3.0], [1.0, -1.0])
        with pytest.raises(RankDeficientError, match="rank below requested r"):
            truncated_svd(X, 2)

    def test_repeated_singular_values(self):
        with pytest.raises(RepeatedSingularValueError, match="repeated singular value"):
            truncated_svd(np.diag([2.0, 2.0, 1.0]), 2)

    def test_rank_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            truncated_svd(np.eye(3), 4)


class TestRegularizedInverse:

    def test_diagonal(self):
        np.testing.assert_allclose(
            regularized_inverse(np.diag([4.0, 1.0]), 0.2),
            np.diag([1 / 4.8, 1 / 1.8]),
            rtol=1e-12,
        )

    def test_identity_without_regularization(self):
        np.testing.assert_allclose(regularized_inverse(np.eye(3), 0.0), np.eye(3), atol=1e-14)

    def test_matches_direct_inverse(self, rng):
        M = rng.standard_normal((5, 5))
        K = M @ M.T + 0.5 * np.eye(5)
        np.testing.assert_allclose(regularized_inverse(K, 0.0), np.linalg.inv(K), rtol=1e-8, atol=1e-10)

    def test_inverse_sqrt(self):
        np.testing.assert_allclose(inverse_sqrt(4.0 * np.eye(2), 0.0), 0.5 * np.eye(2), atol=1e-14)
        np.testing.assert_allclose(inverse_sqrt(np.eye(2), 0.2), np.eye(2) / np.sqrt(1.2), atol=1e-14)

    def test_inverse_sqrt_squares_to_inverse(self, rng):
        M = rng.standard_normal((4, 4))
        K = M @ M.T
        S = inverse_sqrt(K, 0.2)
        np.testing.assert_allclose(S @ S, regularized_inverse(K, 0.2), rtol=1e-9, atol=1e-12)

    def test_singular_without_regularization(self):
        with pytest.raises(IllConditionedError):
            regularized_inverse(np.diag([1.0, 0.0]), 0.0)

    def test_zero_matrix(self):
        with pytest.raises(IllConditionedError):
            regularized_inverse(np.zeros((2, 2)), 0.2)

    def test_pseudo_inverse_drops_null_space(self):
        np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]), atol=1e-14)

    def test_rejects_asymmetric(self):
        with pytest.raises(InvalidParameterError):
            regularized_inverse(np.array([[1.0, 0.5], [0.0, 1.0]]), 0.2)


class TestBuildFeatureSet:

    @pytest.fixture
    def orthogonal_pair(self):
        """Two rank-one observations with orthogonal singular vectors."""
        e1, e2 = np.eye(2)
        return MatrixSample(np.stack([3.0 * np.outer(e1, e1), 1.0 * np.outer(e2, e2)]))

    def test_linear_raw_orthogonal_example(self, orthogonal_pair):
        fs = build_feature_set(orthogonal_pair, r=1, m=1, k1=KernelSpec.linear(), k2=KernelSpec.linear(), eps=0.2)
        np.testing.assert_allclose(fs.K1, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(fs.K2, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(fs.F[0], [[3.0, 0.0], [0.0, 0.0]], atol=1e-15)
        np.testing.assert_allclose(fs.F[1], [[0.0, 0.0], [0.0, 1.0]], atol=1e-15)
        np.testing.assert_allclose(fs.K1_dag, np.eye(2) / 1.2, rtol=1e-12)

    def test_dimensions(self, random_sample):
        k = KernelSpec.gaussian(1.0, Parity.ODD)
        fs = build_feature_set(random_sample, r=2, m=2, k1=k, k2=k, eps=0.2)
        assert fs.size == 40
        assert fs.F.shape == (20, 40, 40)
        assert fs.left_basis.shape == (40, 6)
        assert fs.right_basis.shape == (40, 5)
        np.testing.assert_allclose(fs.F_bar, fs.F.mean(axis=0))

    @pytest.mark.parametrize("parity", [Parity.ODD, Parity.EVEN])
    def test_joint_sign_flips_leave_features_unchanged(self, random_sample, parity):
        k1 = KernelSpec.gaussian(0.8, parity)
        k2 = KernelSpec.gaussian(1.1, parity)
        svds = truncate_all(random_sample, 2)
        masks = np.random.default_rng(3).integers(0, 2, size=(random_sample.n, 2)).astype(bool)
        flipped = [svd.flip(mask) for svd, mask in zip(svds, masks)]

        base = build_feature_set(random_sample, 2, 1, k1, k2, 0.2, svds=svds)
        other = build_feature_set(random_sample, 2, 1, k1, k2, 0.2, svds=flipped)
        np.testing.assert_allclose(other.K1, base.K1, rtol=0, atol=1e-12)
        np.testing.assert_allclose(other.K2, base.K2, rtol=0, atol=1e-12)
        np.testing.assert_allclose(other.F, base.F, rtol=0, atol=1e-12)

    def test_basis_vectors_are_sign_canonical(self, random_sample):
        k = KernelSpec.gaussian(1.0, Parity.EVEN)
        fs = build_feature_set(random_sample, 2, 1, k, k, 0.2)
        for row in fs.left_basis:
            assert row[np.argmax(np.abs(row))] > 0

    def test_mixed_parity_rejected(self, random_sample):
        with pytest.raises(KernelParityError):
            build_feature_set(
                random_sample, 2, 1,
                KernelSpec.gaussian(1.0, Parity.ODD),
                KernelSpec.gaussian(1.0, Parity.EVEN),
                0.2,
            )

    def test_plain_parity_rejected(self, random_sample):
        k = KernelSpec.gaussian(1.0, Parity.PLAIN)
        with pytest.raises(KernelParityError):
            build_feature_set(random_sample, 2, 1, k, k, 0.2)

    @pytest.mark.parametrize("r, m", [(2, 3), (6, 1), (0, 0)])
    def test_invalid_rank_settings(self, random_sample, r, m):
        k = KernelSpec.gaussian(1.0)
        with pytest.raises(InvalidParameterError):
            build_feature_set(random_sample, r, m, k, k, 0.2)

    def test_precomputed_svd_count_must_match(self, random_sample):
        k = KernelSpec.gaussian(1.0)
        svds = truncate_all(random_sample, 2)[:5]
        with pytest.raises(DimensionMismatchError):
            build_feature_set(random_sample, 2, 1, k, k, 0.2, svds=svds)

    def test_pseudo_mode_with_zero_eps(self, random_sample):
        k = KernelSpec.linear()
        fs = build_feature_set(random_sample, 5, 1, k, k, 0.0, inverse_mode=InverseMode.PSEUDO)
        # K1 is the Gram matrix of 20 vectors in R^6, so its pseudoinverse has rank 6
        assert np.linalg.matrix_rank(fs.K1_dag, tol=1e-8 * np.abs(fs.K1_dag).max()) == 6
