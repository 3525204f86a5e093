"""
Competitor reducers for matrix-valued data.

- (2D)^2PCA: linear two-sided PCA, Z = A'(X - X_bar)B with A, B the leading
  eigenvectors of the row and column scatter matrices.
- K2DPCA chain: kernel PCA over all n*p1 rows of the sample reduces each row
  to d2 non-linear scores, then a linear left reduction takes the p1 rows of
  the resulting p1 x d2 matrices to d1.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.spatial.distance import pdist

from src.methods.kernels import KernelSpec, gram
from src.methods.linalg import canonicalize_signs, descending_eigh, symmetrize
from src.methods.svd_features import MatrixSample
from src.utils.errors import DimensionMismatchError, IllConditionedError, InvalidParameterError
from src.utils.logger import setup_logger
from src.utils.validation import check_matrix

logger = setup_logger(__name__)

# Relative size below which a centered Gram eigenvalue counts as zero
_GRAM_RTOL = 1e-12


@dataclass(frozen=True)
class TwoDPcaModel:
    """Fitted (2D)^2PCA: A (p1 x d1), B (p2 x d2), mean matrix and scatter spectra."""
    A: np.ndarray
    B: np.ndarray
    X_bar: np.ndarray
    eigvals1: np.ndarray
    eigvals2: np.ndarray

    @property
    def d1(self) -> int:
        return self.A.shape[1]

    @property
    def d2(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class K2dpcaModel:
    """Fitted K2DPCA chain.

    Attributes:
        row_kernel: Kernel over rows (vectors in R^p2)
        training_rows: All n*p1 training rows
        alpha: (n*p1) x d2 kernel PCA coefficients, unit RKHS norm per component
        eigvals: Top d2 eigenvalues of the centered row Gram matrix
        gram_row_means: Row means of the uncentered training Gram matrix
        gram_mean: Grand mean of the uncentered training Gram matrix
        row_reducer: p1 x d1 orthonormal left reducer (linear stage)
        score_mean: p1 x d2 mean of the stage-one score matrices
    """
    row_kernel: KernelSpec
    training_rows: np.ndarray
    alpha: np.ndarray
    eigvals: np.ndarray
    gram_row_means: np.ndarray
    gram_mean: float
    row_reducer: np.ndarray
    score_mean: np.ndarray

    @property
    def p1(self) -> int:
        return self.row_reducer.shape[0]

    @property
    def p2(self) -> int:
        return self.training_rows.shape[1]

    @property
    def d1(self) -> int:
        return self.row_reducer.shape[1]

    @property
    def d2(self) -> int:
        return self.alpha.shape[1]


def scatter_matrices(observations: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Row and column scatter (1/n) sum X_i X_i' - X_bar X_bar' and its transpose counterpart."""
    X_bar = observations.mean(axis=0)
    centered = observations - X_bar
    left = np.einsum('iab,icb->ac', centered, centered) / len(observations)
    right = np.einsum('iba,ibc->ac', centered, centered) / len(observations)
    return symmetrize(left), symmetrize(right)


def _check_reduced_dims(d1: int, d2: int, p1: int, p2: int) -> None:
    if not (1 <= d1 <= p1 and 1 <= d2 <= p2):
        raise InvalidParameterError(f"Need 1 <= d1 <= {p1} and 1 <= d2 <= {p2}, got ({d1}, {d2})")


def fit_2d2pca(sample: MatrixSample, d1: int, d2: int) -> TwoDPcaModel:
    """Fit linear (2D)^2PCA."""
    _check_reduced_dims(d1, d2, sample.p1, sample.p2)
    left, right = scatter_matrices(sample.observations)
    eigvals1, vecs1 = descending_eigh(left)
    eigvals2, vecs2 = descending_eigh(right)
    logger.debug(f"Fitted (2D)^2PCA: n={sample.n}, dims=({d1}, {d2})")
    return TwoDPcaModel(
        A=canonicalize_signs(vecs1[:, :d1]),
        B=canonicalize_signs(vecs2[:, :d2]),
        X_bar=sample.observations.mean(axis=0),
        eigvals1=eigvals1,
        eigvals2=eigvals2,
    )


def transform_2d2pca(model: TwoDPcaModel, X: np.ndarray) -> np.ndarray:
    """Z = A'(X - X_bar)B."""
    X = check_matrix("observation", X)
    if X.shape != model.X_bar.shape:
        raise DimensionMismatchError(f"Observation has shape {X.shape}, model expects {model.X_bar.shape}")
    return model.A.T @ (X - model.X_bar) @ model.B


def center_gram(K: np.ndarray) -> np.ndarray:
    """Double-centered Gram matrix H K H with H = I - 11'/N."""
    return K - K.mean(axis=0)[None, :] - K.mean(axis=1)[:, None] + K.mean()


def _row_scores(model: K2dpcaModel, rows: np.ndarray) -> np.ndarray:
    """Kernel PCA scores of new rows against the training rows."""
    K = gram(model.row_kernel, rows, model.training_rows)
    K_c = K - K.mean(axis=1)[:, None] - model.gram_row_means[None, :] + model.gram_mean
    return K_c @ model.alpha


def fit_k2dpca(sample: MatrixSample, kernel: KernelSpec, d1: int, d2: int) -> K2dpcaModel:
    """Fit the K2DPCA chain: row kernel PCA to d2 scores, then a linear left reduction to d1.

    Raises:
        IllConditionedError: if the centered row Gram matrix has fewer than d2
            non-negligible eigenvalues
    """
    _check_reduced_dims(d1, d2, sample.p1, sample.p2)
    n, p1, p2 = sample.observations.shape
    rows = sample.observations.reshape(n * p1, p2)
    if d2 > rows.shape[0]:
        raise InvalidParameterError(f"d2={d2} exceeds the number of training rows {rows.shape[0]}")

    K = symmetrize(gram(kernel, rows, rows))
    K_c = symmetrize(center_gram(K))
    eigvals, eigvecs = descending_eigh(K_c, d2)
    top = max(float(eigvals[0]), 0.0)
    if top == 0.0 or eigvals[-1] <= _GRAM_RTOL * top:
        raise IllConditionedError(
            f"centered row Gram matrix is rank-deficient: top {d2} eigenvalues {eigvals}"
        )

    # Unit RKHS norm: alpha' K_c alpha = 1
    alpha = eigvecs / np.sqrt(eigvals)

    scores = (K_c @ alpha).reshape(n, p1, d2)
    left, _ = scatter_matrices(scores)
    _, vecs = descending_eigh(left)
    logger.debug(f"Fitted K2DPCA chain: n={n}, rows={n * p1}, dims=({d1}, {d2})")
    return K2dpcaModel(
        row_kernel=kernel,
        training_rows=rows,
        alpha=alpha,
        eigvals=eigvals,
        gram_row_means=K.mean(axis=0),
        gram_mean=float(K.mean()),
        row_reducer=canonicalize_signs(vecs[:, :d1]),
        score_mean=scores.mean(axis=0),
    )


def row_scores(model: K2dpcaModel, X: np.ndarray) -> np.ndarray:
    """Stage-one p1 x d2 score matrix of an observation."""
    X = check_matrix("observation", X)
    if X.shape != (model.p1, model.p2):
        raise DimensionMismatchError(f"Observation has shape {X.shape}, model expects {(model.p1, model.p2)}")
    return _row_scores(model, X)


def transform_k2dpca(model: K2dpcaModel, X: np.ndarray) -> np.ndarray:
    """d1 x d2 latent matrix of an observation."""
    return model.row_reducer.T @ (row_scores(model, X) - model.score_mean)


def kong_bandwidth(sample: MatrixSample) -> float:
    """Mean squared distance over all ordered pairs of vectorized observations, i = j included."""
    vectors = sample.observations.reshape(sample.n, -1)
    if sample.n < 2:
        return 0.0
    return float(2.0 * pdist(vectors, 'sqeuclidean').sum() / sample.n ** 2)
