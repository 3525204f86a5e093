"""
MNPCA: two-sided non-linear principal components of matrix-valued data.

Workflow:
1. Builds the singular-vector feature set (bases, kernel factors, F_i)
2. Forms the left and right coordinate matrices

       P1 = K1^-1/2 ( 1/n sum_i (F_i - F_bar) K2^-1 (F_i - F_bar)' ) K1^-1/2
       P2 = K2^-1/2 ( 1/n sum_i (F_i - F_bar)' K1^-1 (F_i - F_bar) ) K2^-1/2

   with the inverses replaced by their regularized (or pseudo) counterparts
3. Keeps the top d1, d2 eigenvectors, chosen by the scree rule unless given
4. Maps any observation to the d1 x d2 latent matrix

       Z = A' K1^-1/2 (F - F_bar) K2^-1/2 B
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.methods.kernels import KernelSpec, Parity, default_bandwidth
from src.methods.linalg import canonicalize_signs, descending_eigh, symmetrize
from src.methods.svd_features import (
    FeatureSet,
    InverseMode,
    MatrixSample,
    TruncatedSvd,
    build_feature_set,
    feature_matrix,
    truncated_svd,
)
from src.utils.constants import DEFAULT_EPS, DEFAULT_M, DEFAULT_R, TIE_TOL
from src.utils.errors import DimensionMismatchError, InvalidParameterError
from src.utils.logger import setup_logger
from src.utils.validation import check_finite, check_matrix, validate_model

logger = setup_logger(__name__)

# Latent matrices are plain (d1, d2) arrays
LatentMatrix = np.ndarray


@dataclass(frozen=True)
class MnpcaModel:
    """A fitted MNPCA model.

    Attributes:
        feature_set: Stored bases, kernel factors and mean feature matrix
        eigvals1: All mn eigenvalues of P1, descending
        eigvals2: All mn eigenvalues of P2, descending
        A: mn x d1 left eigenvectors, sign-canonicalized
        B: mn x d2 right eigenvectors, sign-canonicalized
        n: Number of training observations
    """
    feature_set: FeatureSet
    eigvals1: np.ndarray
    eigvals2: np.ndarray
    A: np.ndarray
    B: np.ndarray
    n: int

    @property
    def d1(self) -> int:
        return self.A.shape[1]

    @property
    def d2(self) -> int:
        return self.B.shape[1]

    @property
    def r(self) -> int:
        return self.feature_set.r

    @property
    def m(self) -> int:
        return self.feature_set.m

    @property
    def eps(self) -> float:
        return self.feature_set.eps

    @property
    def p1(self) -> int:
        return self.feature_set.p1

    @property
    def p2(self) -> int:
        return self.feature_set.p2


def coordinate_matrix(fs: FeatureSet, side: str) -> np.ndarray:
    """P1 (side='left') or P2 (side='right') of a feature set, symmetrized."""
    if fs.F is None:
        raise InvalidParameterError("Coordinate matrices need the training feature matrices")
    D = fs.F - fs.F_bar
    if side == 'left':
        inner, outer = fs.K2_dag, fs.K1_dag_sqrt
    elif side == 'right':
        D = np.swapaxes(D, 1, 2)
        inner, outer = fs.K1_dag, fs.K2_dag_sqrt
    else:
        raise InvalidParameterError(f"side must be 'left' or 'right', got {side!r}")

    scatter = np.matmul(np.matmul(D, inner), np.swapaxes(D, 1, 2)).mean(axis=0)
    return symmetrize(outer @ scatter @ outer)


def shared_bandwidth(svds: Sequence[TruncatedSvd]) -> float:
    """Default sigma0^2 from the first left singular vectors, used for both kernels."""
    return default_bandwidth(np.stack([s.left_vectors[:, 0] for s in svds]))


def gaussian_pair(
    svds: Sequence[TruncatedSvd],
    parity: Parity,
    exponent: float = 0.0,
) -> Tuple[KernelSpec, KernelSpec]:
    """Left and right Gaussian kernels at sigma^2 = 2^exponent * sigma0^2."""
    spec = KernelSpec.gaussian(2.0 ** exponent * shared_bandwidth(svds), parity)
    return spec, spec


def scree_select(eigenvalues: Sequence[float]) -> int:
    """Number of eigenvalues strictly above mean + 2 * sd (divisor n - 1), at least 1."""
    values = np.asarray(eigenvalues, dtype=float)
    if values.size < 2:
        return 1
    threshold = values.mean() + 2.0 * values.std(ddof=1)
    return max(1, int(np.sum(values > threshold)))


def _check_dims(dims: Tuple[int, int], size: int) -> Tuple[int, int]:
    d1, d2 = (int(d) for d in dims)
    if not (1 <= d1 <= size and 1 <= d2 <= size):
        raise InvalidParameterError(f"Latent dimensions must lie in [1, {size}], got ({d1}, {d2})")
    return d1, d2


def fit(
    sample: MatrixSample,
    k1: KernelSpec,
    k2: KernelSpec,
    r: int = DEFAULT_R,
    m: int = DEFAULT_M,
    eps: float = DEFAULT_EPS,
    dims: Optional[Tuple[int, int]] = None,
    tie_tol: float = TIE_TOL,
    inverse_mode: InverseMode = InverseMode.REGULARIZED,
    svds: Optional[Sequence[TruncatedSvd]] = None,
) -> MnpcaModel:
    """Fit MNPCA to a sample of matrices.

    Args:
        sample: Training observations
        k1, k2: Left and right kernels
        r: Truncation rank of the feature matrices
        m: Singular spaces per observation in the bases
        eps: Regularization strength
        dims: (d1, d2); chosen by scree_select on each side when None
        tie_tol: Relative tolerance for rank and tie checks
        inverse_mode: Regularized inverses or pseudoinverses
        svds: Precomputed truncated SVDs of the observations

    Returns:
        MnpcaModel
    """
    fs = build_feature_set(sample, r, m, k1, k2, eps, tie_tol, inverse_mode, svds)

    eigvals1, eigvecs1 = descending_eigh(coordinate_matrix(fs, 'left'))
    eigvals2, eigvecs2 = descending_eigh(coordinate_matrix(fs, 'right'))

    if dims is None:
        dims = (scree_select(eigvals1), scree_select(eigvals2))
        logger.info(f"Scree rule selected latent dimensions {dims}")
    d1, d2 = _check_dims(dims, fs.size)

    model = MnpcaModel(
        feature_set=fs,
        eigvals1=eigvals1,
        eigvals2=eigvals2,
        A=canonicalize_signs(eigvecs1[:, :d1]),
        B=canonicalize_signs(eigvecs2[:, :d2]),
        n=sample.n,
    )
    validate_model(model)
    logger.info(
        f"Fitted MNPCA: n={sample.n}, p=({sample.p1}, {sample.p2}), r={r}, m={m}, "
        f"eps={eps}, dims=({d1}, {d2}), kernels=({k1.parity.value} {k1.base.value}, "
        f"{k2.parity.value} {k2.base.value})"
    )
    return model


def project(model: MnpcaModel, F: np.ndarray) -> LatentMatrix:
    """Latent matrix of a feature matrix F computed against the model's bases."""
    fs = model.feature_set
    Z = model.A.T @ fs.K1_dag_sqrt @ (F - fs.F_bar) @ fs.K2_dag_sqrt @ model.B
    check_finite("latent matrix", Z)
    return Z


def transform(model: MnpcaModel, X: np.ndarray) -> LatentMatrix:
    """Out-of-sample latent matrix of a single p1 x p2 observation."""
    fs = model.feature_set
    X = np.asarray(X, dtype=float)
    if X.shape != (fs.p1, fs.p2):
        raise DimensionMismatchError(f"Observation has shape {X.shape}, model expects {(fs.p1, fs.p2)}")
    X = check_matrix("observation", X)
    svd = truncated_svd(X, fs.r, fs.tie_tol)
    return project(model, feature_matrix(svd, fs.k1, fs.k2, fs.left_basis, fs.right_basis))


def transform_sample(model: MnpcaModel, sample: MatrixSample) -> np.ndarray:
    """Latent matrices of every observation in a sample, shape (n, d1, d2)."""
    return np.stack([transform(model, X) for X in sample])


def latents(model: MnpcaModel) -> np.ndarray:
    """In-sample latent matrices of the training observations, shape (n, d1, d2)."""
    fs = model.feature_set
    if fs.F is None:
        raise InvalidParameterError("In-sample latents are not stored in models loaded from disk")
    return np.stack([project(model, F) for F in fs.F])


def eigen_report(model: MnpcaModel) -> pd.DataFrame:
    """All eigenvalues of both coordinate matrices as rows (side, index, eigenvalue)."""
    frames = [
        pd.DataFrame({
            'side': side,
            'index': np.arange(1, len(values) + 1),
            'eigenvalue': values,
        })
        for side, values in (('left', model.eigvals1), ('right', model.eigvals2))
    ]
    return pd.concat(frames, ignore_index=True)
