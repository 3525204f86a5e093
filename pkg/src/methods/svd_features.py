"""
Singular-vector features for matrix-valued samples.

Each observation X_i is summarized by its top-r singular triplets. The first m
left (right) singular vectors of every observation form the left (right)
basis, the kernel Gram matrices K1, K2 are taken over these bases, and every
observation becomes an mn x mn feature matrix

    F_i = sum_j sigma_ij k1(u_ij) k2(v_ij)'

where k1(x) is the vector of kernel evaluations of x against the left basis.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from src.methods.kernels import KernelSpec, Parity, gram
from src.methods.linalg import canonicalize_signs, symmetrize
from src.utils.constants import (
    DEFAULT_EPS,
    DEFAULT_M,
    DEFAULT_R,
    MAX_CONDITION,
    PINV_RTOL,
    TIE_TOL,
)
from src.utils.errors import (
    DimensionMismatchError,
    IllConditionedError,
    InvalidParameterError,
    KernelParityError,
    RankDeficientError,
    RepeatedSingularValueError,
)
from src.utils.logger import setup_logger
from src.utils.validation import check_finite, check_matrix, check_positive, check_symmetric

logger = setup_logger(__name__)


class InverseMode(str, Enum):
    REGULARIZED = 'regularized'  # (K + eps ||K||_2 I)^-1, rejected if ill-conditioned
    PSEUDO = 'pseudo'            # Moore-Penrose inverse of K + eps ||K||_2 I


@dataclass(frozen=True)
class MatrixSample:
    """A sample of n real p1 x p2 matrices stored as an (n, p1, p2) array."""
    observations: np.ndarray

    def __post_init__(self) -> None:
        obs = np.asarray(self.observations, dtype=float)
        if obs.ndim != 3:
            raise DimensionMismatchError(f"Observations must form an (n, p1, p2) array, got shape {obs.shape}")
        if obs.shape[0] < 1 or obs.shape[1] < 1 or obs.shape[2] < 1:
            raise DimensionMismatchError(f"Sample needs n, p1, p2 >= 1, got {obs.shape}")
        check_finite("observations", obs)
        object.__setattr__(self, 'observations', obs)

    @classmethod
    def from_matrices(cls, matrices: Sequence[np.ndarray]) -> 'MatrixSample':
        shapes = {np.shape(X) for X in matrices}
        if len(shapes) > 1:
            raise DimensionMismatchError(f"Observations have differing shapes: {sorted(shapes)}")
        return cls(np.stack([np.asarray(X, dtype=float) for X in matrices]))

    @property
    def n(self) -> int:
        return self.observations.shape[0]

    @property
    def p1(self) -> int:
        return self.observations.shape[1]

    @property
    def p2(self) -> int:
        return self.observations.shape[2]

    def subset(self, indices: Sequence[int]) -> 'MatrixSample':
        return MatrixSample(self.observations[np.asarray(indices)])

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.observations)


@dataclass(frozen=True)
class TruncatedSvd:
    """Top-r singular triplets of one observation; vectors are stored as columns."""
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.singular_values)

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors.T

    def flip(self, mask: Sequence[bool]) -> 'TruncatedSvd':
        """Negate the singular pairs (u_j, v_j) selected by mask jointly."""
        signs = np.where(np.asarray(mask, dtype=bool), -1.0, 1.0)
        return TruncatedSvd(self.singular_values, self.left_vectors * signs, self.right_vectors * signs)


@dataclass(frozen=True)
class FeatureSet:
    """Bases, kernel factors and feature matrices of a fitted sample.

    F holds the per-observation feature matrices and is None for feature sets
    restored from a model file, which only keep what out-of-sample
    projection needs.
    """
    m: int
    r: int
    eps: float
    k1: KernelSpec
    k2: KernelSpec
    inverse_mode: InverseMode
    tie_tol: float
    left_basis: np.ndarray
    right_basis: np.ndarray
    K1: np.ndarray
    K2: np.ndarray
    K1_dag: np.ndarray
    K2_dag: np.ndarray
    K1_dag_sqrt: np.ndarray
    K2_dag_sqrt: np.ndarray
    F_bar: np.ndarray
    F: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        """Number of basis elements per side, mn."""
        return self.left_basis.shape[0]

    @property
    def p1(self) -> int:
        return self.left_basis.shape[1]

    @property
    def p2(self) -> int:
        return self.right_basis.shape[1]


def truncated_svd(X: np.ndarray, r: int, tie_tol: float = TIE_TOL) -> TruncatedSvd:
    """Top-r singular triplets of X, singular values strictly decreasing.

    Raises:
        RankDeficientError: if sigma_r <= tie_tol * sigma_1
        RepeatedSingularValueError: if two of the top r singular values are tied
    """
    X = check_matrix("observation", X)
    if r < 1 or r > min(X.shape):
        raise InvalidParameterError(f"Rank r must lie in [1, {min(X.shape)}], got {r}")
    check_positive("tie_tol", tie_tol, allow_zero=True)

    U, s, Vt = linalg.svd(X, full_matrices=False)
    top = s[0]
    if top <= 0 or s[r - 1] <= tie_tol * top:
        raise RankDeficientError(f"rank below requested r={r} (singular values {s[:r]})")
    gaps = s[:r - 1] - s[1:r]
    if np.any(gaps <= tie_tol * top):
        j = int(np.argmax(gaps <= tie_tol * top))
        raise RepeatedSingularValueError(
            f"repeated singular value at positions {j + 1} and {j + 2}: {s[j]:.6g}"
        )
    return TruncatedSvd(s[:r].copy(), U[:, :r].copy(), Vt[:r].T.copy())


def truncate_all(sample: MatrixSample, r: int, tie_tol: float = TIE_TOL) -> List[TruncatedSvd]:
    """Truncated SVD of every observation in the sample."""
    return [truncated_svd(X, r, tie_tol) for X in sample]


def _regularized_spectrum(K: np.ndarray, eps: float) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of K + eps * ||K||_2 * I from a single decomposition of K."""
    K = check_symmetric("kernel matrix", K)
    check_positive("eps", eps, allow_zero=True)
    eigvals, Q = linalg.eigh(K)
    spectral_norm = float(np.max(np.abs(eigvals))) if eigvals.size else 0.0
    return eigvals + eps * spectral_norm, Q


def _check_conditioning(shifted: np.ndarray) -> None:
    top = float(np.max(shifted))
    bottom = float(np.min(shifted))
    if bottom <= 0 or top / bottom > MAX_CONDITION:
        raise IllConditionedError(
            f"regularized kernel matrix is singular or ill-conditioned "
            f"(eigenvalues in [{bottom:.3g}, {top:.3g}])"
        )


def _from_spectrum(Q: np.ndarray, values: np.ndarray) -> np.ndarray:
    return symmetrize((Q * values) @ Q.T)


def regularized_inverse(K: np.ndarray, eps: float) -> np.ndarray:
    """(K + eps * ||K||_2 * I)^-1 with ||K||_2 the spectral norm."""
    shifted, Q = _regularized_spectrum(K, eps)
    _check_conditioning(shifted)
    return _from_spectrum(Q, 1.0 / shifted)


def inverse_sqrt(K: np.ndarray, eps: float) -> np.ndarray:
    """Symmetric PSD square root of regularized_inverse(K, eps)."""
    shifted, Q = _regularized_spectrum(K, eps)
    _check_conditioning(shifted)
    return _from_spectrum(Q, 1.0 / np.sqrt(shifted))


def _pseudo_values(shifted: np.ndarray, power: float) -> np.ndarray:
    top = float(np.max(shifted)) if shifted.size else 0.0
    keep = shifted > PINV_RTOL * top
    values = np.zeros_like(shifted)
    values[keep] = shifted[keep] ** -power
    return values


def pseudo_inverse(K: np.ndarray, eps: float = 0.0) -> np.ndarray:
    """Moore-Penrose inverse of K + eps * ||K||_2 * I."""
    shifted, Q = _regularized_spectrum(K, eps)
    return _from_spectrum(Q, _pseudo_values(shifted, 1.0))


def pseudo_inverse_sqrt(K: np.ndarray, eps: float = 0.0) -> np.ndarray:
    """Square root of pseudo_inverse(K, eps)."""
    shifted, Q = _regularized_spectrum(K, eps)
    return _from_spectrum(Q, _pseudo_values(shifted, 0.5))


def kernel_factors(K: np.ndarray, eps: float, mode: InverseMode) -> Tuple[np.ndarray, np.ndarray]:
    """(inverse, inverse square root) of a Gram matrix under the given inverse mode."""
    if InverseMode(mode) is InverseMode.PSEUDO:
        return pseudo_inverse(K, eps), pseudo_inverse_sqrt(K, eps)
    return regularized_inverse(K, eps), inverse_sqrt(K, eps)


def check_kernel_pair(k1: KernelSpec, k2: KernelSpec) -> None:
    """Both kernels must be odd, both even, or both linear-raw."""
    allowed = (Parity.ODD, Parity.EVEN, Parity.LINEAR_RAW)
    if k1.parity not in allowed or k2.parity not in allowed:
        raise KernelParityError(
            f"kernels must be odd, even or linear-raw, got {k1.parity.value} and {k2.parity.value}"
        )
    if k1.parity is not k2.parity:
        raise KernelParityError(
            f"mixed-parity kernel pair ({k1.parity.value}, {k2.parity.value}): "
            f"both kernels must share the same parity"
        )


def stack_basis(svds: Sequence[TruncatedSvd], m: int, side: str) -> np.ndarray:
    """Rows u_11..u_1m, u_21..u_2m, ... (or the v's), each sign-canonicalized."""
    vectors = [
        (svd.left_vectors if side == 'left' else svd.right_vectors)[:, :m]
        for svd in svds
    ]
    return canonicalize_signs(np.hstack(vectors)).T


def feature_matrix(
    svd: TruncatedSvd,
    k1: KernelSpec,
    k2: KernelSpec,
    left_basis: np.ndarray,
    right_basis: np.ndarray,
) -> np.ndarray:
    """F = sum_j sigma_j k1(u_j) k2(v_j)' against the given bases."""
    L = gram(k1, svd.left_vectors.T, left_basis)    # (r, mn), row j is k1(u_j)'
    R = gram(k2, svd.right_vectors.T, right_basis)  # (r, mn), row j is k2(v_j)'
    return L.T @ (svd.singular_values[:, None] * R)


def _log_basis_conditioning(name: str, K: np.ndarray) -> None:
    eigvals = linalg.eigvalsh(K)
    top = float(np.max(np.abs(eigvals)))
    if top == 0 or float(np.min(eigvals)) <= top / MAX_CONDITION:
        logger.warning(f"{name} is numerically singular: basis elements are nearly linearly dependent")


def build_feature_set(
    sample: MatrixSample,
    r: int = DEFAULT_R,
    m: int = DEFAULT_M,
    k1: Optional[KernelSpec] = None,
    k2: Optional[KernelSpec] = None,
    eps: float = DEFAULT_EPS,
    tie_tol: float = TIE_TOL,
    inverse_mode: InverseMode = InverseMode.REGULARIZED,
    svds: Optional[Sequence[TruncatedSvd]] = None,
) -> FeatureSet:
    """Build bases, Gram matrices, their regularized inverses and the feature matrices.

    Args:
        sample: Observations X_1..X_n
        r: Truncation rank used in each F_i
        m: Number of singular spaces per observation in the bases
        k1, k2: Left and right kernels (same parity)
        eps: Regularization strength of the inverses
        tie_tol: Relative tolerance for rank and tie checks
        inverse_mode: Regularized inverses or pseudoinverses
        svds: Precomputed truncated SVDs of the observations (rank >= r)

    Returns:
        FeatureSet with mn basis vectors per side
    """
    if k1 is None or k2 is None:
        raise InvalidParameterError("build_feature_set needs both kernels")
    check_kernel_pair(k1, k2)
    if not 1 <= m <= r <= min(sample.p1, sample.p2):
        raise InvalidParameterError(
            f"Need 1 <= m <= r <= min(p1, p2) = {min(sample.p1, sample.p2)}, got m={m}, r={r}"
        )
    check_positive("eps", eps, allow_zero=True)
    inverse_mode = InverseMode(inverse_mode)

    if svds is None:
        svds = truncate_all(sample, r, tie_tol)
    elif len(svds) != sample.n:
        raise DimensionMismatchError(f"Got {len(svds)} SVDs for {sample.n} observations")
    if any(svd.rank < r for svd in svds):
        raise InvalidParameterError(f"Precomputed SVDs must have rank >= {r}")
    svds = [TruncatedSvd(s.singular_values[:r], s.left_vectors[:, :r], s.right_vectors[:, :r]) for s in svds]

    left_basis = stack_basis(svds, m, 'left')
    right_basis = stack_basis(svds, m, 'right')

    K1 = symmetrize(gram(k1, left_basis, left_basis))
    K2 = symmetrize(gram(k2, right_basis, right_basis))
    _log_basis_conditioning("K1", K1)
    _log_basis_conditioning("K2", K2)

    K1_dag, K1_dag_sqrt = kernel_factors(K1, eps, inverse_mode)
    K2_dag, K2_dag_sqrt = kernel_factors(K2, eps, inverse_mode)

    F = np.stack([feature_matrix(svd, k1, k2, left_basis, right_basis) for svd in svds])
    F_bar = F.mean(axis=0)

    logger.debug(f"Built feature set: n={sample.n}, mn={left_basis.shape[0]}, r={r}, m={m}, eps={eps}")
    return FeatureSet(
        m=m,
        r=r,
        eps=eps,
        k1=k1,
        k2=k2,
        inverse_mode=inverse_mode,
        tie_tol=tie_tol,
        left_basis=left_basis,
        right_basis=right_basis,
        K1=K1,
        K2=K2,
        K1_dag=K1_dag,
        K2_dag=K2_dag,
        K1_dag_sqrt=K1_dag_sqrt,
        K2_dag_sqrt=K2_dag_sqrt,
        F_bar=F_bar,
        F=F,
    )
