"""
Input guards and post-fit integrity checks.
"""

from typing import List

import numpy as np

from src.utils.constants import ORTHONORMAL_TOL, PSD_TOL, SYMMETRY_TOL
from src.utils.errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NonFiniteInputError,
)
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


def check_finite(name: str, values: np.ndarray) -> None:
    """Raise NonFiniteInputError if any entry of values is NaN or infinite."""
    if not np.all(np.isfinite(values)):
        raise NonFiniteInputError(f"{name} contains non-finite values")


def check_matrix(name: str, X: np.ndarray, shape=None) -> np.ndarray:
    """Return X as a finite 2-d float array, optionally of a given shape."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatchError(f"{name} must be a matrix, got {X.ndim} dimensions")
    if shape is not None and X.shape != tuple(shape):
        raise DimensionMismatchError(f"{name} has shape {X.shape}, expected {tuple(shape)}")
    check_finite(name, X)
    return X


def check_symmetric(name: str, K: np.ndarray, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Return K as a square float array after checking symmetry to tol (relative)."""
    K = check_matrix(name, K)
    if K.shape[0] != K.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got {K.shape}")
    scale = max(1.0, float(np.max(np.abs(K)))) if K.size else 1.0
    if not np.allclose(K, K.T, rtol=0.0, atol=tol * scale):
        raise InvalidParameterError(f"{name} is not symmetric")
    return K


def check_positive(name: str, value: float, allow_zero: bool = False) -> None:
    """Raise InvalidParameterError unless value is a finite positive number."""
    if not np.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = "non-negative" if allow_zero else "positive"
        raise InvalidParameterError(f"{name} must be {bound}, got {value}")


def validate_model(model) -> List[str]:
    """Run integrity checks on a fitted two-sided model, logging any issues found.

    Data Quality Checks:
    - Eigenvector blocks A and B have orthonormal columns
    - Both eigenvalue lists are sorted in descending order
    - Both eigenvalue lists are non-negative up to PSD_TOL relative
    - Latent dimensions do not exceed the number of available eigenpairs

    Returns:
        List of issue messages; empty when the model is consistent
    """
    checks = [
        (lambda m: _orthonormal(m.A), "Columns of A are not orthonormal"),
        (lambda m: _orthonormal(m.B), "Columns of B are not orthonormal"),
        (lambda m: _descending(m.eigvals1), "Left eigenvalues are not sorted"),
        (lambda m: _descending(m.eigvals2), "Right eigenvalues are not sorted"),
        (lambda m: _psd(m.eigvals1), "Left coordinate matrix is not positive semi-definite"),
        (lambda m: _psd(m.eigvals2), "Right coordinate matrix is not positive semi-definite"),
        (lambda m: m.d1 <= len(m.eigvals1) and m.d2 <= len(m.eigvals2),
         "Latent dimensions exceed the number of eigenpairs"),
    ]

    issues = []
    for check, message in checks:
        try:
            if not check(model):
                issues.append(message)
                logger.warning(f"Model integrity issue - {message}")
        except Exception as e:
            issues.append(f"{message} (check failed: {e})")
            logger.error(f"Error running integrity check '{message}': {str(e)}")
    return issues


def _orthonormal(M: np.ndarray) -> bool:
    gram = M.T @ M
    return bool(np.allclose(gram, np.eye(gram.shape[0]), rtol=0.0, atol=ORTHONORMAL_TOL))


def _descending(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) <= 0))


def _psd(values: np.ndarray) -> bool:
    if len(values) == 0:
        return True
    top = max(float(np.max(values)), 0.0)
    # absolute floor keeps all-zero spectra (identical observations) from flagging
    return bool(np.min(values) >= -PSD_TOL * top - 1e-12)
