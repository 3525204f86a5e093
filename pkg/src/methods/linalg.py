"""
Small dense linear algebra helpers shared by the fitting modules.
"""

from typing import Optional, Tuple

import numpy as np
from scipy import linalg


def symmetrize(M: np.ndarray) -> np.ndarray:
    return (M + M.T) / 2.0


def canonicalize_signs(M: np.ndarray) -> np.ndarray:
    """Flip each column of M so that its largest-magnitude entry is positive.

    Ties in magnitude go to the lowest index (np.argmax returns the first hit),
    so negating a column always maps back to the same canonical column.
    """
    M = np.array(M, dtype=float, copy=True)
    if M.size == 0:
        return M
    idx = np.argmax(np.abs(M), axis=0)
    signs = np.sign(M[idx, np.arange(M.shape[1])])
    signs[signs == 0] = 1.0
    return M * signs


def descending_eigh(M: np.ndarray, k: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix sorted by decreasing eigenvalue.

    Args:
        M: Symmetric matrix
        k: If given, only the top k eigenpairs are computed

    Returns:
        (eigenvalues, eigenvectors as columns)
    """
    p = M.shape[0]
    if k is not None and k < p:
        eigvals, eigvecs = linalg.eigh(M, subset_by_index=[p - k, p - 1])
    else:
        eigvals, eigvecs = linalg.eigh(M)
    return eigvals[::-1], eigvecs[:, ::-1]
