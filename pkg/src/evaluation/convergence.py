"""
Monte Carlo study of how fast the sample coordinate matrix settles down.

For each sample size the checkerboard generator is replicated and the top
eigenvalue of P1 is recorded. Its sampling standard deviation should shrink
like 1/sqrt(n), so quadrupling n roughly halves it.
"""

from typing import Optional, Sequence

import numpy as np
import pandas as pd

from src.evaluation.simulation import generate_checkerboard
from src.methods.kernels import KernelSpec, Parity
from src.methods.linalg import descending_eigh
from src.methods.mnpca import coordinate_matrix, shared_bandwidth
from src.methods.svd_features import build_feature_set, truncate_all
from src.utils.constants import DEFAULT_EPS, DEFAULT_M, DEFAULT_R, DEFAULT_SEED, MAX_REDRAWS, TIE_TOL
from src.utils.errors import InvalidParameterError, MnpcaError, RankDeficientError, RepeatedSingularValueError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


def _top_eigenvalue(
    n: int,
    alpha: float,
    seed: np.random.SeedSequence,
    r: int,
    m: int,
    eps: float,
    parity: Parity,
    sigma2: Optional[float],
) -> float:
    sample = generate_checkerboard(n, alpha, seed).sample
    svds = truncate_all(sample, r, TIE_TOL)
    kernel = KernelSpec.gaussian(shared_bandwidth(svds) if sigma2 is None else sigma2, parity)
    fs = build_feature_set(sample, r, m, kernel, kernel, eps, svds=svds)
    values, _ = descending_eigh(coordinate_matrix(fs, 'left'), 1)
    return float(values[0])


def convergence_study(
    sample_sizes: Sequence[int] = (50, 200),
    replicates: int = 200,
    alpha: float = 0.125,
    seed: int = DEFAULT_SEED,
    r: int = DEFAULT_R,
    m: int = DEFAULT_M,
    eps: float = DEFAULT_EPS,
    parity: Parity = Parity.ODD,
    sigma2: Optional[float] = None,
) -> pd.DataFrame:
    """Top eigenvalue of P1 over Monte Carlo replicates of each sample size.

    Args:
        sample_sizes: Even sample sizes to compare
        replicates: Replicates per sample size
        alpha: Checkerboard frequency shift
        seed: Root seed; each (size, replicate) pair gets its own stream
        r, m, eps: MNPCA settings
        parity: Gaussian kernel parity
        sigma2: Fixed bandwidth for both kernels; per-replicate shared default when None

    Returns:
        DataFrame with columns n, replicate, top_eigenvalue
    """
    if replicates < 2:
        raise InvalidParameterError(f"Need at least 2 replicates, got {replicates}")
    if not sample_sizes:
        raise InvalidParameterError("sample_sizes must not be empty")

    rows = []
    for n in sample_sizes:
        for replicate in range(replicates):
            for attempt in range(MAX_REDRAWS + 1):
                stream = np.random.SeedSequence(seed, spawn_key=(int(n), replicate, attempt))
                try:
                    top = _top_eigenvalue(int(n), alpha, stream, r, m, eps, parity, sigma2)
                    break
                except (RankDeficientError, RepeatedSingularValueError) as e:
                    logger.warning(f"n={n}, replicate {replicate}: redrawing ({type(e).__name__})")
            else:
                raise MnpcaError(f"n={n}, replicate {replicate}: no usable draw after {MAX_REDRAWS} redraws")
            rows.append({'n': int(n), 'replicate': replicate, 'top_eigenvalue': top})
        logger.info(f"Convergence study: finished n={n}")

    return pd.DataFrame(rows, columns=['n', 'replicate', 'top_eigenvalue'])


def convergence_ratio(table: pd.DataFrame) -> pd.DataFrame:
    """Ratio of top-eigenvalue standard deviations between consecutive sample sizes."""
    sd = table.groupby('n')['top_eigenvalue'].std(ddof=1).sort_index()
    if len(sd) < 2:
        raise InvalidParameterError("convergence_ratio needs at least two sample sizes")
    sizes = sd.index.to_numpy()
    return pd.DataFrame({
        'n_small': sizes[:-1],
        'n_large': sizes[1:],
        'sd_small': sd.to_numpy()[:-1],
        'sd_large': sd.to_numpy()[1:],
        'ratio': sd.to_numpy()[1:] / sd.to_numpy()[:-1],
    })
