"""
CSV containers for matrix samples and the tables derived from them.

A sample of n p1 x p2 matrices is stored as a headerless CSV of n*p1 rows with
p2 values each, next to a JSON sidecar {"n": ..., "p1": ..., "p2": ...} named
after the full file name (run.csv -> run.csv.json). Labels go to
<stem>_labels.csv with a single "label" column.
"""

import json
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.evaluation.labeled import LabeledSample
from src.methods.svd_features import MatrixSample
from src.utils.constants import FLOAT_FORMAT
from src.utils.errors import DataFormatError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

PathLike = Union[str, Path]


def sidecar_path(path: PathLike) -> Path:
    """Sidecar of a sample CSV: run.csv -> run.csv.json, distinct from a run.json model."""
    path = Path(path)
    return path.with_name(path.name + '.json')


def labels_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}_labels.csv")


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_sample(path: PathLike, sample: MatrixSample, labels: Optional[np.ndarray] = None) -> Path:
    """Write a sample (and optionally its labels) and return the CSV path."""
    path = _prepare(path)
    n, p1, p2 = sample.observations.shape
    pd.DataFrame(sample.observations.reshape(n * p1, p2)).to_csv(
        path, header=False, index=False, float_format=FLOAT_FORMAT
    )
    with open(sidecar_path(path), 'w') as f:
        json.dump({'n': n, 'p1': p1, 'p2': p2}, f)
    if labels is not None:
        pd.DataFrame({'label': np.asarray(labels)}).to_csv(labels_path(path), index=False)
    logger.info(f"Wrote {n} observations of shape ({p1}, {p2}) to {path}")
    return path


def write_labeled(path: PathLike, data: LabeledSample) -> Path:
    return write_sample(path, data.sample, data.labels)


def _read_sidecar(path: Path) -> Tuple[int, int, int]:
    meta_path = sidecar_path(path)
    if not meta_path.exists():
        raise DataFormatError(f"Missing sidecar {meta_path} for {path}")
    try:
        with open(meta_path, 'r') as f:
            meta = json.load(f)
        n, p1, p2 = int(meta['n']), int(meta['p1']), int(meta['p2'])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise DataFormatError(f"Invalid sidecar {meta_path}: {e}") from e
    if min(n, p1, p2) < 1:
        raise DataFormatError(f"Sidecar {meta_path} has non-positive sizes {(n, p1, p2)}")
    return n, p1, p2


def read_sample(path: PathLike) -> MatrixSample:
    """Read a sample written by write_sample.

    Raises:
        FileNotFoundError: if the CSV does not exist
        DataFormatError: missing or invalid sidecar, or values that do not
            match the declared shape
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Sample file not found: {path}")
    n, p1, p2 = _read_sidecar(path)

    try:
        values = pd.read_csv(path, header=None, dtype=float, float_precision='round_trip').to_numpy()
    except (pd.errors.ParserError, pd.errors.EmptyDataError, ValueError) as e:
        raise DataFormatError(f"Could not parse {path}: {e}") from e
    if values.shape != (n * p1, p2):
        raise DataFormatError(f"{path} holds a {values.shape} table, sidecar declares {(n * p1, p2)}")
    if not np.isfinite(values).all():
        raise DataFormatError(f"{path} contains missing or non-finite values")
    return MatrixSample(values.reshape(n, p1, p2))


def read_labels(path: PathLike) -> Optional[np.ndarray]:
    """Labels stored next to a sample, or None when there are none."""
    lpath = labels_path(path)
    if not lpath.exists():
        return None
    df = pd.read_csv(lpath)
    if 'label' not in df.columns:
        raise DataFormatError(f"{lpath} has no 'label' column")
    return df['label'].to_numpy()


def read_labeled(path: PathLike) -> LabeledSample:
    labels = read_labels(path)
    if labels is None:
        raise DataFormatError(f"No labels file {labels_path(path)} for {path}")
    return LabeledSample(read_sample(path), labels)


def latent_frame(latents: np.ndarray) -> pd.DataFrame:
    """One row per observation with columns z_j_k (1-based, row-major)."""
    Z = np.asarray(latents, dtype=float)
    n, d1, d2 = Z.shape
    columns = [f"z_{j}_{k}" for j in range(1, d1 + 1) for k in range(1, d2 + 1)]
    return pd.DataFrame(Z.reshape(n, d1 * d2), columns=columns)


def write_latents(path: PathLike, latents: np.ndarray) -> Path:
    path = _prepare(path)
    latent_frame(latents).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote {len(latents)} latent matrices to {path}")
    return path


def read_latents(path: PathLike) -> np.ndarray:
    """Inverse of write_latents, shape (n, d1, d2)."""
    df = pd.read_csv(path, float_precision='round_trip')
    try:
        index = [tuple(int(i) for i in c.split('_')[1:]) for c in df.columns]
    except ValueError as e:
        raise DataFormatError(f"{path} does not have z_j_k columns: {e}") from e
    d1 = max(j for j, _ in index)
    d2 = max(k for _, k in index)
    if len(index) != d1 * d2:
        raise DataFormatError(f"{path} has {len(index)} columns for a {d1} x {d2} latent")
    return df.to_numpy(dtype=float).reshape(len(df), d1, d2)


def write_table(path: PathLike, table: pd.DataFrame) -> Path:
    """Write an accuracy, summary or eigenvalue table."""
    path = _prepare(path)
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote {len(table)} rows to {path}")
    return path


def read_table(path: PathLike) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Table not found: {path}")
    return pd.read_csv(path, float_precision='round_trip')
