"""
FashionMNIST ingestion from the Kaggle CSV form.

Each CSV row is a label followed by 784 pixel values in [0, 255]; the header
row is skipped. Images are returned as 28 x 28 matrices (row-major) scaled
to [0, 1].
"""

from pathlib import Path
from typing import Iterable, Union

import numpy as np
import pandas as pd

from src.evaluation.labeled import LabeledSample
from src.methods.svd_features import MatrixSample
from src.utils.constants import FASHION_CLASSES, FASHION_SHAPE, PIXEL_MAX
from src.utils.errors import DataFormatError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


def load_fashion_mnist_csv(
    path: Union[str, Path],
    classes: Iterable[int] = FASHION_CLASSES,
) -> LabeledSample:
    """Load the images of the given classes.

    Raises:
        FileNotFoundError: if path does not exist
        DataFormatError: wrong row length, pixel values outside [0, 255], or
            fewer than two of the requested classes present
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"FashionMNIST CSV not found: {path}")

    n_pixels = FASHION_SHAPE[0] * FASHION_SHAPE[1]
    try:
        df = pd.read_csv(path)
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DataFormatError(f"Could not parse {path}: {e}") from e
    if df.shape[1] != n_pixels + 1:
        raise DataFormatError(f"Expected {n_pixels + 1} columns (label + pixels), got {df.shape[1]}")

    values = df.to_numpy()
    if not np.issubdtype(values.dtype, np.number) or np.isnan(values).any():
        raise DataFormatError(f"{path} contains non-numeric or missing entries")

    labels = values[:, 0].astype(int)
    pixels = values[:, 1:].astype(float)
    if pixels.min() < 0 or pixels.max() > PIXEL_MAX:
        raise DataFormatError(f"Pixel values must lie in [0, {PIXEL_MAX:g}]")

    wanted = sorted(set(int(c) for c in classes))
    keep = np.isin(labels, wanted)
    present = np.unique(labels[keep])
    if len(present) < 2:
        raise DataFormatError(
            f"Filtering to classes {wanted} leaves {len(present)} class(es) in {path}"
        )

    images = (pixels[keep] / PIXEL_MAX).reshape(-1, *FASHION_SHAPE)
    logger.info(f"Loaded {len(images)} FashionMNIST images of classes {list(present)} from {path}")
    return LabeledSample(MatrixSample(images), labels[keep])
