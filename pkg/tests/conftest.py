"""
Shared fixtures for the MNPCA test suite.
"""

import numpy as np
import pandas as pd
import pytest

from src.evaluation.simulation import generate_checkerboard
from src.methods.svd_features import MatrixSample


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_sample(rng):
    """Twenty random 6 x 5 matrices of full rank."""
    return MatrixSample(rng.standard_normal((20, 6, 5)))


@pytest.fixture
def checkerboard():
    """Forty checkerboard images, 20 per group, at alpha = 0.125."""
    return generate_checkerboard(40, 0.125, seed=7)


@pytest.fixture
def tmp_sample_path(tmp_path):
    return tmp_path / "sample.csv"


def _write_fashion_csv(path, labels, pixels):
    """Kaggle-style FashionMNIST CSV: header row, label column, 784 pixel columns."""
    columns = ['label'] + [f'pixel{i}' for i in range(1, 785)]
    frame = pd.DataFrame(np.column_stack([labels, pixels]).astype(int), columns=columns)
    frame.to_csv(path, index=False)
    return path


@pytest.fixture
def write_fashion_csv():
    return _write_fashion_csv
