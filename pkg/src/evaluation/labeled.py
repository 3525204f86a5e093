"""
Samples with class labels.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.methods.svd_features import MatrixSample
from src.utils.errors import DimensionMismatchError


@dataclass(frozen=True)
class LabeledSample:
    sample: MatrixSample
    labels: np.ndarray

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or len(labels) != self.sample.n:
            raise DimensionMismatchError(
                f"Got {labels.shape} labels for {self.sample.n} observations"
            )
        object.__setattr__(self, 'labels', labels)

    @property
    def n(self) -> int:
        return self.sample.n

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.labels)

    def subset(self, indices: Sequence[int]) -> 'LabeledSample':
        indices = np.asarray(indices)
        return LabeledSample(self.sample.subset(indices), self.labels[indices])
