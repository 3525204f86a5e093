"""
Quadratic discriminant analysis on vectorized latent matrices.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy import linalg

from src.utils.constants import QDA_RIDGE
from src.utils.errors import DimensionMismatchError, IllConditionedError, InvalidParameterError
from src.utils.logger import setup_logger
from src.utils.validation import check_finite, check_positive

logger = setup_logger(__name__)


@dataclass(frozen=True)
class ClassGaussian:
    """Per-class Gaussian: prior, mean, ridged covariance and its Cholesky factor."""
    label: object
    prior: float
    mean: np.ndarray
    covariance: np.ndarray
    cholesky: np.ndarray  # lower-triangular
    log_det: float


@dataclass(frozen=True)
class QdaModel:
    """Fitted QDA classifier; classes are kept in sorted label order."""
    classes: List[ClassGaussian]

    @property
    def labels(self) -> np.ndarray:
        return np.asarray([c.label for c in self.classes])

    @property
    def dim(self) -> int:
        return len(self.classes[0].mean)


def _as_features(latents) -> np.ndarray:
    X = np.asarray(latents, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    elif X.ndim == 3:
        X = X.reshape(X.shape[0], -1)
    if X.ndim != 2:
        raise DimensionMismatchError(f"Expected (n, dim) features or (n, d1, d2) latents, got {X.shape}")
    check_finite("latents", X)
    return X


def qda_fit(latents, labels: Sequence, ridge: float = QDA_RIDGE) -> QdaModel:
    """Fit one Gaussian per class with covariance S_c + ridge * trace(S_c) / dim * I.

    Args:
        latents: (n, dim) vectors or (n, d1, d2) latent matrices, vectorized row-major
        labels: n class identifiers; at least two classes with two samples each
        ridge: Relative covariance ridge

    Raises:
        InvalidParameterError: fewer than two classes, or a class with one sample
        IllConditionedError: a ridged covariance is not positive definite
    """
    X = _as_features(latents)
    labels = np.asarray(labels)
    if len(labels) != X.shape[0]:
        raise DimensionMismatchError(f"Got {len(labels)} labels for {X.shape[0]} samples")
    check_positive("ridge", ridge, allow_zero=True)

    classes = np.unique(labels)
    if len(classes) < 2:
        raise InvalidParameterError(f"QDA needs at least two classes, got {list(classes)}")

    n, dim = X.shape
    fitted = []
    for label in classes:
        members = X[labels == label]
        if len(members) < 2:
            raise InvalidParameterError(f"Class {label} has {len(members)} sample(s); QDA needs at least 2")

        mean = members.mean(axis=0)
        cov = np.atleast_2d(np.cov(members, rowvar=False, ddof=1))
        scale = np.trace(cov) / dim
        if scale <= 0:
            # every feature is constant within the class
            scale = 1.0
        cov = cov + ridge * scale * np.eye(dim)

        try:
            chol = linalg.cholesky(cov, lower=True)
        except linalg.LinAlgError as e:
            raise IllConditionedError(f"Covariance of class {label} is not positive definite: {e}") from e

        fitted.append(ClassGaussian(
            label=label.item() if hasattr(label, 'item') else label,
            prior=len(members) / n,
            mean=mean,
            covariance=cov,
            cholesky=chol,
            log_det=float(2.0 * np.sum(np.log(np.diag(chol)))),
        ))

    return QdaModel(fitted)


def discriminants(model: QdaModel, latents) -> np.ndarray:
    """(n, n_classes) values of log prior - log det / 2 - Mahalanobis^2 / 2."""
    X = _as_features(latents)
    if X.shape[1] != model.dim:
        raise DimensionMismatchError(f"Features have dimension {X.shape[1]}, model expects {model.dim}")
    scores = np.empty((X.shape[0], len(model.classes)))
    for k, c in enumerate(model.classes):
        white = linalg.solve_triangular(c.cholesky, (X - c.mean).T, lower=True)
        scores[:, k] = np.log(c.prior) - 0.5 * c.log_det - 0.5 * np.sum(white ** 2, axis=0)
    return scores


def qda_predict_batch(model: QdaModel, latents) -> np.ndarray:
    """Predicted class of each row; ties go to the lowest class id."""
    return model.labels[np.argmax(discriminants(model, latents), axis=1)]


def qda_predict(model: QdaModel, latent) -> object:
    """Predicted class of a single vectorized latent (or latent matrix)."""
    x = np.asarray(latent, dtype=float).reshape(1, -1)
    return qda_predict_batch(model, x)[0]
