"""
Kernel functions on singular vectors.

A KernelSpec pairs a base family (linear, Gaussian, polynomial) with a parity.
The odd and even parities turn a base kernel k into

    odd:  k(x, y) - k(-x, y)
    even: k(x, y) + k(-x, y)

which are again positive semi-definite and change sign (odd) or stay
unchanged (even) when x is negated. Evaluated on singular vectors, this makes
every downstream quantity independent of the sign ambiguity of the SVD.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from src.utils.errors import DimensionMismatchError, InvalidParameterError
from src.utils.validation import check_finite


class BaseKernel(str, Enum):
    LINEAR = 'linear'
    GAUSSIAN = 'gaussian'
    POLYNOMIAL = 'polynomial'


class Parity(str, Enum):
    ODD = 'odd'
    EVEN = 'even'
    LINEAR_RAW = 'linear-raw'  # plain dot product, only with the linear base
    PLAIN = 'plain'            # unmodified base kernel, for the kernel PCA baseline


@dataclass(frozen=True)
class KernelSpec:
    """A base kernel family with its parameters and parity.

    Attributes:
        base: Kernel family
        parity: How the base kernel is symmetrized
        sigma2: Gaussian bandwidth, required for the Gaussian base
        degree: Polynomial degree, required for the polynomial base
        offset: Polynomial offset c in (x'y + c)^degree
    """
    base: BaseKernel
    parity: Parity
    sigma2: Optional[float] = None
    degree: Optional[int] = None
    offset: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, 'base', BaseKernel(self.base))
        object.__setattr__(self, 'parity', Parity(self.parity))

        if self.base is BaseKernel.GAUSSIAN:
            if self.sigma2 is None or not np.isfinite(self.sigma2) or self.sigma2 <= 0:
                raise InvalidParameterError(f"Gaussian sigma2 must be positive, got {self.sigma2}")
        if self.base is BaseKernel.POLYNOMIAL:
            if self.degree is None or int(self.degree) != self.degree or self.degree < 1:
                raise InvalidParameterError(f"Polynomial degree must be a positive integer, got {self.degree}")
            if not np.isfinite(self.offset) or self.offset < 0:
                raise InvalidParameterError(f"Polynomial offset must be non-negative, got {self.offset}")
            object.__setattr__(self, 'degree', int(self.degree))
        if self.parity is Parity.LINEAR_RAW and self.base is not BaseKernel.LINEAR:
            raise InvalidParameterError("Parity 'linear-raw' is only valid with the linear base")

    @classmethod
    def linear(cls, parity: Parity = Parity.LINEAR_RAW) -> 'KernelSpec':
        return cls(BaseKernel.LINEAR, parity)

    @classmethod
    def gaussian(cls, sigma2: float, parity: Parity = Parity.ODD) -> 'KernelSpec':
        return cls(BaseKernel.GAUSSIAN, parity, sigma2=sigma2)

    @classmethod
    def polynomial(cls, degree: int, offset: float = 0.0, parity: Parity = Parity.ODD) -> 'KernelSpec':
        return cls(BaseKernel.POLYNOMIAL, parity, degree=degree, offset=offset)

    def with_sigma2(self, sigma2: float) -> 'KernelSpec':
        """Return a copy with a different Gaussian bandwidth."""
        return replace(self, sigma2=sigma2)

    def diagonal_bound(self) -> float:
        """Value of the kernel at (u, u) for any unit vector u.

        All supported families depend on u only through u'u on the diagonal,
        so the value is constant on the unit sphere and bounds the kernel there.
        """
        if self.parity is Parity.LINEAR_RAW:
            return 1.0
        same = self._base_at(1.0, 0.0)
        opposite = self._base_at(-1.0, 4.0)
        if self.parity is Parity.ODD:
            return same - opposite
        if self.parity is Parity.EVEN:
            return same + opposite
        return same

    def _base_at(self, inner: float, sq_dist: float) -> float:
        """Base kernel as a function of the inner product and squared distance."""
        if self.base is BaseKernel.LINEAR:
            return inner
        if self.base is BaseKernel.GAUSSIAN:
            return float(np.exp(-sq_dist / (2.0 * self.sigma2)))
        return float((inner + self.offset) ** self.degree)

    def to_dict(self) -> Dict[str, Any]:
        """Serialize as {"base": ..., "params": {...}, "parity": ...}."""
        params: Dict[str, Any] = {}
        if self.base is BaseKernel.GAUSSIAN:
            params['sigma2'] = self.sigma2
        elif self.base is BaseKernel.POLYNOMIAL:
            params['degree'] = self.degree
            params['offset'] = self.offset
        return {'base': self.base.value, 'params': params, 'parity': self.parity.value}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'KernelSpec':
        try:
            base = BaseKernel(data['base'])
            parity = Parity(data['parity'])
        except (KeyError, ValueError) as e:
            raise InvalidParameterError(f"Invalid kernel specification {data}: {e}") from e
        params = data.get('params', {}) or {}
        return cls(
            base,
            parity,
            sigma2=params.get('sigma2'),
            degree=params.get('degree'),
            offset=params.get('offset', 0.0),
        )


def _as_vectors(x: Sequence[float], y: Sequence[float]):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise DimensionMismatchError(f"Kernel arguments must be vectors of equal length, got {x.shape} and {y.shape}")
    check_finite("kernel argument", x)
    check_finite("kernel argument", y)
    return x, y


def eval_base(spec: KernelSpec, x: Sequence[float], y: Sequence[float]) -> float:
    """Evaluate the base kernel family at a single pair of vectors."""
    x, y = _as_vectors(x, y)
    return float(_base_gram(spec, x[None, :], y[None, :])[0, 0])


def eval_kernel(spec: KernelSpec, x: Sequence[float], y: Sequence[float]) -> float:
    """Evaluate the induced (odd, even, linear-raw or plain) kernel at a pair of vectors."""
    x, y = _as_vectors(x, y)
    return float(_induced_gram(spec, x[None, :], y[None, :])[0, 0])


def gram(spec: KernelSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Gram matrix of the induced kernel between the rows of X and the rows of Y."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatchError(f"Row dimensions differ: {X.shape[1]} and {Y.shape[1]}")
    check_finite("kernel argument", X)
    check_finite("kernel argument", Y)
    return _induced_gram(spec, X, Y)


def _base_gram(spec: KernelSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    if spec.base is BaseKernel.LINEAR:
        return X @ Y.T
    if spec.base is BaseKernel.GAUSSIAN:
        return np.exp(-cdist(X, Y, 'sqeuclidean') / (2.0 * spec.sigma2))
    return (X @ Y.T + spec.offset) ** spec.degree


def _induced_gram(spec: KernelSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    if spec.parity in (Parity.LINEAR_RAW, Parity.PLAIN):
        return _base_gram(spec, X, Y)
    same = _base_gram(spec, X, Y)
    opposite = _base_gram(spec, -X, Y)
    if spec.parity is Parity.ODD:
        return same - opposite
    return same + opposite


def default_bandwidth(left_singular_basis: Sequence[Sequence[float]]) -> float:
    """Default Gaussian bandwidth sigma2 = ||G||_F / n, G the Gram matrix of the unit vectors.

    Flipping the sign of any vector flips a row and a column of G, which
    leaves the Frobenius norm unchanged.
    """
    U = np.asarray(left_singular_basis, dtype=float)
    if U.ndim != 2 or U.shape[0] == 0:
        raise InvalidParameterError("default_bandwidth needs a non-empty list of vectors")
    check_finite("singular basis", U)
    G = U @ U.T
    return float(np.linalg.norm(G, 'fro') / U.shape[0])
