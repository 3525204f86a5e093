"""
Replicated classification experiments
-------------------------------------

Workflow, per replicate:
1. Draws a training and a test set (checkerboard simulation or FashionMNIST)
2. Computes each method's default bandwidth sigma0^2 from the training set
3. Sweeps the bandwidth grid sigma^2 = 2^a * sigma0^2, fitting the reducer on
   the training set, a QDA classifier on the training latents, and recording
   the test accuracy
4. Assembles a long table (replicate, method, exponent, accuracy)

(2D)^2PCA has no bandwidth and appears once per replicate with a missing
exponent. Replicates use independent seed streams derived from one root seed,
so every method within a replicate sees the same draw.
"""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.evaluation.fashion_mnist import load_fashion_mnist_csv
from src.evaluation.labeled import LabeledSample
from src.evaluation.qda import qda_fit, qda_predict_batch
from src.evaluation.simulation import child_seeds, generate_checkerboard
from src.methods.baselines import (
    fit_2d2pca,
    fit_k2dpca,
    kong_bandwidth,
    transform_2d2pca,
    transform_k2dpca,
)
from src.methods.kernels import KernelSpec, Parity
from src.methods.mnpca import fit, gaussian_pair, latents, transform_sample
from src.methods.svd_features import TruncatedSvd, truncate_all
from src.utils.config import FASHION_MNIST_CSV
from src.utils.constants import (
    ALL_METHODS,
    DEFAULT_EPS,
    DEFAULT_M,
    DEFAULT_R,
    DEFAULT_SEED,
    FASHION_CLASSES,
    MAX_REDRAWS,
    METHOD_2D2PCA,
    METHOD_KONG,
    METHOD_MNPCA_EVEN,
    METHOD_MNPCA_ODD,
    QDA_RIDGE,
    SIGMA_GRID,
    TIE_TOL,
)
from src.utils.errors import (
    InvalidParameterError,
    MnpcaError,
    RankDeficientError,
    RepeatedSingularValueError,
)
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

TABLE_COLUMNS = ['replicate', 'method', 'exponent', 'accuracy']


class UnusableDrawError(MnpcaError):
    """A random draw cannot be used (e.g. a class with fewer than two training samples)."""


@dataclass(frozen=True)
class CheckerboardGenerator:
    alpha: float

    def to_dict(self) -> Dict[str, Any]:
        return {'type': 'checkerboard', 'alpha': self.alpha}


@dataclass(frozen=True)
class FashionMnistGenerator:
    """Draws from the Kaggle CSV at path, or MNPCA_FASHION_MNIST_CSV when path is None."""
    path: Optional[str] = None
    classes: Tuple[int, ...] = FASHION_CLASSES

    def resolved_path(self) -> Path:
        return Path(self.path) if self.path else FASHION_MNIST_CSV

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'type': 'fashion-mnist', 'classes': list(self.classes)}
        if self.path:
            data['path'] = self.path
        return data


Generator = Union[CheckerboardGenerator, FashionMnistGenerator]


def generator_from_dict(data: Dict[str, Any]) -> Generator:
    kind = data.get('type')
    if kind == 'checkerboard':
        return CheckerboardGenerator(alpha=float(data['alpha']))
    if kind == 'fashion-mnist':
        return FashionMnistGenerator(
            path=data.get('path'),
            classes=tuple(int(c) for c in data.get('classes', FASHION_CLASSES)),
        )
    raise InvalidParameterError(f"Unknown generator type: {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines an accuracy table."""
    generator: Generator
    n_train: int = 100
    n_test: int = 50
    replicates: int = 50
    methods: Tuple[str, ...] = ALL_METHODS
    sigma_grid: Tuple[float, ...] = SIGMA_GRID
    dims: Tuple[int, int] = (2, 2)
    r: int = DEFAULT_R
    m: int = DEFAULT_M
    eps: float = DEFAULT_EPS
    seed: int = DEFAULT_SEED
    qda_ridge: float = QDA_RIDGE
    tie_tol: float = field(default=TIE_TOL, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'methods', tuple(self.methods))
        object.__setattr__(self, 'sigma_grid', tuple(float(a) for a in self.sigma_grid))
        object.__setattr__(self, 'dims', tuple(int(d) for d in self.dims))

        if self.n_train < 2 or self.n_test < 1 or self.replicates < 1:
            raise InvalidParameterError(
                f"Need n_train >= 2, n_test >= 1, replicates >= 1; got "
                f"{self.n_train}, {self.n_test}, {self.replicates}"
            )
        unknown = set(self.methods) - set(ALL_METHODS)
        if unknown or not self.methods:
            raise InvalidParameterError(f"Unknown or empty methods {sorted(unknown)}; choose from {ALL_METHODS}")
        if not self.sigma_grid:
            raise InvalidParameterError("sigma_grid must not be empty")
        if len(self.dims) != 2 or min(self.dims) < 1:
            raise InvalidParameterError(f"dims must be two positive integers, got {self.dims}")
        if not 1 <= self.m <= self.r:
            raise InvalidParameterError(f"Need 1 <= m <= r, got m={self.m}, r={self.r}")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidParameterError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    @property
    def grid_methods(self) -> Tuple[str, ...]:
        return tuple(m for m in self.methods if m != METHOD_2D2PCA)

    def expected_rows(self) -> int:
        linear = int(METHOD_2D2PCA in self.methods)
        return self.replicates * (len(self.grid_methods) * len(self.sigma_grid) + linear)

    def with_overrides(self, **overrides: Any) -> 'ExperimentConfig':
        """Copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['generator'] = self.generator.to_dict()
        data['methods'] = list(self.methods)
        data['sigma_grid'] = list(self.sigma_grid)
        data['dims'] = list(self.dims)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        data = dict(data)
        if 'generator' not in data:
            raise InvalidParameterError("Experiment config needs a 'generator' entry")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InvalidParameterError(f"Unknown experiment config keys: {sorted(unknown)}")
        data['generator'] = generator_from_dict(data['generator'])
        return cls(**data)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    with open(path, 'r') as f:
        return ExperimentConfig.from_dict(json.load(f))


def _draw(
    config: ExperimentConfig,
    seed: np.random.SeedSequence,
    pool: Optional[LabeledSample],
) -> Tuple[LabeledSample, LabeledSample]:
    """Training and test sets for one replicate attempt."""
    if isinstance(config.generator, CheckerboardGenerator):
        train_seed, test_seed = child_seeds(seed, 2)
        return (
            generate_checkerboard(config.n_train, config.generator.alpha, train_seed),
            generate_checkerboard(config.n_test, config.generator.alpha, test_seed),
        )

    total = config.n_train + config.n_test
    if pool is None or pool.n < total:
        raise InvalidParameterError(f"FashionMNIST pool is missing or smaller than {total} images")
    order = np.random.default_rng(seed).permutation(pool.n)
    train = pool.subset(order[:config.n_train])
    test = pool.subset(order[config.n_train:total])
    classes, counts = np.unique(train.labels, return_counts=True)
    if len(classes) < 2 or counts.min() < 2:
        raise UnusableDrawError(f"training draw has class counts {dict(zip(classes, counts))}")
    return train, test


def _accuracy(train_latents, train_labels, test_latents, test_labels, ridge: float) -> float:
    model = qda_fit(train_latents, train_labels, ridge)
    predicted = qda_predict_batch(model, test_latents)
    return float(np.mean(predicted == test_labels))


def _evaluate_methods(
    config: ExperimentConfig,
    replicate: int,
    train: LabeledSample,
    test: LabeledSample,
    svds: List[TruncatedSvd],
) -> List[Dict[str, Any]]:
    d1, d2 = config.dims
    rows = []

    def record(method: str, exponent: float, train_z, test_z) -> None:
        rows.append({
            'replicate': replicate,
            'method': method,
            'exponent': exponent,
            'accuracy': _accuracy(train_z, train.labels, test_z, test.labels, config.qda_ridge),
        })

    for method in config.methods:
        if method == METHOD_2D2PCA:
            model = fit_2d2pca(train.sample, d1, d2)
            record(
                method, np.nan,
                np.stack([transform_2d2pca(model, X) for X in train.sample]),
                np.stack([transform_2d2pca(model, X) for X in test.sample]),
            )

        elif method == METHOD_KONG:
            sigma0 = kong_bandwidth(train.sample)
            for a in config.sigma_grid:
                kernel = KernelSpec.gaussian(2.0 ** a * sigma0, Parity.PLAIN)
                model = fit_k2dpca(train.sample, kernel, d1, d2)
                record(
                    method, a,
                    np.stack([transform_k2dpca(model, X) for X in train.sample]),
                    np.stack([transform_k2dpca(model, X) for X in test.sample]),
                )

        else:
            parity = Parity.ODD if method == METHOD_MNPCA_ODD else Parity.EVEN
            for a in config.sigma_grid:
                model = fit(
                    train.sample,
                    *gaussian_pair(svds, parity, a),
                    r=config.r,
                    m=config.m,
                    eps=config.eps,
                    dims=(d1, d2),
                    tie_tol=config.tie_tol,
                    svds=svds,
                )
                record(method, a, latents(model), transform_sample(model, test.sample))

    return rows


def run_replicate(
    config: ExperimentConfig,
    replicate: int,
    pool: Optional[LabeledSample] = None,
) -> Tuple[List[Dict[str, Any]], int]:
    """Rows of one replicate and the number of redraws it needed.

    A draw whose observations violate the rank or distinct-singular-value
    requirements is replaced by a fresh draw from the next sub-seed.
    """
    for attempt in range(MAX_REDRAWS + 1):
        seed = np.random.SeedSequence(config.seed, spawn_key=(replicate, attempt))
        try:
            train, test = _draw(config, seed, pool)
            svds = truncate_all(train.sample, config.r, config.tie_tol)
            truncate_all(test.sample, config.r, config.tie_tol)
            return _evaluate_methods(config, replicate, train, test, svds), attempt
        except (RankDeficientError, RepeatedSingularValueError, UnusableDrawError) as e:
            logger.warning(f"Replicate {replicate}, attempt {attempt}: redrawing ({type(e).__name__}: {e})")
    raise MnpcaError(f"Replicate {replicate}: no usable draw after {MAX_REDRAWS} redraws")


def _load_pool(config: ExperimentConfig) -> Optional[LabeledSample]:
    if isinstance(config.generator, FashionMnistGenerator):
        return load_fashion_mnist_csv(config.generator.resolved_path(), config.generator.classes)
    return None


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> pd.DataFrame:
    """Accuracy table of all replicates, methods and grid exponents.

    Args:
        config: Experiment configuration
        jobs: Worker processes for replicates; output order does not depend on it

    Returns:
        DataFrame with columns replicate, method, exponent, accuracy. The total
        number of redraws is stored in table.attrs['redraws'].
    """
    pool = _load_pool(config)
    logger.info(
        f"Running {config.replicates} replicates of {list(config.methods)} "
        f"over {len(config.sigma_grid)} bandwidths ({jobs} job(s))"
    )

    run = partial(run_replicate, config, pool=pool)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(run, range(config.replicates)))
    else:
        results = [run(replicate) for replicate in range(config.replicates)]

    rows = [row for replicate_rows, _ in results for row in replicate_rows]
    redraws = sum(count for _, count in results)
    table = pd.DataFrame(rows, columns=TABLE_COLUMNS)
    table.attrs['redraws'] = redraws
    if redraws:
        logger.warning(f"{redraws} replicate draw(s) were replaced")
    logger.info(f"Experiment finished with {len(table)} rows")
    return table


def summarize(table: pd.DataFrame) -> pd.DataFrame:
    """Mean accuracy, its standard error and the replicate count per (method, exponent)."""
    grouped = table.groupby(['method', 'exponent'], dropna=False, sort=True)['accuracy']
    summary = grouped.agg(mean='mean', std='std', count='count').reset_index()
    summary['se'] = summary['std'] / np.sqrt(summary['count'])
    return summary[['method', 'exponent', 'mean', 'se', 'count']]
