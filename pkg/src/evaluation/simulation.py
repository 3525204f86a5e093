"""
Checkerboard image generator for two-group simulations.

An image is u(t1) u(t2)' + u(t3) u(t4)' where u(x; alpha) is a length-10
cosine curve whose frequency is scaled by (1 - alpha). Group 1 uses +alpha,
group 2 uses -alpha, so the groups differ only in how dense the resulting
checkerboard pattern is.
"""

from typing import List, Union

import numpy as np

from src.evaluation.labeled import LabeledSample
from src.methods.svd_features import MatrixSample
from src.utils.constants import CURVE_LENGTH
from src.utils.errors import InvalidParameterError

SeedLike = Union[int, np.random.SeedSequence]

GROUP_LABELS = (1, 2)


def child_seeds(seed: SeedLike, count: int) -> List[np.random.SeedSequence]:
    """Independent child streams of seed.

    Unlike SeedSequence.spawn this does not advance any state, so the same
    seed always yields the same children.
    """
    if isinstance(seed, np.random.SeedSequence):
        entropy, key = seed.entropy, tuple(seed.spawn_key)
    else:
        entropy, key = int(seed), ()
    return [np.random.SeedSequence(entropy, spawn_key=key + (k,)) for k in range(count)]


def u_curve(x: float, alpha: float) -> np.ndarray:
    """Vector with element j (1-based) equal to cos((1 - alpha)(x - pi + 2 pi (j - 1) / 10))."""
    if not -np.pi <= x <= np.pi:
        raise InvalidParameterError(f"x must lie in [-pi, pi], got {x}")
    if not -1.0 < alpha < 1.0:
        raise InvalidParameterError(f"alpha must lie in (-1, 1), got {alpha}")
    return _curves(np.asarray([x], dtype=float), alpha)[0]


def _curves(x: np.ndarray, alpha: float) -> np.ndarray:
    steps = 2.0 * np.pi * np.arange(CURVE_LENGTH) / CURVE_LENGTH
    return np.cos((1.0 - alpha) * (x[:, None] - np.pi + steps[None, :]))


def checkerboard_images(thetas: np.ndarray, alpha: float) -> np.ndarray:
    """Images u(t1)u(t2)' + u(t3)u(t4)' for each row (t1, t2, t3, t4) of thetas."""
    u1, u2, u3, u4 = (_curves(thetas[:, k], alpha) for k in range(4))
    return np.einsum('ia,ib->iab', u1, u2) + np.einsum('ia,ib->iab', u3, u4)


def generate_group(n_group: int, alpha: float, seed: SeedLike) -> np.ndarray:
    """n_group images at a given alpha, angles drawn iid Uniform(-pi, pi) from seed."""
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(-np.pi, np.pi, size=(n_group, 4))
    return checkerboard_images(thetas, alpha)


def generate_checkerboard(n: int, alpha: float, seed: SeedLike) -> LabeledSample:
    """n/2 group-1 images at +alpha followed by n/2 group-2 images at -alpha.

    The two groups draw their angles from independent child streams of seed,
    so the output is a pure function of (n, alpha, seed).
    """
    if n < 2 or n % 2:
        raise InvalidParameterError(f"n must be a positive even number, got {n}")
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")

    group1_seed, group2_seed = child_seeds(seed, 2)
    half = n // 2
    images = np.concatenate([
        generate_group(half, alpha, group1_seed),
        generate_group(half, -alpha, group2_seed),
    ])
    labels = np.repeat(np.asarray(GROUP_LABELS), half)
    return LabeledSample(MatrixSample(images), labels)
