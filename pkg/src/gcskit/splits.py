"""Seeded, reproducible train/validation/test index splits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_FRACTIONS = (0.80, 0.10, 0.10)


@dataclass(frozen=True)
class SplitSpec:
    seed: int
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS

    def __post_init__(self):
        if abs(sum(self.fractions) - 1.0) > 1e-12:
            raise ValueError(f"split fractions must sum to 1, got {self.fractions}")
        if any(f < 0.0 for f in self.fractions):
            raise ValueError("split fractions must be nonnegative")


def split_indices(
    n: int, spec: SplitSpec
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shuffle 0..n-1 and partition contiguously into train/val/test.

    Validation and test sizes are floored; remainder rows go to train.
    The shuffle is a seeded Fisher-Yates permutation, so identical specs
    always produce identical index sets.
    """
    if n <= 0:
        raise ValueError("cannot split an empty dataset")
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(n)
    n_val = int(n * spec.fractions[1])
    n_test = int(n * spec.fractions[2])
    n_train = n - n_val - n_test
    return (
        perm[:n_train],
        perm[n_train : n_train + n_val],
        perm[n_train + n_val :],
    )
