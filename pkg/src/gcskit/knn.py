"""Exact 1-nearest-neighbor baseline for forward and inverse design.

A deliberate linear scan over the stored vectors: exactness and
determinism matter more than speed at the dataset sizes involved, and
k = 1 guarantees that inverse answers are stored (hence valid, one-hot)
designs rather than interpolations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KnnIndex:
    design_vectors: np.ndarray  # (n, 17)
    performance_vectors: np.ndarray  # (n, 11)
    sample_ids: tuple

    def __post_init__(self):
        d = np.asarray(self.design_vectors, dtype=float)
        p = np.asarray(self.performance_vectors, dtype=float)
        object.__setattr__(self, "design_vectors", d)
        object.__setattr__(self, "performance_vectors", p)
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        if len(d) != len(p) or len(d) != len(self.sample_ids):
            raise ValueError("index rows must align")
        if len(d) == 0:
            raise ValueError("index must not be empty")
        if not (np.isfinite(d).all() and np.isfinite(p).all()):
            raise ValueError("index rows must be finite")


def _nearest(rows: np.ndarray, query: np.ndarray, weights=None) -> int:
    """Index of the row with minimal Euclidean distance; first wins ties."""
    diff = rows - np.asarray(query, dtype=float)[None, :]
    if weights is not None:
        diff = diff * np.asarray(weights, dtype=float)[None, :]
    return int(np.argmin((diff**2).sum(axis=1)))


def knn_forward(index: KnnIndex, design_vector: np.ndarray) -> np.ndarray:
    """Stored performance of the nearest stored design (17-dim space)."""
    return index.performance_vectors[_nearest(index.design_vectors, design_vector)].copy()


def knn_inverse(
    index: KnnIndex, performance_vector: np.ndarray, weights=None
) -> np.ndarray:
    """Stored design of the nearest stored performance (11-dim space).

    ``weights`` optionally scales each performance coordinate before the
    distance is taken (e.g. the loss weights), so queries can match in
    the same weighted space the networks are trained in; the default is
    plain Euclidean.
    """
    return index.design_vectors[
        _nearest(index.performance_vectors, performance_vector, weights)
    ].copy()


def knn_forward_batch(index: KnnIndex, design_vectors: np.ndarray) -> np.ndarray:
    return np.stack([knn_forward(index, d) for d in np.atleast_2d(design_vectors)])


def knn_inverse_batch(
    index: KnnIndex, performance_vectors: np.ndarray, weights=None
) -> np.ndarray:
    return np.stack(
        [knn_inverse(index, p, weights) for p in np.atleast_2d(performance_vectors)]
    )
