"""PCA compression of resampled force vectors.

Fits a 10-component model by SVD of the centered force matrix, keeping
coefficients at their natural (unwhitened) scale so that downstream loss
weighting by explained variance stays meaningful.  A deterministic sign
convention pins each component's orientation so that serialized models
and trained weights are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .curves import GRID_POINTS

N_COMPONENTS = 10

SERIALIZATION_VERSION = 1


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray  # (100,)
    components: np.ndarray  # (10, 100), orthonormal rows
    eigenvalues: np.ndarray  # (10,), nonincreasing
    displacement_range: tuple[float, float]
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        object.__setattr__(self, "components", np.asarray(self.components, dtype=float))
        object.__setattr__(self, "eigenvalues", np.asarray(self.eigenvalues, dtype=float))

    def explained_variance_fractions(self) -> np.ndarray:
        total = self.eigenvalues.sum()
        if total <= 0.0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / total

    def to_json(self) -> str:
        doc = {
            "version": SERIALIZATION_VERSION,
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "displacement_range": list(self.displacement_range),
            "warnings": list(self.warnings),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "PcaModel":
        doc = json.loads(text)
        version = doc.get("version")
        if version != SERIALIZATION_VERSION:
            raise ValueError(
                f"unsupported PCA model version {version!r}; "
                f"this build reads version {SERIALIZATION_VERSION}"
            )
        lo, hi = doc["displacement_range"]
        return cls(
            mean=np.array(doc["mean"], dtype=float),
            components=np.array(doc["components"], dtype=float),
            eigenvalues=np.array(doc["eigenvalues"], dtype=float),
            displacement_range=(float(lo), float(hi)),
            warnings=tuple(doc.get("warnings", ())),
        )


def fit(
    force_matrix: np.ndarray,
    max_displacements: np.ndarray | None = None,
    n_components: int = N_COMPONENTS,
) -> PcaModel:
    """Fit the compression model on an (n, 100) force matrix.

    Components are the top right singular vectors of the centered
    matrix; eigenvalue j is s_j^2 / (n - 1).  Each component is oriented
    so its largest-magnitude entry is positive.  A rank below
    ``n_components`` is permitted (trailing eigenvalues are ~0) and
    recorded in the model's warnings.

    ``max_displacements`` sets the model's displacement normalization
    range; omit it only for models that never encode displacement.
    """
    X = np.asarray(force_matrix, dtype=float)
    if X.ndim != 2 or X.shape[1] != GRID_POINTS:
        raise ValueError(f"expected an (n, {GRID_POINTS}) matrix, got {X.shape}")
    n = X.shape[0]
    if n < n_components + 1:
        raise ValueError(f"need at least {n_components + 1} curves, got {n}")
    if not np.isfinite(X).all():
        raise ValueError("force matrix must be finite")

    mean = X.mean(axis=0)
    centered = X - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:n_components].copy()
    eigenvalues = (s[:n_components] ** 2) / (n - 1)

    # Orientation convention: largest-|entry| coordinate positive.
    for row in components:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0.0:
            row *= -1.0

    warnings: list[str] = []
    rank_tol = s[0] * max(X.shape) * np.finfo(float).eps if s.size else 0.0
    rank = int((s > rank_tol).sum())
    if rank < n_components:
        warnings.append(
            f"force matrix rank {rank} < {n_components}; trailing components "
            "span noise directions with ~zero eigenvalue"
        )

    if max_displacements is None:
        displacement_range = (0.0, 1.0)
    else:
        md = np.asarray(max_displacements, dtype=float)
        if md.shape != (n,):
            raise ValueError("max_displacements must have one entry per curve")
        displacement_range = (float(md.min()), float(md.max()))

    return PcaModel(
        mean=mean,
        components=components,
        eigenvalues=eigenvalues,
        displacement_range=displacement_range,
        warnings=tuple(warnings),
    )


def project(model: PcaModel, forces: np.ndarray) -> np.ndarray:
    """Coefficients of a 100-vector (or batch) in the component basis."""
    f = np.asarray(forces, dtype=float)
    return (f - model.mean) @ model.components.T


def reconstruct(model: PcaModel, coefficients: np.ndarray) -> np.ndarray:
    """Inverse of :func:`project`; negative forces are not clamped here."""
    c = np.asarray(coefficients, dtype=float)
    return model.mean + c @ model.components
