"""Encoding between physical designs/curves and learning-space vectors.

Design vectors are 17-dimensional: the eleven scalar parameters min-max
normalized against their fixed valid ranges (never data-derived), then a
six-wide one-hot material block.  Performance vectors are
11-dimensional: ten PCA coefficients at natural scale plus the maximum
displacement min-max normalized by the PCA model's training range.
"""

from __future__ import annotations

import warnings as _warnings

import numpy as np

from . import pca as _pca
from .curves import ResampledCurve
from .geometry import SCALAR_FIELDS, SCALAR_RANGES, GcsDesign, Material
from .pca import PcaModel

DESIGN_DIM = 17
PERFORMANCE_DIM = 11
N_SCALARS = len(SCALAR_FIELDS)  # 11
N_COEFFS = PERFORMANCE_DIM - 1  # 10 PCA coefficients precede the displacement slot
MATERIAL_ORDER = tuple(Material)  # fixed serialization order

_LO = np.array([SCALAR_RANGES[f][0] for f in SCALAR_FIELDS])
_HI = np.array([SCALAR_RANGES[f][1] for f in SCALAR_FIELDS])


class ClampWarning(UserWarning):
    """An out-of-range value was clamped during encoding."""


def encode_design(design: GcsDesign) -> np.ndarray:
    """Normalize a valid design to a 17-vector in [0, 1]^17."""
    design.validate()
    x = np.empty(DESIGN_DIM)
    x[:N_SCALARS] = (design.scalars() - _LO) / (_HI - _LO)
    x[N_SCALARS:] = 0.0
    x[N_SCALARS + MATERIAL_ORDER.index(design.material)] = 1.0
    return x


def decode_design(vector: np.ndarray) -> GcsDesign:
    """Invert :func:`encode_design`; total on any finite 17-vector.

    Scalar entries are clamped to [0, 1] before denormalization; the
    material is the argmax of the block (lowest index on ties).
    """
    v = np.asarray(vector, dtype=float)
    if v.shape != (DESIGN_DIM,):
        raise ValueError(f"expected a {DESIGN_DIM}-vector, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError("design vector must be finite")
    scalars = _LO + np.clip(v[:N_SCALARS], 0.0, 1.0) * (_HI - _LO)
    material = MATERIAL_ORDER[int(np.argmax(v[N_SCALARS:]))]
    kwargs = {f: float(s) for f, s in zip(SCALAR_FIELDS, scalars)}
    return GcsDesign(**kwargs, material=material)


def is_valid_design_vector(vector: np.ndarray, one_hot: bool = False) -> bool:
    """All entries in [0, 1]; material block one-hot or summing to 1 (1e-6)."""
    v = np.asarray(vector, dtype=float)
    if v.shape != (DESIGN_DIM,) or not np.isfinite(v).all():
        return False
    if (v < 0.0).any() or (v > 1.0).any():
        return False
    block = v[N_SCALARS:]
    if one_hot:
        return bool(((block == 0.0) | (block == 1.0)).all() and block.sum() == 1.0)
    return bool(abs(block.sum() - 1.0) <= 1e-6)


def encode_performance(
    curve: ResampledCurve, model: PcaModel, normalize_displacement: bool = True
) -> np.ndarray:
    """PCA coefficients plus (normalized) max displacement as an 11-vector."""
    coeffs = _pca.project(model, curve.forces)
    if normalize_displacement:
        lo, hi = model.displacement_range
        if hi <= lo:
            raise ValueError("PCA model has a degenerate displacement range")
        pos = (curve.max_displacement - lo) / (hi - lo)
        if pos < 0.0 or pos > 1.0:
            _warnings.warn(
                f"max displacement {curve.max_displacement} mm outside the "
                f"model range [{lo}, {hi}] mm; clamped",
                ClampWarning,
                stacklevel=2,
            )
            pos = min(max(pos, 0.0), 1.0)
    else:
        pos = curve.max_displacement
    return np.concatenate([coeffs, [pos]])


def encode_performance_matrix(
    force_matrix: np.ndarray, max_displacements: np.ndarray, model: PcaModel
) -> np.ndarray:
    """Vectorized encode_performance over an (n, 100) force matrix.

    Displacements outside the model range are clamped exactly as in the
    scalar path, with a single warning covering the batch.
    """
    force_matrix = np.asarray(force_matrix, dtype=float)
    max_displacements = np.asarray(max_displacements, dtype=float)
    if force_matrix.ndim != 2 or force_matrix.shape[0] != max_displacements.shape[0]:
        raise ValueError("force matrix rows must match max_displacements length")
    coeffs = _pca.project(model, force_matrix)
    lo, hi = model.displacement_range
    if hi <= lo:
        raise ValueError("PCA model has a degenerate displacement range")
    pos = (max_displacements - lo) / (hi - lo)
    if (pos < 0.0).any() or (pos > 1.0).any():
        _warnings.warn(
            f"{int(((pos < 0.0) | (pos > 1.0)).sum())} max displacements outside "
            f"the model range [{lo}, {hi}] mm; clamped",
            ClampWarning,
            stacklevel=2,
        )
        pos = np.clip(pos, 0.0, 1.0)
    return np.column_stack([coeffs, pos])


def decode_performance(
    vector: np.ndarray, model: PcaModel, normalize_displacement: bool = True
) -> ResampledCurve:
    """Reconstruct the force curve behind a performance vector.

    Reconstructed forces are clamped at >= 0 N: decoded curves feed
    metric reporting, where negative contact force is unphysical.  The
    clamp never runs inside the training loss path.
    """
    v = np.asarray(vector, dtype=float)
    if v.shape != (PERFORMANCE_DIM,):
        raise ValueError(f"expected an {PERFORMANCE_DIM}-vector, got shape {v.shape}")
    forces = np.maximum(_pca.reconstruct(model, v[:N_COEFFS]), 0.0)
    if normalize_displacement:
        lo, hi = model.displacement_range
        d_max = lo + float(np.clip(v[N_COEFFS], 0.0, 1.0)) * (hi - lo)
    else:
        d_max = float(v[N_COEFFS])
    return ResampledCurve(forces=forces, max_displacement=d_max)
