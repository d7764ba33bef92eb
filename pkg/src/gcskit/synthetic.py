"""Deterministic synthetic design/curve data for tests and demos.

The generator defines a smooth closed-form map from a design to a
compression curve, built from an exponential rise envelope modulated by
nine low-order harmonics.  The harmonic amplitudes, the peak force, and
the maximum displacement are each smooth (mostly linear) functions of
the normalized design scalars, with per-material force and compliance
factors.  By construction the force matrix of any large sample spans
exactly ten directions — the envelope plus nine harmonics — so a
10-component PCA basis represents it losslessly, and the coefficient
scales are kept moderate so every performance slot trains at a
comparable rate.  None of this is a mechanics model; it exists to give
pipelines a learnable, well-conditioned ground truth.
"""

from __future__ import annotations

import numpy as np

from .curves import RawCurve
from .geometry import SCALAR_RANGES, GcsDesign, Material
from .dataset import Dataset, DatasetRecord

__all__ = [
    "MATERIAL_STIFFNESS",
    "MATERIAL_COMPLIANCE",
    "curve_for",
    "sample_designs",
    "synthetic_dataset",
]

#: Dimensionless force multiplier applied to the whole curve.
MATERIAL_STIFFNESS = {
    Material.PETG: 1.15,
    Material.PLA: 1.2,
    Material.TPE_CHINCHILLA_75A: 0.8,
    Material.TPU_CHEETAH_95A: 0.95,
    Material.TPU_NINJAFLEX_85A: 0.85,
    Material.TPU_ARMADILLO_75D: 1.05,
}

#: Dimensionless multiplier on the maximum displacement (softer
#: materials travel further before the test ends).
MATERIAL_COMPLIANCE = {
    Material.PETG: 0.92,
    Material.PLA: 0.9,
    Material.TPE_CHINCHILLA_75A: 1.1,
    Material.TPU_CHEETAH_95A: 1.0,
    Material.TPU_NINJAFLEX_85A: 1.06,
    Material.TPU_ARMADILLO_75D: 0.96,
}

_N_HARMONICS = 9
_RAW_POINTS = 150


def _peak_and_dmax(design: GcsDesign) -> tuple[float, float]:
    from .vectorize import encode_design

    u = encode_design(design)[:11]
    peak_n = 6.0 + 8.0 * (0.45 * u[8] + 0.3 * (1.0 - u[10]) + 0.25 * u[9])
    peak_n *= MATERIAL_STIFFNESS[design.material]
    d_max = 4.0 + 16.0 * (0.65 * u[9] + 0.35 * (1.0 - u[8]))
    d_max *= MATERIAL_COMPLIANCE[design.material]
    return float(peak_n), float(d_max)


def _force_profile(design: GcsDesign, s: np.ndarray) -> np.ndarray:
    from .vectorize import encode_design

    u = encode_design(design)[:11]
    peak_n, _ = _peak_and_dmax(design)
    envelope = 1.0 - np.exp(-6.0 * s)
    k = np.arange(1, _N_HARMONICS + 1)
    amplitudes = 0.3 * (u[:_N_HARMONICS] - 0.5) / k
    ripple = np.sin(np.pi * np.outer(s, k)) @ amplitudes
    return peak_n * envelope * (1.0 + ripple)


def curve_for(design: GcsDesign, raw_points: int = _RAW_POINTS) -> RawCurve:
    """The ground-truth compression curve for a design.

    Pure function of the design: the same input always yields the same
    curve.  Displacements start slightly above zero so downstream
    resampling exercises its head extrapolation.
    """
    if raw_points < 2:
        raise ValueError("raw_points must be at least 2")
    _, d_max = _peak_and_dmax(design)
    displacements = np.linspace(0.004 * d_max, d_max, raw_points)
    forces = _force_profile(design, displacements / d_max)
    return RawCurve(displacements=displacements, forces=forces)


def sample_designs(n: int, seed: int) -> list[GcsDesign]:
    """Draw n designs uniformly over the parameter ranges and materials."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    materials = list(Material)
    designs = []
    for _ in range(n):
        scalars = {
            name: float(rng.uniform(lo, hi))
            for name, (lo, hi) in SCALAR_RANGES.items()
        }
        material = materials[int(rng.integers(len(materials)))]
        designs.append(GcsDesign(material=material, **scalars))
    return designs


def synthetic_dataset(n: int, seed: int, notes: str = "synthetic demo data") -> Dataset:
    """A dataset of n sampled designs with their ground-truth curves."""
    records = [
        DatasetRecord(record_id=f"syn-{k:05d}", design=design, curve=curve_for(design))
        for k, design in enumerate(sample_designs(n, seed))
    ]
    return Dataset(records=records, notes=notes)
