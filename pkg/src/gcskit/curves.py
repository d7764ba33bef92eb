"""Compressive force-displacement curves and their derived metrics.

Raw test curves arrive with arbitrary, irregular sampling.  Everything
downstream works on a canonical resampling: 100 forces at evenly spaced
displacements from zero to the curve's maximum displacement.  Work and
threshold-limited energy integrate with the trapezoid rule and convert
N*mm to J.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

GRID_POINTS = 100

#: N*mm -> J
NMM_TO_J = 1e-3

#: Linear-elastic-zone search: fit windows of this many grid points ...
STIFFNESS_WINDOW = 10
#: ... starting at indices 0 .. this (inclusive), keep the best-R2 slope.
STIFFNESS_MAX_START = 30


@dataclass(frozen=True)
class RawCurve:
    """An as-measured compression curve: (displacement mm, force N) samples."""

    displacements: np.ndarray
    forces: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.displacements, dtype=float)
        f = np.asarray(self.forces, dtype=float)
        object.__setattr__(self, "displacements", d)
        object.__setattr__(self, "forces", f)
        if d.ndim != 1 or f.shape != d.shape:
            raise ValueError("displacements and forces must be equal-length 1-D")
        if len(d) < 2:
            raise ValueError("a curve needs at least 2 samples")
        if not np.isfinite(d).all() or not np.isfinite(f).all():
            raise ValueError("curve samples must be finite")
        if d[0] < 0.0:
            raise ValueError("first displacement must be >= 0")
        steps = np.diff(d)
        if not (steps > 0.0).all():
            row = int(np.argmax(steps <= 0.0)) + 1
            raise ValueError(
                f"displacements must be strictly increasing (violated at row {row})"
            )

    @classmethod
    def from_samples(cls, samples) -> "RawCurve":
        arr = np.asarray(samples, dtype=float)
        return cls(displacements=arr[:, 0], forces=arr[:, 1])


@dataclass(frozen=True)
class ResampledCurve:
    """Forces on the canonical grid d_i = max_displacement * i / 99."""

    forces: np.ndarray
    max_displacement: float

    def __post_init__(self):
        f = np.asarray(self.forces, dtype=float)
        object.__setattr__(self, "forces", f)
        if f.shape != (GRID_POINTS,):
            raise ValueError(f"expected {GRID_POINTS} forces, got {f.shape}")
        if not self.max_displacement > 0.0:
            raise ValueError("max_displacement must be positive")

    @property
    def displacements(self) -> np.ndarray:
        return np.linspace(0.0, self.max_displacement, GRID_POINTS)


@dataclass(frozen=True)
class CurveMetrics:
    stiffness: float  # N/mm
    work: float  # J
    max_displacement: float  # mm

    def as_dict(self) -> dict:
        return {
            "stiffness_n_mm": float(self.stiffness),
            "work_j": float(self.work),
            "max_displacement_mm": float(self.max_displacement),
        }


def resample(raw: RawCurve) -> ResampledCurve:
    """Linearly interpolate a raw curve onto the canonical grid.

    If the raw data starts after zero displacement, forces below the
    first sample are linearly extrapolated from the first two samples
    and clamped at >= 0.
    """
    d_max = float(raw.displacements[-1])
    grid = np.linspace(0.0, d_max, GRID_POINTS)
    forces = np.interp(grid, raw.displacements, raw.forces)
    d0 = raw.displacements[0]
    if d0 > 0.0:
        head = grid < d0
        slope = (raw.forces[1] - raw.forces[0]) / (
            raw.displacements[1] - raw.displacements[0]
        )
        extrapolated = raw.forces[0] + slope * (grid[head] - d0)
        forces[head] = np.maximum(extrapolated, 0.0)
    return ResampledCurve(forces=forces, max_displacement=d_max)


def work(curve: ResampledCurve) -> float:
    """Energy absorbed (J): trapezoidal area under the curve."""
    return float(np.trapezoid(curve.forces, curve.displacements) * NMM_TO_J)


def stiffness(
    curve: ResampledCurve,
    window: int = STIFFNESS_WINDOW,
    max_start: int = STIFFNESS_MAX_START,
) -> float:
    """Slope (N/mm) of the best-fitting early linear window.

    Least-squares lines are fit to every run of ``window`` consecutive
    grid points starting at indices 0..``max_start``; the slope of the
    window with the highest R2 wins, earliest window on ties.  Returns 0
    when every window has zero force variance.
    """
    d = curve.displacements
    f = curve.forces
    best_r2 = -np.inf
    best_slope = 0.0
    for start in range(max_start + 1):
        dw = d[start : start + window]
        fw = f[start : start + window]
        f_var = float(((fw - fw.mean()) ** 2).sum())
        if f_var == 0.0:
            continue
        slope, intercept = np.polyfit(dw, fw, 1)
        residuals = fw - (slope * dw + intercept)
        r2 = 1.0 - float((residuals**2).sum()) / f_var
        if r2 > best_r2:
            best_r2 = r2
            best_slope = float(slope)
    return best_slope


def energy_before_threshold(curve: ResampledCurve, f_threshold: float) -> float:
    """Work (J) accumulated before the force first exceeds the threshold.

    The crossing point is located by linear interpolation within the
    grid segment; returns the full work if the threshold is never
    exceeded.
    """
    if not f_threshold > 0.0:
        raise ValueError("f_threshold must be positive")
    d = curve.displacements
    f = curve.forces
    exceeded = np.nonzero(f > f_threshold)[0]
    if len(exceeded) == 0:
        return work(curve)
    j = int(exceeded[0])
    if j == 0:
        return 0.0
    segments = np.trapezoid(f[:j], d[:j])
    f0, f1 = f[j - 1], f[j]
    d_cross = d[j - 1] + (f_threshold - f0) / (f1 - f0) * (d[j] - d[j - 1])
    partial = 0.5 * (f0 + f_threshold) * (d_cross - d[j - 1])
    return float((segments + partial) * NMM_TO_J)


def metrics(curve: ResampledCurve) -> CurveMetrics:
    return CurveMetrics(
        stiffness=stiffness(curve),
        work=work(curve),
        max_displacement=float(curve.max_displacement),
    )


def read_curve_csv(path) -> RawCurve:
    """Read the curve interchange format: header displacement_mm,force_n."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return _read_curve(fh, str(path))


def _read_curve(fh, label: str) -> RawCurve:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError(f"{label}: empty curve file") from None
    if [h.strip() for h in header] != ["displacement_mm", "force_n"]:
        raise ValueError(
            f"{label}: expected header 'displacement_mm,force_n', got {header!r}"
        )
    rows = []
    for n, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            rows.append((float(row[0]), float(row[1])))
        except (ValueError, IndexError):
            raise ValueError(f"{label}: malformed sample at row {n}") from None
    if len(rows) < 2:
        raise ValueError(f"{label}: a curve needs at least 2 samples")
    return RawCurve.from_samples(rows)


def parse_curve_csv(text: str, label: str = "<curve>") -> RawCurve:
    return _read_curve(io.StringIO(text), label)


def write_curve_csv(path, raw: RawCurve) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("displacement_mm,force_n\n")
        for d, f in zip(raw.displacements, raw.forces):
            fh.write(f"{float(d)!r},{float(f)!r}\n")
