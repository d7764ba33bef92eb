"""Design applications: impact-absorption search and material emulation.

The impact optimizer searches a grid of plateau-shaped target curves —
ideal absorbers ramp up and hold — and scores each candidate by how
much of the required energy its *generated* design is predicted to
absorb below the force threshold.  Feasibility is judged on the
forward model's prediction for the generated design, not on the target
curve, because the generated design's behavior is what matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import ResampledCurve, energy_before_threshold, metrics as curve_metrics
from .geometry import GcsDesign, PrintabilityReport, check_printability
from .pca import PcaModel
from .tandem import Mlp, forward_pass
from .vectorize import decode_design, decode_performance, encode_performance

__all__ = [
    "ImpactSpec",
    "ImpactResult",
    "EmulationReport",
    "make_target_curve",
    "optimize_impact",
    "emulate_material",
]


@dataclass(frozen=True)
class ImpactSpec:
    """Impact-absorption problem: keep peak force under force_threshold_n
    while absorbing target_energy_j, searched over a plateau-curve grid."""

    force_threshold_n: float
    target_energy_j: float
    ramp_stiffness_n_mm: tuple[float, ...]
    plateau_fractions: tuple[float, ...]
    max_displacements_mm: tuple[float, ...]
    safety_margin: float = 1.0

    def __post_init__(self):
        if self.force_threshold_n <= 0.0:
            raise ValueError("force_threshold_n must be positive")
        if self.target_energy_j <= 0.0:
            raise ValueError("target_energy_j must be positive")
        if not 0.0 < self.safety_margin <= 1.0:
            raise ValueError("safety_margin must be in (0, 1]")
        if not (self.ramp_stiffness_n_mm and self.plateau_fractions and self.max_displacements_mm):
            raise ValueError("candidate grids must be non-empty")

    @classmethod
    def from_dict(cls, payload: dict) -> "ImpactSpec":
        return cls(
            force_threshold_n=float(payload["force_threshold_n"]),
            target_energy_j=float(payload["target_energy_j"]),
            ramp_stiffness_n_mm=tuple(float(v) for v in payload["ramp_stiffness_n_mm"]),
            plateau_fractions=tuple(float(v) for v in payload["plateau_fractions"]),
            max_displacements_mm=tuple(float(v) for v in payload["max_displacements_mm"]),
            safety_margin=float(payload.get("safety_margin", 1.0)),
        )

    def as_dict(self) -> dict:
        return {
            "force_threshold_n": self.force_threshold_n,
            "target_energy_j": self.target_energy_j,
            "ramp_stiffness_n_mm": list(self.ramp_stiffness_n_mm),
            "plateau_fractions": list(self.plateau_fractions),
            "max_displacements_mm": list(self.max_displacements_mm),
            "safety_margin": self.safety_margin,
        }


@dataclass(frozen=True)
class ImpactResult:
    best_design: GcsDesign
    achieved_e_f_j: float
    predicted_peak_force_n: float
    deficit_j: float
    printable: bool
    feasible: bool
    candidate_log: tuple[dict, ...]

    def as_dict(self) -> dict:
        return {
            "best_design": self.best_design.as_dict(),
            "achieved_e_f_j": self.achieved_e_f_j,
            "predicted_peak_force_n": self.predicted_peak_force_n,
            "deficit_j": self.deficit_j,
            "printable": self.printable,
            "feasible": self.feasible,
            "candidate_log": [dict(entry) for entry in self.candidate_log],
        }


def make_target_curve(ramp_k: float, plateau_f: float, d_max: float) -> ResampledCurve:
    """Ramp at ramp_k N/mm to plateau_f N, then hold flat out to d_max."""
    if ramp_k < 0.0 or plateau_f < 0.0:
        raise ValueError("ramp_k and plateau_f must be nonnegative")
    if d_max <= 0.0:
        raise ValueError("d_max must be positive")
    curve = ResampledCurve(forces=np.zeros(100), max_displacement=d_max)
    forces = np.minimum(ramp_k * curve.displacements, plateau_f)
    return ResampledCurve(forces=forces, max_displacement=d_max)


def optimize_impact(
    spec: ImpactSpec, inverse_net: Mlp, forward_net: Mlp, model: PcaModel
) -> ImpactResult:
    """Grid-search plateau target curves through the tandem pipeline.

    Each candidate target is encoded, inverted to a design, pushed back
    through the forward net, and scored as target_energy − E_F of the
    predicted curve.  A candidate is feasible when its predicted peak
    stays at or under the threshold and its design is printable.  The
    feasible candidate with the lowest score wins (earliest grid index
    on ties); with no feasible candidate the same argmin over all
    candidates is returned with the feasible flag down.
    """
    threshold = spec.force_threshold_n
    log: list[dict] = []
    candidates: list[tuple[float, bool, GcsDesign, float, float, bool]] = []
    index = 0
    for ramp_k in spec.ramp_stiffness_n_mm:
        for fraction in spec.plateau_fractions:
            plateau_f = fraction * spec.safety_margin * threshold
            for d_max in spec.max_displacements_mm:
                target = make_target_curve(ramp_k, plateau_f, d_max)
                design_vec = forward_pass(inverse_net, encode_performance(target, model))
                design = decode_design(design_vec)
                predicted = decode_performance(forward_pass(forward_net, design_vec), model)
                peak = float(predicted.forces.max())
                printable = check_printability(design).printable
                feasible = peak <= threshold and printable
                e_f = energy_before_threshold(predicted, threshold)
                score = spec.target_energy_j - e_f
                log.append(
                    {
                        "index": index,
                        "ramp_stiffness_n_mm": float(ramp_k),
                        "plateau_force_n": float(plateau_f),
                        "max_displacement_mm": float(d_max),
                        "e_f_j": e_f,
                        "score_j": score,
                        "predicted_peak_n": peak,
                        "printable": printable,
                        "feasible": feasible,
                    }
                )
                candidates.append((score, feasible, design, e_f, peak, printable))
                index += 1

    def best_of(entries):
        best = None
        for i, entry in entries:
            if best is None or entry[0] < best[1][0]:
                best = (i, entry)
        return best

    feasible_entries = [(i, c) for i, c in enumerate(candidates) if c[1]]
    chosen = best_of(feasible_entries) if feasible_entries else best_of(enumerate(candidates))
    _, (score, feasible, design, e_f, peak, printable) = chosen
    return ImpactResult(
        best_design=design,
        achieved_e_f_j=e_f,
        predicted_peak_force_n=peak,
        deficit_j=max(0.0, score),
        printable=printable,
        feasible=feasible,
        candidate_log=tuple(log),
    )


@dataclass(frozen=True)
class EmulationReport:
    target_curve: ResampledCurve
    predicted_curve: ResampledCurve
    target_metrics: dict
    predicted_metrics: dict
    deltas: dict
    printability: PrintabilityReport
    degenerate_target: bool

    def as_dict(self) -> dict:
        return {
            "target_curve": _curve_dict(self.target_curve),
            "predicted_curve": _curve_dict(self.predicted_curve),
            "target_metrics": self.target_metrics,
            "predicted_metrics": self.predicted_metrics,
            "deltas": self.deltas,
            "printability": self.printability.as_dict(),
            "degenerate_target": self.degenerate_target,
        }


def _curve_dict(curve: ResampledCurve) -> dict:
    return {
        "displacements": [float(v) for v in curve.displacements],
        "forces": [float(v) for v in curve.forces],
    }


def emulate_material(
    measured, inverse_net: Mlp, forward_net: Mlp, model: PcaModel
) -> tuple[GcsDesign, EmulationReport]:
    """Find a design whose predicted curve mimics a measured curve.

    The measured curve is resampled and encoded (displacements beyond
    the model range clamp with a warning), inverted to a design, and
    validated by the forward model; the report carries per-metric
    deltas (predicted − target) and the design's printability.
    """
    from .curves import resample

    target = measured if isinstance(measured, ResampledCurve) else resample(measured)
    design_vec = forward_pass(inverse_net, encode_performance(target, model))
    design = decode_design(design_vec)
    predicted = decode_performance(forward_pass(forward_net, design_vec), model)
    target_metrics = curve_metrics(target).as_dict()
    predicted_metrics = curve_metrics(predicted).as_dict()
    deltas = {
        key: predicted_metrics[key] - target_metrics[key] for key in target_metrics
    }
    report = EmulationReport(
        target_curve=target,
        predicted_curve=predicted,
        target_metrics=target_metrics,
        predicted_metrics=predicted_metrics,
        deltas=deltas,
        printability=check_printability(design),
        degenerate_target=target_metrics["work_j"] == 0.0,
    )
    return design, report
