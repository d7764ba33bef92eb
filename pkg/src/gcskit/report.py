"""Report emission: JSON/CSV tables and matplotlib figures.

Every writer renders its delimited output and its figure side by side
in the target directory, so a report directory is self-contained and
diffable.  All rendering uses the Agg backend; no display is required.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .curves import ResampledCurve
from .evaluation import METRIC_KEYS, MetricReport, SweepResult

__all__ = [
    "metric_table_rows",
    "write_metric_report",
    "write_sweep_report",
    "write_scatter_figure",
    "write_curve_comparison",
]

_METRIC_LABELS = {
    "stiffness_n_mm": "stiffness (N/mm)",
    "work_j": "work (J)",
    "max_displacement_mm": "max displacement (mm)",
}


def metric_table_rows(report: MetricReport) -> list[dict]:
    rows = []
    for key in METRIC_KEYS:
        st = report.metrics[key]
        rows.append(
            {
                "metric": key,
                "mae_mean": st.mae_mean,
                "mae_ci95": st.mae_ci95,
                "r2_mean": st.r2_mean,
                "r2_ci95": st.r2_ci95,
            }
        )
    return rows


def _write_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_metric_report(report: MetricReport, out_dir, basename: str = "eval") -> list[Path]:
    """Emit <basename>.json, <basename>.csv, and <basename>.png."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{basename}.json"
    csv_path = out_dir / f"{basename}.csv"
    fig_path = out_dir / f"{basename}.png"
    _write_json(json_path, report.as_dict())
    _write_csv(csv_path, metric_table_rows(report))

    fig, (ax_mae, ax_r2) = plt.subplots(1, 2, figsize=(9, 3.5))
    labels = [_METRIC_LABELS[k] for k in METRIC_KEYS]
    x = np.arange(len(METRIC_KEYS))
    maes = [report.metrics[k].mae_mean for k in METRIC_KEYS]
    mae_errs = [report.metrics[k].mae_ci95 for k in METRIC_KEYS]
    ax_mae.bar(x, maes, yerr=mae_errs, capsize=4, color="#4878a8")
    ax_mae.set_xticks(x, labels, rotation=15, ha="right", fontsize=8)
    ax_mae.set_ylabel("MAE")
    ax_mae.set_title(f"MAE over {report.runs} runs ({report.predictor})")
    r2s = [report.metrics[k].r2_mean for k in METRIC_KEYS]
    r2_errs = [report.metrics[k].r2_ci95 for k in METRIC_KEYS]
    defined = [i for i, v in enumerate(r2s) if v is not None]
    ax_r2.bar(
        [x[i] for i in defined],
        [r2s[i] for i in defined],
        yerr=[r2_errs[i] or 0.0 for i in defined],
        capsize=4,
        color="#60a060",
    )
    ax_r2.set_xticks(x, labels, rotation=15, ha="right", fontsize=8)
    ax_r2.set_ylim(top=1.05)
    ax_r2.set_ylabel("R²")
    ax_r2.set_title("R²")
    fig.tight_layout()
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    return [json_path, csv_path, fig_path]


def write_sweep_report(sweep: SweepResult, out_dir, basename: str = "sweep") -> list[Path]:
    """Emit the printability sweep as JSON, plot-data CSV, and a figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{basename}.json"
    csv_path = out_dir / f"{basename}.csv"
    fig_path = out_dir / f"{basename}.png"
    _write_json(json_path, sweep.as_dict())
    rows = [
        {"alpha": a, "rate_mean": m, "rate_ci95": c}
        for a, m, c in zip(sweep.alphas, sweep.rate_mean, sweep.rate_ci95)
    ]
    _write_csv(csv_path, rows)

    order = np.argsort(sweep.alphas)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.errorbar(
        range(len(order)),
        [sweep.rate_mean[i] for i in order],
        yerr=[sweep.rate_ci95[i] for i in order],
        marker="o",
        capsize=4,
    )
    ax.set_xticks(range(len(order)), [format(sweep.alphas[i], "g") for i in order])
    ax.set_xlabel("design-loss weight α")
    ax.set_ylabel("printable designs (%)")
    ax.set_ylim(-2, 102)
    fig.tight_layout()
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    return [json_path, csv_path, fig_path]


def write_scatter_figure(pairs: dict[str, np.ndarray], path) -> Path:
    """True-vs-predicted scatter, one panel per curve metric."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, axes = plt.subplots(1, len(METRIC_KEYS), figsize=(4 * len(METRIC_KEYS), 3.5))
    for ax, key in zip(np.atleast_1d(axes), METRIC_KEYS):
        data = np.asarray(pairs[key])
        ax.scatter(data[:, 0], data[:, 1], s=8, alpha=0.5)
        lo = float(min(data.min(), 0.0))
        hi = float(data.max()) or 1.0
        ax.plot([lo, hi], [lo, hi], color="gray", linewidth=0.8)
        ax.set_xlabel(f"true {_METRIC_LABELS[key]}")
        ax.set_ylabel(f"predicted {_METRIC_LABELS[key]}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_curve_comparison(
    target: ResampledCurve, predicted: ResampledCurve, path, labels=("target", "predicted")
) -> Path:
    """Overlay two resampled curves for visual comparison."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(target.displacements, target.forces, label=labels[0])
    ax.plot(predicted.displacements, predicted.forces, label=labels[1], linestyle="--")
    ax.set_xlabel("displacement (mm)")
    ax.set_ylabel("force (N)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
