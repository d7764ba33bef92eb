"""Headline statistics: per-metric MAE/R² with confidence intervals and
the printability-rate sweep over the design-loss weight alpha.

Forward evaluation compares the metrics of decoded *predicted*
performance vectors against decoded *true* performance vectors, which
isolates model error from compression loss; a raw-curve mode is
available for the conflated comparison.  Confidence intervals are
Student-t over repeated runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .curves import ResampledCurve, metrics as curve_metrics
from .dataset import Dataset, encode_designs, resample_all
from .geometry import check_printability
from .knn import KnnIndex, knn_forward_batch
from .pca import PcaModel, fit as fit_pca
from .splits import SplitSpec, split_indices
from .tandem import (
    Mlp,
    TrainConfig,
    forward_pass,
    loss_weights_from_pca,
    train_forward,
    train_inverse,
)
from .vectorize import decode_design, decode_performance, encode_performance_matrix

__all__ = [
    "METRIC_KEYS",
    "MetricStats",
    "MetricReport",
    "SweepResult",
    "ci95",
    "mae_r2",
    "curve_metric_errors",
    "repeated_runs",
    "printability_sweep",
]

METRIC_KEYS = ("stiffness_n_mm", "work_j", "max_displacement_mm")


def ci95(values) -> float:
    """Half-width of the 95% Student-t confidence interval of the mean."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        return 0.0
    return float(stats.t.ppf(0.975, n - 1) * np.std(values, ddof=1) / np.sqrt(n))


def mae_r2(pairs) -> tuple[float, float | None]:
    """MAE and R² for an (n, 2) array of (truth, prediction) pairs.

    R² is 1 − SS_res/SS_tot; with zero truth variance it is undefined
    and reported as None rather than a number.
    """
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2 or pairs.shape[0] < 1:
        raise ValueError("expected an (n, 2) array of (truth, prediction) pairs")
    truth, pred = pairs[:, 0], pairs[:, 1]
    mae = float(np.mean(np.abs(pred - truth)))
    ss_tot = float(np.sum((truth - truth.mean()) ** 2))
    if ss_tot == 0.0:
        return mae, None
    ss_res = float(np.sum((pred - truth) ** 2))
    return mae, 1.0 - ss_res / ss_tot


def curve_metric_errors(
    predicted_performances: np.ndarray,
    true_performances: np.ndarray,
    model: PcaModel,
    true_curves: list[ResampledCurve] | None = None,
) -> dict[str, np.ndarray]:
    """Per-sample (truth, prediction) metric pairs from performance vectors.

    Both inputs are decoded to curves and scored with the shared curve
    metrics.  When true_curves is given, truth metrics come from those
    curves instead of decoded vectors (the raw-curve comparison mode).
    """
    predicted_performances = np.atleast_2d(np.asarray(predicted_performances, dtype=float))
    true_performances = np.atleast_2d(np.asarray(true_performances, dtype=float))
    if predicted_performances.shape[0] != true_performances.shape[0]:
        raise ValueError(
            f"length mismatch: {predicted_performances.shape[0]} predictions "
            f"vs {true_performances.shape[0]} truths"
        )
    if true_curves is not None and len(true_curves) != true_performances.shape[0]:
        raise ValueError("length mismatch between true_curves and vectors")
    n = predicted_performances.shape[0]
    pairs = {key: np.empty((n, 2)) for key in METRIC_KEYS}
    for i in range(n):
        if true_curves is not None:
            truth = curve_metrics(true_curves[i]).as_dict()
        else:
            truth = curve_metrics(decode_performance(true_performances[i], model)).as_dict()
        pred = curve_metrics(decode_performance(predicted_performances[i], model)).as_dict()
        for key in METRIC_KEYS:
            pairs[key][i, 0] = truth[key]
            pairs[key][i, 1] = pred[key]
    return pairs


@dataclass(frozen=True)
class MetricStats:
    mae_mean: float
    mae_ci95: float
    r2_mean: float | None
    r2_ci95: float | None
    mae_runs: tuple[float, ...]
    r2_runs: tuple[float | None, ...]

    def as_dict(self) -> dict:
        return {
            "mae_mean": self.mae_mean,
            "mae_ci95": self.mae_ci95,
            "r2_mean": self.r2_mean,
            "r2_ci95": self.r2_ci95,
            "mae_runs": list(self.mae_runs),
            "r2_runs": list(self.r2_runs),
        }


@dataclass(frozen=True)
class MetricReport:
    metrics: dict[str, MetricStats]
    runs: int
    predictor: str
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "runs": self.runs,
            "predictor": self.predictor,
            "metrics": {key: st.as_dict() for key, st in self.metrics.items()},
            "extras": self.extras,
        }


def _aggregate(per_run_pairs: list[dict[str, np.ndarray]], predictor: str, extras: dict) -> MetricReport:
    stats_by_key = {}
    for key in METRIC_KEYS:
        maes, r2s = [], []
        for pairs in per_run_pairs:
            mae, r2 = mae_r2(pairs[key])
            maes.append(mae)
            r2s.append(r2)
        defined = [r for r in r2s if r is not None]
        stats_by_key[key] = MetricStats(
            mae_mean=float(np.mean(maes)),
            mae_ci95=ci95(maes),
            r2_mean=float(np.mean(defined)) if defined else None,
            r2_ci95=ci95(defined) if defined else None,
            mae_runs=tuple(maes),
            r2_runs=tuple(r2s),
        )
    return MetricReport(
        metrics=stats_by_key, runs=len(per_run_pairs), predictor=predictor, extras=extras
    )


def _prepare_vectors(dataset: Dataset) -> tuple[np.ndarray, np.ndarray, PcaModel]:
    designs = encode_designs(dataset)
    forces, max_disps = resample_all(dataset)
    model = fit_pca(forces, max_displacements=max_disps)
    performances = encode_performance_matrix(forces, max_disps, model)
    return designs, performances, model


def repeated_runs(
    dataset: Dataset,
    config: TrainConfig,
    n_runs: int = 10,
    predictor: str = "tnn",
    with_inverse: bool = False,
) -> MetricReport:
    """Train and evaluate over n_runs seeds (config.seed + 0..n_runs−1).

    Each run re-splits, trains the chosen predictor on its train split,
    and scores metric MAE/R² on its own test split; the report carries
    Student-t 95% intervals over runs.  predictor is "tnn" or "knn".
    """
    if n_runs < 2:
        raise ValueError("n_runs must be at least 2")
    if predictor not in ("tnn", "knn"):
        raise ValueError(f"unknown predictor {predictor!r}; expected 'tnn' or 'knn'")
    designs, performances, model = _prepare_vectors(dataset)
    weights = loss_weights_from_pca(model)
    per_run_pairs = []
    inverse_lp: list[float] = []
    for run in range(n_runs):
        run_config = config.with_seed(config.seed + run)
        train_idx, _, test_idx = split_indices(
            len(dataset), SplitSpec(run_config.seed, run_config.split)
        )
        test_d, test_p = designs[test_idx], performances[test_idx]
        if predictor == "knn":
            index = KnnIndex(
                design_vectors=designs[train_idx],
                performance_vectors=performances[train_idx],
                sample_ids=tuple(dataset.records[i].record_id for i in train_idx),
            )
            predicted = knn_forward_batch(index, test_d)
        else:
            fwd, _ = train_forward(designs, performances, weights, run_config)
            predicted = forward_pass(fwd, test_d)
            if with_inverse:
                inv, _ = train_inverse(designs, performances, weights, fwd, run_config)
                designs_hat = forward_pass(inv, test_p)
                p_hat = forward_pass(fwd, designs_hat)
                from .tandem import loss_forward

                inverse_lp.append(
                    loss_forward(p_hat, test_p, weights, mode=run_config.loss_mode)
                )
        per_run_pairs.append(curve_metric_errors(predicted, test_p, model))
    extras = {}
    if inverse_lp:
        extras["inverse_lp_runs"] = inverse_lp
        extras["inverse_lp_mean"] = float(np.mean(inverse_lp))
    return _aggregate(per_run_pairs, predictor, extras)


@dataclass(frozen=True)
class SweepResult:
    alphas: tuple[float, ...]
    rate_mean: tuple[float, ...]
    rate_ci95: tuple[float, ...]
    rate_runs: tuple[tuple[float, ...], ...]
    monotone_nondecreasing: bool

    def as_dict(self) -> dict:
        return {
            "alphas": list(self.alphas),
            "rate_mean": list(self.rate_mean),
            "rate_ci95": list(self.rate_ci95),
            "rate_runs": [list(r) for r in self.rate_runs],
            "monotone_nondecreasing": self.monotone_nondecreasing,
        }


def printability_sweep(
    dataset: Dataset,
    config: TrainConfig,
    alphas: tuple[float, ...] = (0.0, 0.01, 0.1, 1.0),
    n_runs: int = 3,
) -> SweepResult:
    """Printable-output percentage of the inverse network per alpha.

    For each run seed, one forward network is trained and shared across
    alphas; each alpha's inverse network then generates designs for the
    run's test-set performance targets, which are decoded and checked
    for printability.  Whether rates rise with alpha is reported as a
    soft flag, never asserted.
    """
    if not alphas:
        raise ValueError("alphas must be non-empty")
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    designs, performances, model = _prepare_vectors(dataset)
    weights = loss_weights_from_pca(model)
    rates = np.empty((len(alphas), n_runs))
    for run in range(n_runs):
        run_config = config.with_seed(config.seed + run)
        _, _, test_idx = split_indices(
            len(dataset), SplitSpec(run_config.seed, run_config.split)
        )
        test_p = performances[test_idx]
        fwd, _ = train_forward(designs, performances, weights, run_config)
        for a, alpha in enumerate(alphas):
            alpha_config = run_config.with_alpha(alpha)
            inv, _ = train_inverse(designs, performances, weights, fwd, alpha_config)
            generated = forward_pass(inv, test_p)
            printable = [
                check_printability(decode_design(vec)).printable for vec in generated
            ]
            rates[a, run] = 100.0 * float(np.mean(printable))
    means = tuple(float(np.mean(rates[a])) for a in range(len(alphas)))
    order = np.argsort(alphas)
    sorted_means = [means[i] for i in order]
    return SweepResult(
        alphas=tuple(float(a) for a in alphas),
        rate_mean=means,
        rate_ci95=tuple(ci95(rates[a]) for a in range(len(alphas))),
        rate_runs=tuple(tuple(float(v) for v in rates[a]) for a in range(len(alphas))),
        monotone_nondecreasing=bool(np.all(np.diff(sorted_means) >= 0.0)),
    )
