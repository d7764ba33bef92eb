"""Command-line entry point covering the full pipeline.

Conventions: machine-readable JSON goes to stdout (opt in with
``--json``), logs go to stderr, and exit codes are 0 on success, 1 on
validation errors (bad flags, unreadable or invalid inputs), and 2 on
runtime failures.  Every random draw flows from ``--seed``, so a fixed
seed reproduces byte-identical JSON output.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

from .applications import ImpactSpec, emulate_material, optimize_impact
from .curves import metrics as curve_metrics
from .curves import read_curve_csv, resample
from .dataset import (
    Bundle,
    filter_materials,
    ingest,
    load_bundle,
    load_dataset,
    resample_all,
    save_bundle,
    save_dataset,
)
from .evaluation import printability_sweep, repeated_runs
from .geometry import GcsDesign, GeometryError, build_mesh, check_printability, export_stl
from .pca import fit as fit_pca
from .tandem import TrainConfig, forward_pass, loss_weights_from_pca, train_forward, train_inverse
from .vectorize import decode_design, decode_performance, encode_design, encode_performance

__all__ = ["main", "run"]

log = logging.getLogger("gcskit")

BUNDLE_DIR_ENV = "GCSKIT_BUNDLE_DIR"
_TRAIN_FIELDS = {f.name for f in dataclass_fields(TrainConfig)}


class _Parser(argparse.ArgumentParser):
    """argparse with validation failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _curve_payload(curve) -> dict:
    return {
        "displacements": [float(v) for v in curve.displacements],
        "forces": [float(v) for v in curve.forces],
    }


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(human)


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: config file must hold a JSON object")
    unknown = set(doc) - _TRAIN_FIELDS - {"bundle_dir"}
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
    return doc


def _train_config(args, config_file: dict) -> TrainConfig:
    overrides = {k: v for k, v in config_file.items() if k in _TRAIN_FIELDS}
    if "split" in overrides:
        overrides["split"] = tuple(overrides["split"])
    flag_map = {
        "seed": args.seed,
        "learning_rate": getattr(args, "lr", None),
        "weight_decay": getattr(args, "weight_decay", None),
        "batch_size": getattr(args, "batch_size", None),
        "max_epochs": getattr(args, "epochs", None),
        "patience": getattr(args, "patience", None),
        "alpha": getattr(args, "alpha", None),
        "loss_mode": getattr(args, "loss_mode", None),
        "decay_mode": getattr(args, "decay_mode", None),
    }
    overrides.update({k: v for k, v in flag_map.items() if v is not None})
    return TrainConfig(**overrides)


def _bundle_dir(args, config_file: dict) -> Path:
    if getattr(args, "bundle", None):
        return Path(args.bundle)
    if config_file.get("bundle_dir"):
        return Path(config_file["bundle_dir"])
    return Path(os.environ.get(BUNDLE_DIR_ENV, "bundle"))


def _load_design(value: str) -> GcsDesign:
    text = value
    if not value.lstrip().startswith("{"):
        with open(value, "r", encoding="utf-8") as fh:
            text = fh.read()
    design = GcsDesign.from_dict(json.loads(text))
    design.validate()
    return design


def _dataset_vectors(data_dir):
    dataset = load_dataset(data_dir)
    from .dataset import encode_designs

    designs = encode_designs(dataset)
    forces, max_disps = resample_all(dataset)
    return dataset, designs, forces, max_disps


# ---------------------------------------------------------------- commands


def _cmd_ingest(args, config_file):
    dataset, report = ingest(args.manifest)
    if args.out:
        save_dataset(dataset, args.out)
        log.info("wrote canonical dataset to %s", args.out)
    payload = report.as_dict()
    _emit(
        args,
        payload,
        f"accepted {report.accepted} records, rejected {len(report.rejected)}; "
        f"materials: {payload['material_counts']}",
    )
    return 0


def _cmd_filter(args, config_file):
    dataset = load_dataset(args.data)
    before = dataset.material_counts()
    filtered = filter_materials(dataset, min_count=args.min_count)
    save_dataset(filtered, args.out)
    payload = {
        "before": dict(sorted(before.items())),
        "after": dict(sorted(filtered.material_counts().items())),
        "kept": len(filtered),
        "dropped": len(dataset) - len(filtered),
    }
    _emit(args, payload, f"kept {payload['kept']} records, dropped {payload['dropped']}")
    return 0


def _cmd_pca_fit(args, config_file):
    _, _, forces, max_disps = _dataset_vectors(args.data)
    model = fit_pca(forces, max_displacements=max_disps)
    bundle_dir = _bundle_dir(args, config_file)
    existing = _try_load_bundle(bundle_dir)
    bundle = Bundle(
        pca=model,
        forward=existing.forward if existing else None,
        inverses=existing.inverses if existing else {},
        metadata=existing.metadata if existing else {},
    )
    save_bundle(bundle_dir, bundle)
    payload = {
        "bundle_dir": str(bundle_dir),
        "explained_variance": [float(v) for v in model.explained_variance_fractions()],
        "warnings": list(model.warnings),
    }
    _emit(args, payload, f"fitted PCA ({len(model.eigenvalues)} components) into {bundle_dir}")
    return 0


def _try_load_bundle(directory) -> Bundle | None:
    try:
        return load_bundle(directory)
    except (ValueError, OSError):
        return None


def _cmd_train_forward(args, config_file):
    dataset, designs, forces, max_disps = _dataset_vectors(args.data)
    bundle_dir = _bundle_dir(args, config_file)
    existing = _try_load_bundle(bundle_dir)
    if existing is None:
        raise ValueError(f"no bundle at {bundle_dir}; run pca-fit first")
    from .vectorize import encode_performance_matrix

    performances = encode_performance_matrix(forces, max_disps, existing.pca)
    config = _train_config(args, config_file)
    weights = loss_weights_from_pca(existing.pca)
    log.info("training forward network on %d records (seed %d)", len(dataset), config.seed)
    net, history = train_forward(designs, performances, weights, config)
    save_bundle(bundle_dir, Bundle(existing.pca, net, existing.inverses, existing.metadata))
    payload = {
        "bundle_dir": str(bundle_dir),
        "epochs_run": history.epochs_run,
        "best_epoch": history.best_epoch,
        "best_val_loss": history.best_val_loss,
    }
    _emit(
        args,
        payload,
        f"forward net trained: best val loss {history.best_val_loss:.6g} "
        f"at epoch {history.best_epoch} ({history.epochs_run} epochs run)",
    )
    return 0


def _cmd_train_inverse(args, config_file):
    dataset, designs, forces, max_disps = _dataset_vectors(args.data)
    bundle_dir = _bundle_dir(args, config_file)
    existing = _try_load_bundle(bundle_dir)
    if existing is None:
        raise ValueError(f"no bundle at {bundle_dir}; run pca-fit first")
    fwd = existing.require_forward()
    from .vectorize import encode_performance_matrix

    performances = encode_performance_matrix(forces, max_disps, existing.pca)
    config = _train_config(args, config_file)
    weights = loss_weights_from_pca(existing.pca)
    log.info(
        "training inverse network (alpha=%g) on %d records (seed %d)",
        config.alpha,
        len(dataset),
        config.seed,
    )
    net, history = train_inverse(designs, performances, weights, fwd, config)
    inverses = dict(existing.inverses)
    inverses[float(config.alpha)] = net
    save_bundle(bundle_dir, Bundle(existing.pca, fwd, inverses, existing.metadata))
    payload = {
        "bundle_dir": str(bundle_dir),
        "alpha": config.alpha,
        "epochs_run": history.epochs_run,
        "best_epoch": history.best_epoch,
        "best_val_loss": history.best_val_loss,
    }
    _emit(
        args,
        payload,
        f"inverse net (alpha={config.alpha:g}) trained: best val loss "
        f"{history.best_val_loss:.6g} at epoch {history.best_epoch}",
    )
    return 0


def _cmd_eval(args, config_file):
    from .report import write_metric_report

    dataset = load_dataset(args.data)
    config = _train_config(args, config_file)
    report = repeated_runs(
        dataset,
        config,
        n_runs=args.runs,
        predictor=args.predictor,
        with_inverse=args.with_inverse,
    )
    paths = write_metric_report(report, args.out)
    payload = report.as_dict()
    payload["files"] = [str(p) for p in paths]
    _emit(
        args,
        payload,
        "\n".join(
            [f"{args.predictor} over {report.runs} runs:"]
            + [
                f"  {key}: MAE {st.mae_mean:.4g} ± {st.mae_ci95:.4g}, "
                f"R² {st.r2_mean if st.r2_mean is None else round(st.r2_mean, 4)}"
                for key, st in report.metrics.items()
            ]
            + [f"report files: {', '.join(str(p) for p in paths)}"]
        ),
    )
    return 0


def _cmd_sweep_alpha(args, config_file):
    from .report import write_sweep_report

    dataset = load_dataset(args.data)
    config = _train_config(args, config_file)
    alphas = tuple(float(v) for v in args.alphas.split(","))
    sweep = printability_sweep(dataset, config, alphas=alphas, n_runs=args.runs)
    paths = write_sweep_report(sweep, args.out)
    payload = sweep.as_dict()
    payload["files"] = [str(p) for p in paths]
    _emit(
        args,
        payload,
        "printability by alpha: "
        + ", ".join(
            f"{a:g}: {m:.1f}%±{c:.1f}"
            for a, m, c in zip(sweep.alphas, sweep.rate_mean, sweep.rate_ci95)
        ),
    )
    return 0


def _cmd_predict(args, config_file):
    bundle = load_bundle(_bundle_dir(args, config_file))
    design = _load_design(args.design)
    vec = encode_design(design)
    performance = forward_pass(bundle.require_forward(), vec)
    curve = decode_performance(performance, bundle.pca)
    payload = {
        "performance": [float(v) for v in performance],
        "curve": _curve_payload(curve),
        "metrics": curve_metrics(curve).as_dict(),
    }
    _emit(
        args,
        payload,
        f"predicted metrics: {json.dumps(payload['metrics'], sort_keys=True)}",
    )
    return 0


def _cmd_invert(args, config_file):
    bundle = load_bundle(_bundle_dir(args, config_file))
    inv = bundle.require_inverse(args.alpha)
    target = resample(read_curve_csv(args.curve))
    performance = encode_performance(target, bundle.pca)
    design_vec = forward_pass(inv, performance)
    design = decode_design(design_vec)
    predicted = decode_performance(forward_pass(bundle.require_forward(), design_vec), bundle.pca)
    target_m = curve_metrics(target).as_dict()
    predicted_m = curve_metrics(predicted).as_dict()
    payload = {
        "design": design.as_dict(),
        "predicted_curve": _curve_payload(predicted),
        "printability": check_printability(design).as_dict(),
        "metrics_delta": {k: predicted_m[k] - target_m[k] for k in target_m},
    }
    _emit(args, payload, f"generated design: {json.dumps(payload['design'], sort_keys=True)}")
    return 0


def _cmd_mesh(args, config_file):
    design = _load_design(args.design)
    mesh = build_mesh(design, z_slices=args.z_slices, phi_samples=args.phi_samples)
    data = export_stl(mesh)
    with open(args.stl, "wb") as fh:
        fh.write(data)
    triangles = (len(data) - 84) // 50
    payload = {"stl": str(args.stl), "triangles": triangles, "bytes": len(data)}
    _emit(args, payload, f"wrote {triangles} triangles ({len(data)} bytes) to {args.stl}")
    return 0


def _cmd_printability(args, config_file):
    design = _load_design(args.design)
    report = check_printability(design)
    _emit(
        args,
        report.as_dict(),
        f"printable: {report.printable} (base perimeter {report.base_perimeter:.3f} mm, "
        f"min axis distance {report.min_axis_distance:.4f} mm)",
    )
    return 0


def _cmd_optimize_impact(args, config_file):
    bundle = load_bundle(_bundle_dir(args, config_file))
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = ImpactSpec.from_dict(json.load(fh))
    result = optimize_impact(
        spec, bundle.require_inverse(args.alpha), bundle.require_forward(), bundle.pca
    )
    if args.stl:
        with open(args.stl, "wb") as fh:
            fh.write(export_stl(build_mesh(result.best_design)))
        log.info("wrote winning design STL to %s", args.stl)
    payload = result.as_dict()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    _emit(
        args,
        payload,
        f"feasible: {result.feasible}, E_F {result.achieved_e_f_j:.4g} J, "
        f"deficit {result.deficit_j:.4g} J, peak {result.predicted_peak_force_n:.4g} N",
    )
    return 0


def _cmd_emulate(args, config_file):
    bundle = load_bundle(_bundle_dir(args, config_file))
    target = resample(read_curve_csv(args.curve))
    design, report = emulate_material(
        target, bundle.require_inverse(args.alpha), bundle.require_forward(), bundle.pca
    )
    if args.figure:
        from .report import write_curve_comparison

        write_curve_comparison(report.target_curve, report.predicted_curve, args.figure)
        log.info("wrote comparison figure to %s", args.figure)
    payload = {"design": design.as_dict(), "report": report.as_dict()}
    _emit(
        args,
        payload,
        f"emulation deltas: {json.dumps(report.deltas, sort_keys=True)}",
    )
    return 0


def _cmd_serve(args, config_file):
    import uvicorn

    from .service import create_app

    bundle = load_bundle(_bundle_dir(args, config_file))
    app = create_app(bundle, cors_origins=args.cors.split(",") if args.cors else None)
    log.info("serving on %s:%d", args.host, args.port)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------- parser


def _add_common(parser):
    parser.add_argument("--json", action="store_true", help="emit machine-readable JSON on stdout")
    parser.add_argument("--config", help="JSON config file with training defaults")
    parser.add_argument("--seed", type=int, default=None, help="master random seed")


def _add_bundle(parser):
    parser.add_argument(
        "--bundle",
        help=f"model bundle directory (default: ${BUNDLE_DIR_ENV} or ./bundle)",
    )


def _add_train_flags(parser):
    parser.add_argument("--epochs", type=int, default=None, help="max training epochs")
    parser.add_argument("--batch-size", type=int, default=None)
    parser.add_argument("--lr", type=float, default=None, help="learning rate")
    parser.add_argument("--weight-decay", type=float, default=None)
    parser.add_argument("--patience", type=int, default=None, help="early-stopping patience")
    parser.add_argument("--loss-mode", choices=["elementwise", "dot"], default=None)
    parser.add_argument("--decay-mode", choices=["decoupled", "coupled"], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcskit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a manifest and write a canonical dataset")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", help="directory for the canonical dataset")
    _add_common(p)
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("filter", help="drop records of under-represented materials")
    p.add_argument("--data", required=True, help="canonical dataset directory")
    p.add_argument("--out", required=True)
    p.add_argument("--min-count", type=int, default=500)
    _add_common(p)
    p.set_defaults(fn=_cmd_filter)

    p = sub.add_parser("pca-fit", help="fit the curve PCA basis into the bundle")
    p.add_argument("--data", required=True)
    _add_bundle(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_pca_fit)

    p = sub.add_parser("train-forward", help="train the forward network")
    p.add_argument("--data", required=True)
    _add_bundle(p)
    _add_train_flags(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_train_forward)

    p = sub.add_parser("train-inverse", help="train an inverse network for one alpha")
    p.add_argument("--data", required=True)
    p.add_argument("--alpha", type=float, default=None, help="design-loss weight")
    _add_bundle(p)
    _add_train_flags(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_train_inverse)

    p = sub.add_parser("eval", help="repeated-split evaluation with MAE/R² tables and figures")
    p.add_argument("--data", required=True)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--predictor", choices=["tnn", "knn"], default="tnn")
    p.add_argument("--with-inverse", action="store_true", help="also train and score the inverse")
    p.add_argument("--out", default="reports", help="output directory for tables and figures")
    _add_train_flags(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("sweep-alpha", help="printability-rate sweep over alpha")
    p.add_argument("--data", required=True)
    p.add_argument("--alphas", default="0,0.01,0.1,1")
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--out", default="reports")
    _add_train_flags(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_sweep_alpha)

    p = sub.add_parser("predict", help="forward-predict the curve of a design")
    p.add_argument("--design", required=True, help="design JSON file (or inline JSON)")
    _add_bundle(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_predict)

    p = sub.add_parser("invert", help="generate a design for a target curve CSV")
    p.add_argument("--curve", required=True, help="curve CSV path")
    p.add_argument("--alpha", type=float, default=1.0)
    _add_bundle(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_invert)

    p = sub.add_parser("mesh", help="export a design as binary STL")
    p.add_argument("--design", required=True)
    p.add_argument("--stl", required=True, help="output STL path")
    p.add_argument("--z-slices", type=int, default=128)
    p.add_argument("--phi-samples", type=int, default=256)
    _add_common(p)
    p.set_defaults(fn=_cmd_mesh)

    p = sub.add_parser("printability", help="check the printability of a design")
    p.add_argument("--design", required=True)
    _add_common(p)
    p.set_defaults(fn=_cmd_printability)

    p = sub.add_parser("optimize-impact", help="search designs for an impact-absorption spec")
    p.add_argument("--spec", required=True, help="impact spec JSON file")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--stl", help="write the winning design as STL")
    p.add_argument("--out", help="write the full result JSON here")
    _add_bundle(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_optimize_impact)

    p = sub.add_parser("emulate", help="find a design emulating a measured curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--figure", help="write a target-vs-predicted comparison figure")
    _add_bundle(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_emulate)

    p = sub.add_parser("serve", help="run the HTTP inference service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--cors", help="comma-separated allowed CORS origins")
    _add_bundle(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_serve)

    return parser


def run(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config_file = _load_config_file(args.config)
        if args.seed is None:
            args.seed = int(config_file.get("seed", 0))
        return args.fn(args, config_file)
    except (ValueError, OSError, GeometryError, json.JSONDecodeError) as exc:
        print(f"gcskit: error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        print(f"gcskit: runtime failure: {exc}", file=sys.stderr)
        return 2


def main() -> int:
    return run()
