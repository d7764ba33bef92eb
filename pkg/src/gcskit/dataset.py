"""On-disk dataset formats, ingestion, filtering, and model bundles.

A dataset directory holds ``manifest.json``, a designs CSV, and one
curve CSV per record.  Ingestion is adapter-based: a column-mapping
table lets foreign designs CSVs feed the same pipeline while the
canonical format stays stable.  Every input record is either accepted
or rejected with a reason; nothing is dropped silently.

A bundle directory packages a fitted PCA model, the trained forward
network, and one trained inverse network per alpha, with a format
version that is checked (never migrated) on load.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curves import RawCurve, read_curve_csv, resample, write_curve_csv
from .geometry import SCALAR_FIELDS, GcsDesign
from .pca import PcaModel
from .splits import SplitSpec, split_indices
from .tandem import Mlp, net_from_dict, net_to_dict

__all__ = [
    "DatasetRecord",
    "Dataset",
    "IngestReport",
    "SplitSpec",
    "split_indices",
    "split",
    "ingest",
    "save_dataset",
    "load_dataset",
    "filter_materials",
    "encode_designs",
    "resample_all",
    "Bundle",
    "save_bundle",
    "load_bundle",
    "BUNDLE_VERSION",
]

DESIGN_CSV_COLUMNS = (
    "id",
    "c4_base",
    "c4_top",
    "c8_base",
    "c8_top",
    "linear_twist",
    "osc_twist_amplitude",
    "osc_twist_cycles",
    "perimeter_ratio",
    "mass_g",
    "height_mm",
    "thickness_mm",
    "material",
)

#: designs-CSV column -> GcsDesign field
_COLUMN_TO_FIELD = {
    "c4_base": "c4_base",
    "c4_top": "c4_top",
    "c8_base": "c8_base",
    "c8_top": "c8_top",
    "linear_twist": "linear_twist",
    "osc_twist_amplitude": "osc_twist_amplitude",
    "osc_twist_cycles": "osc_twist_cycles",
    "perimeter_ratio": "perimeter_ratio",
    "mass_g": "mass",
    "height_mm": "height",
    "thickness_mm": "thickness",
    "material": "material",
}

BUNDLE_VERSION = 1


@dataclass(frozen=True)
class DatasetRecord:
    record_id: str
    design: GcsDesign
    curve: RawCurve


@dataclass
class Dataset:
    records: list[DatasetRecord]
    notes: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def material_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for rec in self.records:
            key = rec.design.material.value
            counts[key] = counts.get(key, 0) + 1
        return counts


@dataclass
class IngestReport:
    accepted: int = 0
    rejected: list[tuple[str, str]] = field(default_factory=list)  # (id, reason)
    material_counts: dict[str, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": [{"id": i, "reason": r} for i, r in self.rejected],
            "material_counts": dict(sorted(self.material_counts.items())),
        }


def _read_designs_csv(path: Path, column_mapping: dict | None) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: designs CSV is empty")
        mapping = dict(column_mapping or {})
        # mapping: canonical column -> actual column in this file
        missing = [
            col
            for col in DESIGN_CSV_COLUMNS
            if mapping.get(col, col) not in reader.fieldnames
        ]
        if missing:
            raise ValueError(
                f"{path}: designs CSV is missing columns: {', '.join(missing)}"
            )
        rows = []
        for row in reader:
            rows.append({col: row[mapping.get(col, col)] for col in DESIGN_CSV_COLUMNS})
        return rows


def _design_from_row(row: dict) -> GcsDesign:
    payload = {}
    for col, fieldname in _COLUMN_TO_FIELD.items():
        if fieldname == "material":
            payload[fieldname] = row[col]
        else:
            try:
                payload[fieldname] = float(row[col])
            except ValueError:
                raise ValueError(f"column {col!r}: not a number: {row[col]!r}") from None
    design = GcsDesign.from_dict(payload)
    design.validate()
    return design


def ingest(manifest_path, column_mapping: dict | None = None) -> tuple[Dataset, IngestReport]:
    """Load and validate a dataset described by a manifest JSON file.

    The manifest names a designs CSV and, per record, an id, a 0-based
    data row in that CSV, and a curve CSV path (relative paths resolve
    against the manifest's directory).  Out-of-range designs, malformed
    curves, and duplicate ids are rejected into the report.
    """
    manifest_path = Path(manifest_path)
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    base = manifest_path.parent
    mapping = manifest.get("column_mapping") or column_mapping
    designs_csv = base / manifest["designs_csv"]
    design_rows = _read_designs_csv(designs_csv, mapping)

    records: list[DatasetRecord] = []
    report = IngestReport()
    seen: set[str] = set()
    for entry in manifest["records"]:
        rec_id = str(entry["id"])
        if rec_id in seen:
            report.rejected.append((rec_id, "duplicate id"))
            continue
        try:
            row_index = int(entry["design_row"])
            if not 0 <= row_index < len(design_rows):
                raise ValueError(f"design_row {row_index} out of range")
            design = _design_from_row(design_rows[row_index])
            curve = read_curve_csv(base / entry["curve_path"])
        except (ValueError, OSError) as exc:
            report.rejected.append((rec_id, str(exc)))
            continue
        seen.add(rec_id)
        records.append(DatasetRecord(record_id=rec_id, design=design, curve=curve))
    report.accepted = len(records)
    dataset = Dataset(records=records, notes=str(manifest.get("notes", "")))
    report.material_counts = dataset.material_counts()
    return dataset, report


def save_dataset(dataset: Dataset, directory) -> None:
    """Write the canonical layout: manifest.json, designs.csv, curves/."""
    directory = Path(directory)
    (directory / "curves").mkdir(parents=True, exist_ok=True)
    with open(directory / "designs.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(DESIGN_CSV_COLUMNS) + "\n")
        for rec in dataset.records:
            d = rec.design
            values = [rec.record_id]
            values += [repr(float(getattr(d, f))) for f in SCALAR_FIELDS]
            values += [d.material.value]
            fh.write(",".join(values) + "\n")
    entries = []
    for row, rec in enumerate(dataset.records):
        curve_rel = f"curves/{rec.record_id}.csv"
        write_curve_csv(directory / curve_rel, rec.curve)
        entries.append({"id": rec.record_id, "design_row": row, "curve_path": curve_rel})
    manifest = {"designs_csv": "designs.csv", "records": entries, "notes": dataset.notes}
    with open(directory / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_dataset(directory) -> Dataset:
    dataset, report = ingest(Path(directory) / "manifest.json")
    if report.rejected:
        first = report.rejected[0]
        raise ValueError(
            f"canonical dataset contains invalid records "
            f"({len(report.rejected)} rejected; first: {first[0]}: {first[1]})"
        )
    return dataset


def filter_materials(dataset: Dataset, min_count: int = 500) -> Dataset:
    """Drop all records of materials with fewer than min_count records."""
    counts = dataset.material_counts()
    kept = [
        rec
        for rec in dataset.records
        if counts[rec.design.material.value] >= min_count
    ]
    return Dataset(records=kept, notes=dataset.notes)


def split(dataset: Dataset, spec: SplitSpec):
    """Train/val/test index sets over the dataset's record order."""
    return split_indices(len(dataset), spec)


def encode_designs(dataset: Dataset) -> np.ndarray:
    """Stack the records' normalized 17-dim design vectors."""
    from .vectorize import encode_design

    return np.stack([encode_design(rec.design) for rec in dataset.records])


def resample_all(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Resample every curve: (n, 100) force matrix and (n,) max displacements."""
    forces = np.empty((len(dataset), 100))
    max_disps = np.empty(len(dataset))
    for k, rec in enumerate(dataset.records):
        rc = resample(rec.curve)
        forces[k] = rc.forces
        max_disps[k] = rc.max_displacement
    return forces, max_disps


@dataclass(frozen=True)
class Bundle:
    """Everything inference needs: PCA model, forward net, inverse nets.

    Bundles may be partial while a pipeline is still training (no
    forward net yet, or no inverse nets); consumers that need a
    component check for it explicitly.
    """

    pca: PcaModel
    forward: Mlp | None = None
    inverses: dict[float, Mlp] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def alphas(self) -> list[float]:
        return sorted(self.inverses)

    def require_forward(self) -> Mlp:
        if self.forward is None:
            raise ValueError("bundle has no trained forward network")
        return self.forward

    def require_inverse(self, alpha: float) -> Mlp:
        if float(alpha) not in self.inverses:
            available = ", ".join(format(a, "g") for a in self.alphas()) or "none"
            raise ValueError(
                f"bundle has no inverse network for alpha={format(alpha, 'g')}; "
                f"available: {available}"
            )
        return self.inverses[float(alpha)]


def _alpha_tag(alpha: float) -> str:
    return format(float(alpha), "g")


def save_bundle(directory, bundle: Bundle) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files: dict = {"pca": "pca.json", "inverses": {}}
    with open(directory / "pca.json", "w", encoding="utf-8") as fh:
        fh.write(bundle.pca.to_json())
    if bundle.forward is not None:
        files["forward"] = "forward.json"
        with open(directory / "forward.json", "w", encoding="utf-8") as fh:
            json.dump(net_to_dict(bundle.forward), fh)
    for alpha, net in sorted(bundle.inverses.items()):
        name = f"inverse_alpha_{_alpha_tag(alpha)}.json"
        files["inverses"][_alpha_tag(alpha)] = name
        with open(directory / name, "w", encoding="utf-8") as fh:
            json.dump(net_to_dict(net), fh)
    doc = {
        "version": BUNDLE_VERSION,
        "format": "gcskit-bundle",
        "files": files,
        "metadata": bundle.metadata,
    }
    with open(directory / "bundle.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_bundle(directory) -> Bundle:
    """Load a bundle directory; raises (without partial state) on any
    version mismatch or corruption."""
    directory = Path(directory)
    try:
        with open(directory / "bundle.json", "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"unreadable bundle at {directory}: {exc}") from None
    version = doc.get("version")
    if version != BUNDLE_VERSION:
        raise ValueError(
            f"bundle version {version!r} is not supported; "
            f"this build reads version {BUNDLE_VERSION}"
        )
    files = doc["files"]
    try:
        with open(directory / files["pca"], "r", encoding="utf-8") as fh:
            pca_model = PcaModel.from_json(fh.read())
        forward = None
        if "forward" in files:
            with open(directory / files["forward"], "r", encoding="utf-8") as fh:
                forward = net_from_dict(json.load(fh))
        inverses = {}
        for tag, name in files.get("inverses", {}).items():
            with open(directory / name, "r", encoding="utf-8") as fh:
                inverses[float(tag)] = net_from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ValueError(f"corrupted bundle at {directory}: {exc}") from None
    return Bundle(
        pca=pca_model,
        forward=forward,
        inverses=inverses,
        metadata=doc.get("metadata", {}),
    )
