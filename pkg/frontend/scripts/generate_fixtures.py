"""Record real service exchanges as test fixtures for the web UI.

Trains a small deterministic bundle, replays exactly the requests the
UI tests make, and writes the responses (bodies, statuses, STL bytes)
plus independently computed metric values to fixtures/fixtures.json.
Rerun after changing the service contract:

    python3 scripts/generate_fixtures.py
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

from fastapi.testclient import TestClient

from gcskit.curves import ResampledCurve, energy_before_threshold, resample, RawCurve, work
from gcskit.dataset import Bundle, encode_designs, resample_all
from gcskit.geometry import GcsDesign, build_mesh, export_stl
from gcskit.pca import fit as fit_pca
from gcskit.service import create_app
from gcskit.synthetic import synthetic_dataset
from gcskit.tandem import TrainConfig, loss_weights_from_pca, train_forward, train_inverse
from gcskit.vectorize import encode_performance_matrix

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "fixtures.json"

RAMP = {"displacements": [0.0, 20.0], "forces": [0.0, 100.0]}
POLYLINE = {"displacements": [0.0, 3.7, 11.2, 18.0], "forces": [0.0, 9.5, 6.0, 14.0]}
WHAT_IF_MASS = 3.5
EF_THRESHOLDS = [2.0, 5.0, 8.0, 10.0]


def build_bundle() -> Bundle:
    dataset = synthetic_dataset(200, seed=9)
    designs = encode_designs(dataset)
    forces, max_disps = resample_all(dataset)
    pca = fit_pca(forces, max_displacements=max_disps)
    performances = encode_performance_matrix(forces, max_disps, pca)
    weights = loss_weights_from_pca(pca)
    config = TrainConfig(weight_decay=0.0, max_epochs=40, patience=40, seed=0)
    fwd, _ = train_forward(designs, performances, weights, config)
    inverses = {
        alpha: train_inverse(designs, performances, weights, fwd, config.with_alpha(alpha))[0]
        for alpha in (0.0, 1.0)
    }
    return Bundle(pca=pca, forward=fwd, inverses=inverses, metadata={"trained_on": "synthetic-200"})


def record(client: TestClient, exchanges: list, method: str, path: str, body=None):
    response = client.request(method, path, json=body) if body is not None else client.request(method, path)
    is_stl = response.headers.get("content-type", "").startswith("model/stl")
    exchanges.append(
        {
            "method": method,
            "path": path,
            "request": body,
            "status": response.status_code,
            "response": None if is_stl else response.json(),
            "stl_base64": base64.b64encode(response.content).decode() if is_stl else None,
        }
    )
    return exchanges[-1]


def main() -> None:
    client = TestClient(create_app(build_bundle()))
    exchanges: list = []

    record(client, exchanges, "GET", "/api/health")
    record(client, exchanges, "GET", "/api/models")

    inverse = record(client, exchanges, "POST", "/api/inverse", {"curve": RAMP, "alpha": 1.0})
    design = inverse["response"]["design"]
    record(client, exchanges, "POST", "/api/forward", {"design": design})

    what_if = dict(design)
    what_if["mass"] = WHAT_IF_MASS
    record(client, exchanges, "POST", "/api/forward", {"design": what_if})

    # The UI's preview consumes server STL bytes; the service route and
    # this exporter are byte-identical code paths, so the fixture uses a
    # coarse mesh to stay small (2 * (z_slices-1) * phi_samples facets).
    stl = export_stl(build_mesh(GcsDesign.from_dict(design), z_slices=8, phi_samples=16))
    mesh_fixture = {
        "design": design,
        "z_slices": 8,
        "phi_samples": 16,
        "stl_base64": base64.b64encode(stl).decode(),
    }

    # Error paths the UI must surface.
    record(client, exchanges, "POST", "/api/inverse", {"curve": RAMP, "alpha": 0.5})
    bad = dict(design)
    bad["mass"] = 9.0
    record(client, exchanges, "POST", "/api/forward", {"design": bad})

    # Independent same-formula values for client metric parity tests.
    predicted = inverse["response"]["predicted_curve"]
    curve = ResampledCurve(
        forces=predicted["forces"], max_displacement=predicted["displacements"][-1]
    )
    ramp_resampled = resample(RawCurve.from_samples(list(zip(RAMP["displacements"], RAMP["forces"]))))
    poly_resampled = resample(
        RawCurve.from_samples(list(zip(POLYLINE["displacements"], POLYLINE["forces"])))
    )
    parity = {
        "predicted_work_j": work(curve),
        "predicted_ef_j": {str(t): energy_before_threshold(curve, t) for t in EF_THRESHOLDS},
        "ramp": {
            "raw": RAMP,
            "resampled": {
                "displacements": [float(v) for v in ramp_resampled.displacements],
                "forces": [float(v) for v in ramp_resampled.forces],
            },
            "work_j": work(ramp_resampled),
        },
        "polyline": {
            "raw": POLYLINE,
            "resampled": {
                "displacements": [float(v) for v in poly_resampled.displacements],
                "forces": [float(v) for v in poly_resampled.forces],
            },
            "work_j": work(poly_resampled),
            "ef_j": {str(t): energy_before_threshold(poly_resampled, t) for t in EF_THRESHOLDS},
        },
    }

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(
        json.dumps({"exchanges": exchanges, "mesh": mesh_fixture, "parity": parity}, indent=1)
    )
    print(f"wrote {OUT} ({OUT.stat().st_size} bytes, {len(exchanges)} exchanges)")


if __name__ == "__main__":
    main()
