"""HTTP inference service for forward/inverse prediction and mesh export.

Every handler is a pure function of the loaded snapshot and the request
body, so replaying a request is always safe.  The snapshot (PCA model,
forward net, inverse nets) is immutable; reloads swap the whole object
atomically under a single attribute assignment.

Request validation is performed by hand rather than through response
models: invalid bodies answer 400 with field-level messages, an unknown
alpha answers 404 listing the loaded alphas, and the inference routes
answer 503 until a snapshot is loaded.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .curves import RawCurve, ResampledCurve, metrics as curve_metrics, resample
from .dataset import BUNDLE_VERSION, Bundle
from .geometry import GcsDesign, GeometryError, build_mesh, check_printability, export_stl
from .pca import SERIALIZATION_VERSION as PCA_VERSION
from .tandem import SERIALIZATION_VERSION as NET_VERSION
from .tandem import forward_pass
from .vectorize import decode_design, decode_performance, encode_design, encode_performance

__all__ = ["create_app", "swap_snapshot"]


def swap_snapshot(app: FastAPI, bundle: Bundle) -> None:
    """Atomically replace the model snapshot behind a running app.

    The bundle must be inference-complete: a forward net and at least
    one inverse net.  Requests in flight keep the snapshot they started
    with; later requests see the new one.
    """
    if bundle.forward is None:
        raise ValueError("snapshot rejected: bundle has no forward network")
    if not bundle.inverses:
        raise ValueError("snapshot rejected: bundle has no inverse networks")
    app.state.snapshot = bundle


def _error(status: int, detail: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": detail, **extra})


def _curve_payload(curve: ResampledCurve) -> dict:
    return {
        "displacements": [float(v) for v in curve.displacements],
        "forces": [float(v) for v in curve.forces],
    }


async def _body(request: Request) -> dict | JSONResponse:
    try:
        payload = await request.json()
    except Exception:
        return _error(400, "request body is not valid JSON")
    if not isinstance(payload, dict):
        return _error(400, "request body must be a JSON object")
    return payload


def _parse_design(payload: dict) -> GcsDesign | JSONResponse:
    if "design" not in payload:
        return _error(400, "design: field required")
    if not isinstance(payload["design"], dict):
        return _error(400, "design: must be a JSON object")
    try:
        design = GcsDesign.from_dict(payload["design"])
        design.validate()
    except (ValueError, TypeError) as exc:
        return _error(400, f"design: {exc}")
    return design


def _parse_curve(payload: dict) -> RawCurve | JSONResponse:
    if "curve" not in payload:
        return _error(400, "curve: field required")
    curve = payload["curve"]
    if not isinstance(curve, dict) or "displacements" not in curve or "forces" not in curve:
        return _error(400, "curve: must be an object with 'displacements' and 'forces'")
    try:
        return RawCurve(
            displacements=np.asarray(curve["displacements"], dtype=float),
            forces=np.asarray(curve["forces"], dtype=float),
        )
    except (ValueError, TypeError) as exc:
        return _error(400, f"curve: {exc}")


def create_app(bundle: Bundle | None = None, cors_origins: list[str] | None = None) -> FastAPI:
    """Build the service app, optionally preloading a snapshot."""
    app = FastAPI(title="gcskit inference service", openapi_url="/api/spec")
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )
    app.state.snapshot = None
    if bundle is not None:
        swap_snapshot(app, bundle)

    def snapshot() -> Bundle | None:
        return app.state.snapshot

    @app.get("/api/health")
    async def health():
        snap = snapshot()
        if snap is None:
            return {"status": "no-model", "metadata": {}}
        return {"status": "ok", "metadata": snap.metadata}

    @app.get("/api/models")
    async def models():
        snap = snapshot()
        if snap is None:
            return _error(503, "no model snapshot loaded")
        return {
            "alphas": snap.alphas(),
            "versions": {"bundle": BUNDLE_VERSION, "pca": PCA_VERSION, "net": NET_VERSION},
        }

    @app.post("/api/forward")
    async def forward(request: Request):
        snap = snapshot()
        if snap is None:
            return _error(503, "no model snapshot loaded")
        payload = await _body(request)
        if isinstance(payload, JSONResponse):
            return payload
        design = _parse_design(payload)
        if isinstance(design, JSONResponse):
            return design
        performance = forward_pass(snap.forward, encode_design(design))
        curve = decode_performance(performance, snap.pca)
        return {
            "performance": [float(v) for v in performance],
            "curve": _curve_payload(curve),
            "metrics": curve_metrics(curve).as_dict(),
        }

    @app.post("/api/inverse")
    async def inverse(request: Request):
        snap = snapshot()
        if snap is None:
            return _error(503, "no model snapshot loaded")
        payload = await _body(request)
        if isinstance(payload, JSONResponse):
            return payload
        raw = _parse_curve(payload)
        if isinstance(raw, JSONResponse):
            return raw
        if "alpha" not in payload:
            return _error(400, "alpha: field required")
        try:
            alpha = float(payload["alpha"])
        except (TypeError, ValueError):
            return _error(400, "alpha: must be a number")
        if alpha not in snap.inverses:
            return _error(
                404,
                f"no inverse network loaded for alpha={format(alpha, 'g')}",
                available_alphas=snap.alphas(),
            )
        target = resample(raw)
        design_vec = forward_pass(snap.inverses[alpha], encode_performance(target, snap.pca))
        design = decode_design(design_vec)
        predicted = decode_performance(forward_pass(snap.forward, design_vec), snap.pca)
        target_m = curve_metrics(target).as_dict()
        predicted_m = curve_metrics(predicted).as_dict()
        return {
            "design": design.as_dict(),
            "predicted_curve": _curve_payload(predicted),
            "printability": check_printability(design).as_dict(),
            "metrics_delta": {k: predicted_m[k] - target_m[k] for k in target_m},
        }

    @app.post("/api/mesh")
    async def mesh(request: Request):
        snap = snapshot()
        if snap is None:
            return _error(503, "no model snapshot loaded")
        payload = await _body(request)
        if isinstance(payload, JSONResponse):
            return payload
        design = _parse_design(payload)
        if isinstance(design, JSONResponse):
            return design
        try:
            data = export_stl(build_mesh(design))
        except GeometryError as exc:
            return _error(400, f"design: {exc}")
        return Response(
            content=data,
            media_type="model/stl",
            headers={"Content-Disposition": 'attachment; filename="design.stl"'},
        )

    return app
