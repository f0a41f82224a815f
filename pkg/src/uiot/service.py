"""HTTP facade over an ingested dataset snapshot.

Every endpoint is a pure function of (snapshot, request); nothing a
client does mutates the dataset. Module errors surface as a stable
{code, message} envelope instead of stack traces.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import __version__
from .dataset import Dataset
from .errors import UiotError, UnknownCategory, UnknownStudyId, ValidationError
from .retrieval import LabelEmbeddingSet, classify, nearest_screenshots, rank_apps
from .transport import PlanCache, SolverConfig, app_distance
from .uniformity import WhatIfEdit, delta_uniformity, uniformity_loss

_STATUS_BY_CODE = {
    "UnknownAppId": 404,
    "UnknownScreenshotId": 404,
    "UnknownStudyId": 404,
    "UnknownCategory": 404,
    "EncoderUnavailable": 503,
}


class AppRetrieveRequest(BaseModel):
    queryAppId: str
    k: int = 5
    solver: str | None = None


class ScreenshotRetrieveRequest(BaseModel):
    vector: list[float] | None = None
    screenshotId: str | None = None
    k: int = 5
    excludeSelf: bool = True


class WhatIfRequest(BaseModel):
    appId: str
    removeIds: list[str] = []
    addVectors: list[list[float]] | None = None
    addHeldOutIds: list[str] | None = None
    t: float = 2.0


class ClassifyRequest(BaseModel):
    vector: list[float] | None = None
    screenshotId: str | None = None
    labelSetId: str = "default"
    k: int = 5


def _solver_config(base: SolverConfig, override: str | None) -> SolverConfig:
    if override is None or override == base.solver:
        return base
    if override not in ("auto", "exact", "sinkhorn"):
        raise ValidationError(f"solver must be auto, exact, or sinkhorn, not {override!r}")
    return SolverConfig(
        solver=override,
        epsilon=base.epsilon,
        tol=base.tol,
        max_iter=base.max_iter,
        exact_threshold=base.exact_threshold,
    )


def create_app(
    dataset: Dataset,
    label_sets: dict[str, LabelEmbeddingSet] | None = None,
    config: SolverConfig | None = None,
    cache: PlanCache | None = None,
    studies_dir: str | Path | None = None,
    static_dir: str | Path | None = None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    config = config or SolverConfig()
    cache = cache or PlanCache()
    label_sets = label_sets or {}
    studies_path = Path(studies_dir) if studies_dir else None

    app = FastAPI(title="uiot", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(UiotError)
    async def _uiot_error(_request: Request, exc: UiotError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content={"code": exc.code, "message": exc.message})

    def _resolve_query_vector(vector, screenshot_id) -> np.ndarray:
        if vector is not None:
            return np.asarray(vector, dtype=np.float64)
        if screenshot_id is not None:
            return dataset.vector_for(screenshot_id)
        raise ValidationError("request needs either a vector or a screenshotId")

    @app.get("/v1/apps")
    def list_apps() -> list[dict]:
        return [a.descriptor() for a in dataset.apps()]

    @app.get("/v1/apps/{app_id}")
    def app_detail(app_id: str) -> dict:
        screen_set = dataset.app(app_id)
        report = uniformity_loss(screen_set.vectors, set_id=app_id)
        out = screen_set.descriptor()
        out["screenshots"] = [
            {"screenshotId": s.screenshot_id, "imagePath": s.image_path}
            for s in screen_set.screenshots
        ]
        out["uniformity"] = report.to_json_dict()
        return out

    @app.post("/v1/retrieve/app")
    def retrieve_app(req: AppRetrieveRequest) -> dict:
        query = dataset.app(req.queryAppId)
        result = rank_apps(query, dataset, req.k, config=_solver_config(config, req.solver), cache=cache)
        payload = result.to_json_dict()
        for hit_json, hit in zip(payload["hits"], result.hits):
            target = dataset.app(hit.target_id)
            hit_json["app"] = target.descriptor()
        return payload

    @app.get("/v1/plan")
    def plan(query: str, target: str, topPairs: int = 20) -> dict:
        query_app = dataset.app(query)
        target_app = dataset.app(target)
        result = app_distance(query_app, target_app, config=config, cache=cache)
        payload = result.to_json_dict()
        # per-cell costs aligned with the sparse plan list, for hover UIs
        payload["costs"] = [float(result.cost[i, j]) for i, j, _ in payload["plan"]]
        payload["query"] = query
        payload["target"] = target
        payload["queryScreenshotIds"] = query_app.screenshot_ids
        payload["targetScreenshotIds"] = target_app.screenshot_ids
        payload["topPairs"] = [
            {
                "queryScreenshotId": query_app.screenshot_ids[i],
                "targetScreenshotId": target_app.screenshot_ids[j],
                "row": i,
                "col": j,
                "mass": mass,
                "cost": cost,
            }
            for i, j, mass, cost in result.top_pairs(topPairs)
        ]
        return payload

    @app.post("/v1/retrieve/screenshot")
    def retrieve_screenshot(req: ScreenshotRetrieveRequest) -> dict:
        vector = _resolve_query_vector(req.vector, req.screenshotId)
        exclude = {req.screenshotId} if (req.screenshotId and req.excludeSelf) else None
        result = nearest_screenshots(
            vector,
            dataset,
            req.k,
            exclude_ids=exclude,
            query_id=req.screenshotId or "vector",
        )
        return result.to_json_dict()

    @app.post("/v1/consistency/whatif")
    def whatif(req: WhatIfRequest) -> dict:
        screen_set = dataset.app(req.appId)
        add_rows: list[np.ndarray] = []
        if req.addVectors:
            add_rows.extend(np.asarray(v, dtype=np.float64) for v in req.addVectors)
        if req.addHeldOutIds:
            # re-add existing screenshots of this app by id
            for sid in req.addHeldOutIds:
                add_rows.append(screen_set.vectors[screen_set.index_of(sid)])
        edit = WhatIfEdit(
            remove_ids=list(req.removeIds),
            add_vectors=np.vstack(add_rows) if add_rows else None,
        )
        report = delta_uniformity(screen_set, edit, t=req.t)
        return report.to_json_dict()

    @app.post("/v1/classify")
    def classify_endpoint(req: ClassifyRequest) -> dict:
        if req.labelSetId not in label_sets:
            raise UnknownCategory(f"no label set {req.labelSetId!r} is loaded")
        vector = _resolve_query_vector(req.vector, req.screenshotId)
        ranked = classify(vector, label_sets[req.labelSetId], req.k)
        return {
            "labelSetId": req.labelSetId,
            "labels": [{"label": label, "similarity": sim} for label, sim in ranked],
        }

    @app.get("/v1/studies/{study_id}")
    def study(study_id: str) -> Any:
        if studies_path is None:
            raise UnknownStudyId("no studies directory configured")
        target = (studies_path / f"{study_id}.json").resolve()
        if studies_path.resolve() not in target.parents or not target.exists():
            raise UnknownStudyId(f"no study artifact named {study_id!r}")
        return json.loads(target.read_text())

    @app.get("/v1/healthz")
    def healthz() -> dict:
        return {
            "version": __version__,
            "datasetFingerprint": dataset.fingerprint,
            "counts": dataset.counts(),
            "labelSets": sorted(label_sets.keys()),
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
