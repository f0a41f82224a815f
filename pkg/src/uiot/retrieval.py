"""Screenshot kNN, app-to-app ranking, and zero-shot classification.

All scans are exact: at the target scale (~1e5 vectors) a matrix
product beats any index. App ranking reuses the transport cache so the
matching plan behind every hit stays retrievable without recomputation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .dataset import Dataset, ScreenSet
from .errors import (
    BadTemplate,
    DimensionMismatch,
    EmptyDataset,
    UnknownCategory,
)
from .geometry import normalize
from .transport import OtResult, PlanCache, SolverConfig, app_distance
from .uieb import read_embeddings, write_embeddings


@dataclass
class RetrievalHit:
    target_id: str
    score: float
    kind: str  # cosineDistance | otDistance
    ot: OtResult | None = None

    def to_json_dict(self) -> dict:
        return {"targetId": self.target_id, "score": self.score, "kind": self.kind}


@dataclass
class RetrievalResult:
    query_id: str
    hits: list[RetrievalHit]
    k: int

    def to_json_dict(self) -> dict:
        return {
            "queryId": self.query_id,
            "k": self.k,
            "hits": [h.to_json_dict() for h in self.hits],
        }


def nearest_screenshots(
    query: np.ndarray,
    dataset: Dataset,
    k: int,
    exclude_ids: set[str] | None = None,
    query_id: str = "query",
) -> RetrievalResult:
    """Exact k smallest cosine distances over every screenshot.

    Ties break on (distance, global screenshot id). exclude_ids drops
    the query itself when it lives in the same dataset.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    matrix = dataset.screenshot_matrix
    if matrix.shape[0] == 0:
        raise EmptyDataset("no screenshots to search")
    q = normalize(query)
    if q.size != matrix.shape[1]:
        raise DimensionMismatch(f"query dim {q.size} != dataset dim {matrix.shape[1]}")
    scores = 1.0 - matrix @ q
    ids = dataset.screenshot_global_ids
    ranked = sorted(
        (
            (float(scores[i]), ids[i])
            for i in range(len(ids))
            if not exclude_ids or ids[i] not in exclude_ids
        ),
    )
    hits = [
        RetrievalHit(target_id=gid, score=score, kind="cosineDistance")
        for score, gid in ranked[:k]
    ]
    return RetrievalResult(query_id=query_id, hits=hits, k=k)


def rank_apps(
    query_app: ScreenSet,
    dataset: Dataset,
    k: int,
    config: SolverConfig | None = None,
    cache: PlanCache | None = None,
) -> RetrievalResult:
    """Apps ranked by transport distance to the query app.

    The query's own id is excluded; same-name other versions are
    deliberately kept in (their closeness is a signal, not a leak).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    targets = [app for app in dataset.apps() if app.id != query_app.id]
    if not targets:
        raise EmptyDataset("dataset has no other apps to rank")
    scored: list[tuple[float, str, OtResult]] = []
    for target in targets:
        result = app_distance(query_app, target, config=config, cache=cache)
        scored.append((result.distance, target.id, result))
    scored.sort(key=lambda item: (item[0], item[1]))
    hits = [
        RetrievalHit(target_id=app_id, score=dist, kind="otDistance", ot=result)
        for dist, app_id, result in scored[:k]
    ]
    return RetrievalResult(query_id=query_app.id, hits=hits, k=k)


@dataclass
class LabelEmbeddingSet:
    """Prompt-ensembled unit vector per category label."""

    labels: list[str]
    templates: list[str]
    vectors: np.ndarray  # (len(labels), d), unit rows

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def save(self, prefix: str | Path) -> tuple[Path, Path]:
        """Write vectors as a UIEB block plus a sidecar naming rows."""
        prefix = Path(prefix)
        block = prefix.with_suffix(".uieb")
        sidecar = prefix.with_suffix(".labels.json")
        write_embeddings(block, self.vectors.astype(np.float32))
        sidecar.write_text(
            json.dumps({"labels": self.labels, "templates": self.templates}, indent=2)
        )
        return block, sidecar

    @classmethod
    def load(cls, prefix: str | Path) -> "LabelEmbeddingSet":
        prefix = Path(prefix)
        meta = json.loads(prefix.with_suffix(".labels.json").read_text())
        vectors = read_embeddings(prefix.with_suffix(".uieb")).astype(np.float64)
        return cls(labels=meta["labels"], templates=meta["templates"], vectors=vectors)


def default_templates() -> list[str]:
    payload = resources.files("uiot.data").joinpath("ui_prompts.json").read_text()
    return json.loads(payload)["templates"]


def build_label_embeddings(
    labels: list[str],
    templates: list[str],
    text_encoder,
) -> LabelEmbeddingSet:
    """Encode every filled template per label, average the unit prompt
    vectors, and re-normalize the mean."""
    if len(set(labels)) != len(labels):
        raise BadTemplate("labels must be distinct")
    for template in templates:
        if template.count("{category}") != 1:
            raise BadTemplate(
                f"template {template!r} must contain '{{category}}' exactly once"
            )
    if not labels or not templates:
        raise BadTemplate("need at least one label and one template")
    rows = []
    for label in labels:
        prompts = [t.format(category=label) for t in templates]
        encoded = np.vstack([normalize(text_encoder.encode_text(p)) for p in prompts])
        rows.append(normalize(encoded.mean(axis=0)))
    return LabelEmbeddingSet(labels=list(labels), templates=list(templates), vectors=np.vstack(rows))


def classify(query: np.ndarray, label_set: LabelEmbeddingSet, k: int) -> list[tuple[str, float]]:
    """Top-k labels by descending cosine similarity; ties break on the
    label string, so the ordering is reproducible."""
    q = normalize(query)
    if q.size != label_set.dim:
        raise DimensionMismatch(f"query dim {q.size} != label dim {label_set.dim}")
    sims = label_set.vectors @ q
    order = sorted(range(len(label_set.labels)), key=lambda i: (-sims[i], label_set.labels[i]))
    return [(label_set.labels[i], float(sims[i])) for i in order[: max(k, 0)]]


@dataclass
class AccuracyReport:
    accuracy: dict[int, float]
    random_baseline: dict[int, float]
    screenshots: int
    confusion: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "screenshots": self.screenshots,
            "accuracy": {str(k): v for k, v in self.accuracy.items()},
            "randomBaseline": {str(k): v for k, v in self.random_baseline.items()},
            "confusion": self.confusion,
        }


def classification_accuracy(
    dataset: Dataset,
    label_set: LabelEmbeddingSet,
    ks: tuple[int, ...] = (1, 5),
) -> AccuracyReport:
    """Fraction of screenshots whose app category lands in the top-k.

    Also reports the k/|labels| chance baseline and a top-1 confusion
    table keyed by true category.
    """
    label_index = {label: i for i, label in enumerate(label_set.labels)}
    for app in dataset.apps():
        if app.category not in label_index:
            raise UnknownCategory(f"app {app.id!r} category {app.category!r} has no label vector")

    sims = dataset.screenshot_matrix @ label_set.vectors.T  # (n_shots, n_labels)
    # rank labels per screenshot exactly like classify(): descending sim,
    # ties by label string — permute columns into label order, then a
    # stable sort keeps that order on ties
    by_name = np.array([label_set.labels.index(l) for l in sorted(label_set.labels)])
    order = by_name[np.argsort(-sims[:, by_name], axis=1, kind="stable")]

    true_idx = []
    for app in dataset.apps():
        true_idx.extend([label_index[app.category]] * app.n)
    true_idx = np.asarray(true_idx)

    n = sims.shape[0]
    accuracy: dict[int, float] = {}
    baseline: dict[int, float] = {}
    for k in ks:
        kk = min(k, len(label_set.labels))
        topk = order[:, :kk]
        hits = (topk == true_idx[:, None]).any(axis=1)
        accuracy[k] = float(hits.mean())
        baseline[k] = kk / len(label_set.labels)

    confusion: dict[str, dict[str, int]] = {}
    top1 = order[:, 0]
    for t, p in zip(true_idx, top1):
        row = confusion.setdefault(label_set.labels[int(t)], {})
        predicted = label_set.labels[int(p)]
        row[predicted] = row.get(predicted, 0) + 1
    return AccuracyReport(
        accuracy=accuracy, random_baseline=baseline, screenshots=n, confusion=confusion
    )
