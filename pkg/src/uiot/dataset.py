"""Dataset ingest, validation, and the immutable snapshot served to queries.

A dataset is a JSON manifest referencing one UIEB embedding block per
app, or a JSONL file with one screenshot object per line for small
fixtures. Vectors are stored as produced by the encoder and unit-
normalized once at load; every later stage assumes unit norm.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateAppId,
    EmptyDataset,
    ManifestParseError,
    UnknownAppId,
    UnknownScreenshotId,
)
from .geometry import normalize_rows
from .transport import uniform_marginal, validate_marginal
from .uieb import read_embeddings

PLATFORMS = ("ios", "android", "other")
MANIFEST_VERSION = 1


@dataclass(frozen=True)
class Screenshot:
    screenshot_id: str
    image_path: str | None = None


@dataclass
class ScreenSet:
    """One app: identity metadata plus its screenshot embedding block."""

    id: str
    name: str
    platform: str
    category: str
    snapshot_date: str
    screenshots: tuple[Screenshot, ...]
    vectors: np.ndarray  # (n, d) float64, unit rows, read-only
    marginal: np.ndarray  # (n,) simplex masses, read-only

    @property
    def n(self) -> int:
        return len(self.screenshots)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def screenshot_ids(self) -> list[str]:
        return [s.screenshot_id for s in self.screenshots]

    def index_of(self, screenshot_id: str) -> int:
        for idx, s in enumerate(self.screenshots):
            if s.screenshot_id == screenshot_id:
                return idx
        raise UnknownScreenshotId(f"screenshot {screenshot_id!r} not in app {self.id!r}")

    def descriptor(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "platform": self.platform,
            "category": self.category,
            "snapshotDate": self.snapshot_date,
            "screenshotCount": self.n,
        }


def make_screen_set(
    app_id: str,
    raw_vectors: np.ndarray,
    screenshot_ids: list[str] | None = None,
    name: str | None = None,
    platform: str = "other",
    category: str = "",
    snapshot_date: str = "",
    image_paths: list[str | None] | None = None,
    marginal=None,
) -> ScreenSet:
    """Build a validated, immutable ScreenSet from raw encoder output."""
    vectors = normalize_rows(raw_vectors)
    n = vectors.shape[0]
    if screenshot_ids is None:
        screenshot_ids = [f"s{idx:04d}" for idx in range(n)]
    if len(screenshot_ids) != n:
        raise ManifestParseError(
            f"app {app_id!r}: {len(screenshot_ids)} screenshot ids for {n} vectors"
        )
    if len(set(screenshot_ids)) != n:
        raise ManifestParseError(f"app {app_id!r}: duplicate screenshot ids")
    if image_paths is None:
        image_paths = [None] * n
    shots = tuple(
        Screenshot(screenshot_id=sid, image_path=p)
        for sid, p in zip(screenshot_ids, image_paths)
    )
    masses = uniform_marginal(n) if marginal is None else validate_marginal(marginal, f"app {app_id!r} marginal")
    if masses.size != n:
        raise DimensionMismatch(f"app {app_id!r}: marginal length {masses.size} != {n} screenshots")
    vectors.setflags(write=False)
    masses.setflags(write=False)
    return ScreenSet(
        id=app_id,
        name=name if name is not None else app_id,
        platform=platform,
        category=category,
        snapshot_date=snapshot_date,
        screenshots=shots,
        vectors=vectors,
        marginal=masses,
    )


class Dataset:
    """Immutable snapshot of all ingested apps, shared by all readers."""

    def __init__(self, apps: list[ScreenSet], embedding_dim: int, category_vocabulary: list[str]):
        if not apps:
            raise EmptyDataset("dataset holds no apps")
        self.embedding_dim = embedding_dim
        self.category_vocabulary = list(category_vocabulary)
        self._apps: dict[str, ScreenSet] = {}
        for app in apps:
            if app.id in self._apps:
                raise DuplicateAppId(f"app id {app.id!r} appears twice")
            if app.dim != embedding_dim:
                raise DimensionMismatch(
                    f"app {app.id!r} has dim {app.dim}, dataset dim is {embedding_dim}"
                )
            self._apps[app.id] = app
        self.fingerprint = self._fingerprint()
        # flat screenshot view for dataset-wide scans
        self._matrix = np.vstack([a.vectors for a in self.apps()])
        self._matrix.setflags(write=False)
        self._global_ids: list[str] = []
        self._owners: list[tuple[str, str]] = []
        for app in self.apps():
            for s in app.screenshots:
                self._global_ids.append(f"{app.id}/{s.screenshot_id}")
                self._owners.append((app.id, s.screenshot_id))

    def _fingerprint(self) -> str:
        h = hashlib.sha256()
        for app_id in sorted(self._apps):
            app = self._apps[app_id]
            meta = "\x1f".join(
                [app.id, app.name, app.platform, app.category, app.snapshot_date]
                + app.screenshot_ids
            )
            h.update(meta.encode())
            h.update(np.ascontiguousarray(app.vectors, dtype=np.float64).tobytes())
            h.update(np.ascontiguousarray(app.marginal, dtype=np.float64).tobytes())
        return h.hexdigest()

    def apps(self) -> list[ScreenSet]:
        return list(self._apps.values())

    def app_ids(self) -> list[str]:
        return list(self._apps.keys())

    def app(self, app_id: str) -> ScreenSet:
        try:
            return self._apps[app_id]
        except KeyError:
            raise UnknownAppId(f"no app with id {app_id!r}") from None

    def __contains__(self, app_id: str) -> bool:
        return app_id in self._apps

    def __len__(self) -> int:
        return len(self._apps)

    @property
    def screenshot_matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def screenshot_global_ids(self) -> list[str]:
        return list(self._global_ids)

    def resolve_global_id(self, global_id: str) -> tuple[ScreenSet, int]:
        """Split "appId/screenshotId" and return the owning app and row."""
        app_id, sep, sid = global_id.partition("/")
        if not sep:
            raise UnknownScreenshotId(f"{global_id!r} is not an appId/screenshotId reference")
        app = self.app(app_id)
        return app, app.index_of(sid)

    def vector_for(self, global_id: str) -> np.ndarray:
        app, idx = self.resolve_global_id(global_id)
        return app.vectors[idx]

    def counts(self) -> dict:
        histogram: dict[str, int] = {}
        for app in self.apps():
            histogram[app.category] = histogram.get(app.category, 0) + 1
        return {
            "apps": len(self._apps),
            "screenshots": int(self._matrix.shape[0]),
            "embeddingDim": self.embedding_dim,
            "categoryHistogram": dict(sorted(histogram.items())),
        }


def _require(obj: dict, key: str, ctx: str):
    if key not in obj:
        raise ManifestParseError(f"{ctx}: missing required field {key!r}")
    return obj[key]


def _load_manifest(path: Path) -> Dataset:
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestParseError(f"cannot parse manifest {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ManifestParseError(f"{path}: manifest root must be an object")

    dim = int(_require(raw, "embeddingDim", str(path)))
    vocabulary = list(_require(raw, "categoryVocabulary", str(path)))
    entries = _require(raw, "apps", str(path))
    if not entries:
        raise EmptyDataset(f"{path}: manifest lists no apps")

    base = path.parent
    apps: list[ScreenSet] = []
    seen: set[str] = set()
    for entry in entries:
        app_id = str(_require(entry, "id", str(path)))
        ctx = f"{path}: app {app_id!r}"
        if app_id in seen:
            raise DuplicateAppId(f"{ctx} appears twice in the manifest")
        seen.add(app_id)
        platform = str(entry.get("platform", "other")).lower()
        if platform not in PLATFORMS:
            raise ManifestParseError(f"{ctx}: platform must be one of {PLATFORMS}")
        category = str(_require(entry, "category", ctx))
        if category not in vocabulary:
            raise ManifestParseError(f"{ctx}: category {category!r} not in categoryVocabulary")
        shots = _require(entry, "screenshots", ctx)
        if not shots:
            raise ManifestParseError(f"{ctx}: needs at least one screenshot")
        block_path = base / str(_require(entry, "embeddingFile", ctx))
        block = read_embeddings(block_path)
        if block.shape[0] != len(shots):
            raise DimensionMismatch(
                f"{ctx}: embedding file has {block.shape[0]} rows, manifest lists {len(shots)} screenshots"
            )
        if block.shape[1] != dim:
            raise DimensionMismatch(
                f"{ctx}: embedding file dim {block.shape[1]} != manifest embeddingDim {dim}"
            )
        apps.append(
            make_screen_set(
                app_id,
                block,
                screenshot_ids=[str(_require(s, "screenshotId", ctx)) for s in shots],
                name=str(_require(entry, "name", ctx)),
                platform=platform,
                category=category,
                snapshot_date=str(entry.get("snapshotDate", "")),
                image_paths=[s.get("imagePath") for s in shots],
                marginal=entry.get("marginal"),
            )
        )
    return Dataset(apps, embedding_dim=dim, category_vocabulary=vocabulary)


def _load_jsonl(path: Path) -> Dataset:
    groups: dict[str, dict] = {}
    dim: int | None = None
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ManifestParseError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestParseError(f"{path}:{lineno}: {exc}") from exc
        ctx = f"{path}:{lineno}"
        app_id = str(_require(obj, "appId", ctx))
        vector = np.asarray(_require(obj, "vector", ctx), dtype=np.float64)
        if dim is None:
            dim = int(vector.size)
        elif vector.size != dim:
            raise DimensionMismatch(f"{ctx}: vector dim {vector.size} != {dim}")
        group = groups.setdefault(
            app_id,
            {
                "ids": [],
                "vectors": [],
                "name": obj.get("name", app_id),
                "platform": str(obj.get("platform", "other")).lower(),
                "category": str(obj.get("category", "")),
                "snapshotDate": str(obj.get("snapshotDate", "")),
            },
        )
        sid = str(_require(obj, "screenshotId", ctx))
        group["ids"].append(sid)
        group["vectors"].append(vector)
    if not groups:
        raise EmptyDataset(f"{path}: no screenshot records")
    apps = [
        make_screen_set(
            app_id,
            np.vstack(g["vectors"]),
            screenshot_ids=g["ids"],
            name=g["name"],
            platform=g["platform"] if g["platform"] in PLATFORMS else "other",
            category=g["category"],
            snapshot_date=g["snapshotDate"],
        )
        for app_id, g in groups.items()
    ]
    vocabulary = sorted({a.category for a in apps})
    return Dataset(apps, embedding_dim=int(dim), category_vocabulary=vocabulary)


def ingest(manifest_path: str | Path) -> Dataset:
    """Load and validate a dataset; returns the immutable snapshot.

    JSON manifests are canonical; .jsonl files are accepted for small
    inline datasets.
    """
    path = Path(manifest_path)
    if path.suffix == ".jsonl":
        return _load_jsonl(path)
    return _load_manifest(path)


def write_manifest(
    directory: str | Path,
    dataset_like: list[dict],
    embedding_dim: int,
    category_vocabulary: list[str],
    manifest_name: str = "manifest.json",
) -> Path:
    """Write a manifest plus one UIEB block per app entry.

    Each entry: {id, name, platform, category, snapshotDate,
    screenshotIds, vectors} with vectors as an (n, d) array. Mostly a
    fixture/export helper; ingest() is the read path.
    """
    from .uieb import write_embeddings

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    apps_json = []
    for entry in dataset_like:
        app_id = entry["id"]
        block_name = f"{app_id}.uieb"
        write_embeddings(directory / block_name, np.asarray(entry["vectors"], dtype=np.float32))
        apps_json.append(
            {
                "id": app_id,
                "name": entry.get("name", app_id),
                "platform": entry.get("platform", "other"),
                "category": entry["category"],
                "snapshotDate": entry.get("snapshotDate", ""),
                "screenshots": [
                    {"screenshotId": sid} for sid in entry["screenshotIds"]
                ],
                "embeddingFile": block_name,
            }
        )
    manifest = {
        "version": MANIFEST_VERSION,
        "embeddingDim": embedding_dim,
        "categoryVocabulary": category_vocabulary,
        "apps": apps_json,
    }
    out = directory / manifest_name
    out.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return out
