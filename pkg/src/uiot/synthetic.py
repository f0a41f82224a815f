"""Synthetic clustered datasets for studies and benchmarks.

Each app is a Gaussian bump on the unit hypersphere: a random unit
center plus isotropic noise, re-normalized. Apps sharing a name reuse
one center, which mimics two releases of the same product.
"""
from __future__ import annotations

import numpy as np

from .dataset import Dataset, make_screen_set

DEFAULT_CATEGORIES = ("finance", "travel", "music", "social", "fitness")


def sphere_cluster(center: np.ndarray, count: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    noise = rng.normal(scale=sigma, size=(count, center.size))
    points = center[None, :] + noise
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def random_unit(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def make_clustered_dataset(
    n_names: int,
    per_app: int,
    dim: int,
    sigma: float = 0.05,
    seed: int = 0,
    versions_per_name: int = 1,
    categories: tuple[str, ...] = DEFAULT_CATEGORIES,
) -> Dataset:
    """n_names distinct app names, each with versions_per_name releases
    drawn from one cluster center."""
    rng = np.random.default_rng(seed)
    apps = []
    for name_idx in range(n_names):
        center = random_unit(dim, rng)
        name = f"app{name_idx:03d}"
        category = categories[name_idx % len(categories)]
        for version in range(versions_per_name):
            vectors = sphere_cluster(center, per_app, sigma, rng)
            apps.append(
                make_screen_set(
                    f"{name}-v{version}",
                    vectors,
                    name=name,
                    platform=("ios", "android")[version % 2],
                    category=category,
                    snapshot_date=f"2022-0{version + 1}-01",
                )
            )
    return Dataset(apps, embedding_dim=dim, category_vocabulary=sorted(set(categories)))
