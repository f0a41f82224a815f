"""Vector normalization, cosine distance, and pairwise cost matrices.

All higher layers assume unit-norm vectors, so the cosine distance
reduces to ``1 - dot`` and a full cost matrix is a single matrix
product. Arithmetic is float64 throughout; float32 storage is promoted
on entry.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, EmptySet, ZeroVector

UNIT_NORM_ATOL = 1e-6


def normalize(v: np.ndarray) -> np.ndarray:
    """Scale ``v`` to unit Euclidean norm.

    Raises ZeroVector for an all-zero input, which signals a corrupt
    embedding upstream rather than a recoverable condition.
    """
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(f"expected a 1-d vector, got shape {arr.shape}")
    # pre-scale by the largest magnitude so denormal or huge entries do
    # not under/overflow the squared norm
    peak = float(np.abs(arr).max())
    if peak == 0.0:
        raise ZeroVector("cannot normalize an all-zero vector")
    scaled = arr / peak
    return scaled / float(np.linalg.norm(scaled))


def normalize_rows(block: np.ndarray) -> np.ndarray:
    """Row-wise unit normalization of an (n, d) embedding block."""
    arr = np.asarray(block, dtype=np.float64)
    if arr.ndim != 2 or 0 in arr.shape:
        raise DimensionMismatch(f"expected a non-empty (n, d) block, got shape {arr.shape}")
    peaks = np.abs(arr).max(axis=1)
    zero = np.flatnonzero(peaks == 0.0)
    if zero.size:
        raise ZeroVector(f"row {int(zero[0])} is an all-zero vector")
    scaled = arr / peaks[:, None]
    return scaled / np.linalg.norm(scaled, axis=1)[:, None]


def is_unit(v: np.ndarray, atol: float = UNIT_NORM_ATOL) -> bool:
    return abs(float(np.linalg.norm(np.asarray(v, dtype=np.float64))) - 1.0) <= atol


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - dot(a, b) for unit-norm vectors; symmetric, in [0, 2]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector dims differ: {a.shape} vs {b.shape}")
    return float(1.0 - a @ b)


def pairwise_cost(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cosine-distance cost matrix between two unit-norm blocks.

    a: (n_a, d), b: (n_b, d) -> (n_a, n_b) with entries in [0, 2].
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise EmptySet("cost matrix requires non-empty vector sets")
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"embedding dims differ: {a.shape[1]} vs {b.shape[1]}")
    cost = 1.0 - a @ b.T
    # fp noise can push exact matches to ~-1e-16; costs are defined on [0, 2]
    np.clip(cost, 0.0, 2.0, out=cost)
    return cost
