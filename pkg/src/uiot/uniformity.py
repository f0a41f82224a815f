"""Design-consistency scoring via the hyperspherical uniformity loss.

The score of a screenshot set is the log of the mean pairwise Gaussian
potential exp(2t*<u, v> - 2t) over all ordered pairs, diagonal
included. Identical sets score 0; the more uniformly spread the
vectors, the more negative the score. Higher values mean higher
design consistency.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import DegenerateSet, DimensionMismatch, EmptySet, NotNormalized, UnknownScreenshotId
from .geometry import normalize_rows

DEFAULT_T = 2.0
NORM_ATOL = 1e-4


@dataclass
class UniformityReport:
    lu: float
    t: float
    n: int
    set_id: str = ""
    degenerate: bool = False  # singleton sets score 0 by construction

    def to_json_dict(self) -> dict:
        out = {"setId": self.set_id, "n": self.n, "t": self.t, "lu": self.lu}
        if self.degenerate:
            out["degenerate"] = True
        return out


@dataclass
class WhatIfEdit:
    """A hypothetical edit: drop screenshots by id, add new vectors."""

    remove_ids: list[str] = field(default_factory=list)
    add_vectors: np.ndarray | None = None


@dataclass
class DeltaReport:
    lu_before: float
    lu_after: float
    delta: float

    def to_json_dict(self) -> dict:
        return {"luBefore": self.lu_before, "luAfter": self.lu_after, "delta": self.delta}


def uniformity_loss(vectors: np.ndarray, t: float = DEFAULT_T, set_id: str = "") -> UniformityReport:
    """Score a set of unit vectors; computed in log-sum-exp form.

    Raises NotNormalized when any row norm strays more than 1e-4 from 1,
    which flags vectors that skipped load-time normalization.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    v = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    n = v.shape[0]
    if n == 0:
        raise EmptySet("uniformity loss of an empty set is undefined")
    norms = np.linalg.norm(v, axis=1)
    worst = float(np.abs(norms - 1.0).max())
    if worst > NORM_ATOL:
        raise NotNormalized(f"vector norm deviates from 1 by {worst:.2e}")
    if n == 1:
        return UniformityReport(lu=0.0, t=t, n=1, set_id=set_id, degenerate=True)

    gram = v @ v.T
    # dots of unit vectors live in [-1, 1]; fp noise outside only
    np.clip(gram, -1.0, 1.0, out=gram)
    lu = float(logsumexp(2.0 * t * (gram - 1.0)) - 2.0 * np.log(n))
    return UniformityReport(lu=lu, t=t, n=n, set_id=set_id)


def delta_uniformity(base, edit: WhatIfEdit, t: float = DEFAULT_T) -> DeltaReport:
    """Uniformity change of a what-if edit: after minus before.

    Negative delta means the edit decreased design consistency. The
    edited set must keep at least two screenshots; a singleton delta
    would compare against a degenerate score.
    """
    known = {sid: idx for idx, sid in enumerate(base.screenshot_ids)}
    remove_idx = set()
    for sid in edit.remove_ids:
        if sid not in known:
            raise UnknownScreenshotId(f"screenshot {sid!r} not in app {base.id!r}")
        remove_idx.add(known[sid])

    keep = [i for i in range(base.vectors.shape[0]) if i not in remove_idx]
    parts = []
    if keep:
        parts.append(base.vectors[keep])
    if edit.add_vectors is not None and len(edit.add_vectors) > 0:
        added = np.atleast_2d(np.asarray(edit.add_vectors, dtype=np.float64))
        if added.shape[1] != base.vectors.shape[1]:
            raise DimensionMismatch(
                f"added vectors have dim {added.shape[1]}, app has {base.vectors.shape[1]}"
            )
        parts.append(normalize_rows(added))
    new_size = sum(p.shape[0] for p in parts)
    if new_size < 2:
        raise DegenerateSet(f"edit would leave {new_size} screenshot(s); at least 2 required")

    before = uniformity_loss(base.vectors, t=t, set_id=base.id)
    after = uniformity_loss(np.vstack(parts), t=t, set_id=base.id)
    return DeltaReport(lu_before=before.lu, lu_after=after.lu, delta=after.lu - before.lu)
