"""Dataset-scale analysis protocols: pairwise distance sweeps with
grouping statistics, and the two uniformity-change studies.

Every study is a pure function of (dataset, seed, config). Randomness
flows through per-app streams derived from (seed, app id), so results
do not depend on execution order or worker count.
"""
from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import EmptyStudy, IncompleteTable, UiotError
from .stats import MannWhitneyResult, TTestResult, mann_whitney_u, summarize, welch_ttest
from .transport import SolverConfig, app_distance
from .uniformity import uniformity_loss

GROUP_CRITERIA = ("name", "category", "platform")


# ---------------------------------------------------------------------------
# pairwise sweep


@dataclass
class PairRow:
    id_a: str
    id_b: str
    distance: float
    solver: str
    converged: bool
    error: str = ""

    def as_csv(self) -> list[str]:
        return [
            self.id_a,
            self.id_b,
            repr(self.distance) if not self.error else "",
            self.solver,
            "1" if self.converged else "0",
            self.error,
        ]


SWEEP_HEADER = ["idA", "idB", "distance", "solver", "converged", "error"]


def canonical_pairs(dataset: Dataset) -> list[tuple[str, str]]:
    ids = sorted(dataset.app_ids())
    return list(combinations(ids, 2))


def _journal_path(out_csv: Path) -> Path:
    return out_csv.with_suffix(out_csv.suffix + ".journal")


def _read_journal(path: Path) -> dict[tuple[str, str], PairRow]:
    done: dict[tuple[str, str], PairRow] = {}
    if not path.exists():
        return done
    with open(path, newline="") as fh:
        for record in csv.reader(fh):
            if len(record) != len(SWEEP_HEADER):
                continue  # torn tail write from a killed run
            id_a, id_b, dist, solver, converged, error = record
            done[(id_a, id_b)] = PairRow(
                id_a=id_a,
                id_b=id_b,
                distance=float(dist) if dist else float("nan"),
                solver=solver,
                converged=converged == "1",
                error=error,
            )
    return done


def _solve_pair(args) -> PairRow:
    dataset, config, id_a, id_b = args
    try:
        result = app_distance(dataset.app(id_a), dataset.app(id_b), config=config)
        return PairRow(id_a, id_b, result.distance, result.solver, result.converged)
    except UiotError as exc:  # recorded, not fatal: one bad pair must not kill a sweep
        return PairRow(id_a, id_b, float("nan"), "", False, error=exc.code)


_WORKER_STATE: dict = {}


def _worker_init(dataset: Dataset, config: SolverConfig):
    _WORKER_STATE["dataset"] = dataset
    _WORKER_STATE["config"] = config


def _worker_solve(pair: tuple[str, str]) -> PairRow:
    return _solve_pair((_WORKER_STATE["dataset"], _WORKER_STATE["config"], pair[0], pair[1]))


def pairwise_sweep(
    dataset: Dataset,
    config: SolverConfig | None = None,
    out_csv: str | Path = "pairs.csv",
    threads: int = 1,
    journal_every: int = 1,
) -> Path:
    """All-pairs transport distances, streamed to a resumable CSV.

    Completed pairs land in an append-only journal as they finish; a
    restarted sweep skips them. The final CSV is rewritten from the
    journal in canonical pair order, so its bytes do not depend on how
    many times the sweep was interrupted or how many workers ran.
    """
    config = config or SolverConfig()
    out_csv = Path(out_csv)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    journal = _journal_path(out_csv)

    pairs = canonical_pairs(dataset)
    if not pairs:
        raise EmptyStudy("pairwise sweep needs at least 2 apps")
    done = _read_journal(journal)
    todo = [p for p in pairs if p not in done]

    if todo:
        with open(journal, "a", newline="") as fh:
            writer = csv.writer(fh)
            pending = 0
            if threads > 1:
                with ProcessPoolExecutor(
                    max_workers=threads, initializer=_worker_init, initargs=(dataset, config)
                ) as pool:
                    for row in pool.map(_worker_solve, todo, chunksize=8):
                        done[(row.id_a, row.id_b)] = row
                        writer.writerow(row.as_csv())
                        pending += 1
                        if pending >= journal_every:
                            fh.flush()
                            pending = 0
            else:
                for pair in todo:
                    row = _solve_pair((dataset, config, pair[0], pair[1]))
                    done[pair] = row
                    writer.writerow(row.as_csv())
                    pending += 1
                    if pending >= journal_every:
                        fh.flush()
                        pending = 0

    with open(out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        for pair in pairs:
            writer.writerow(done[pair].as_csv())
    return out_csv


def read_sweep(path: str | Path) -> list[PairRow]:
    rows: list[PairRow] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SWEEP_HEADER:
            raise IncompleteTable(f"{path}: not a sweep table")
        for record in reader:
            id_a, id_b, dist, solver, converged, error = record
            rows.append(
                PairRow(id_a, id_b, float(dist) if dist else float("nan"), solver, converged == "1", error)
            )
    return rows


# ---------------------------------------------------------------------------
# pair grouping (same vs. different name/category/platform)


@dataclass
class PairGroupingReport:
    criterion: str
    same: dict
    different: dict
    test: MannWhitneyResult | None
    skipped: bool = False  # degenerate partition, one side empty

    def to_json_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "sameGroup": self.same,
            "differentGroup": self.different,
            "test": self.test.to_json_dict() if self.test else None,
            "skipped": self.skipped,
        }


def group_pairs(rows: list[PairRow], dataset: Dataset, criterion: str) -> PairGroupingReport:
    """Split the completed distance table by shared name/category/platform
    and compare the two sides with Mann-Whitney U. Reporting only: no
    directional assertion is made here."""
    if criterion not in GROUP_CRITERIA:
        raise ValueError(f"criterion must be one of {GROUP_CRITERIA}")
    expected = set(canonical_pairs(dataset))
    seen = {(r.id_a, r.id_b) for r in rows}
    if seen != expected:
        raise IncompleteTable(
            f"table covers {len(seen & expected)} of {len(expected)} pairs for this dataset"
        )

    def key(app_id: str) -> str:
        app = dataset.app(app_id)
        return {"name": app.name, "category": app.category, "platform": app.platform}[criterion]

    same, different = [], []
    for row in rows:
        if row.error:
            continue
        (same if key(row.id_a) == key(row.id_b) else different).append(row.distance)

    if not same or not different:
        return PairGroupingReport(
            criterion=criterion,
            same=summarize(same),
            different=summarize(different),
            test=None,
            skipped=True,
        )
    return PairGroupingReport(
        criterion=criterion,
        same=summarize(same),
        different=summarize(different),
        test=mann_whitney_u(same, different),
    )


# ---------------------------------------------------------------------------
# uniformity-change studies


STUDY_MODES = ("randomChange", "heldOutChange")


@dataclass
class DeltaLuStudy:
    mode: str
    n_values: list[int]
    seed: int
    held_out_count: int
    t: float
    per_app: dict[str, dict[int, float]]  # app id -> {N: delta}
    tests: dict[int, TTestResult | None]  # None when < 2 apps qualified
    excluded: list[str] = field(default_factory=list)

    def deltas_for(self, n: int) -> list[float]:
        return [per_n[n] for per_n in self.per_app.values()]

    def to_json_dict(self) -> dict:
        return {
            "config": {
                "mode": self.mode,
                "nValues": self.n_values,
                "seed": self.seed,
                "heldOutCount": self.held_out_count,
                "t": self.t,
            },
            "perN": {
                str(n): {
                    "meanDelta": float(np.mean(self.deltas_for(n))),
                    "test": self.tests[n].to_json_dict() if self.tests[n] else None,
                }
                for n in self.n_values
            },
            "apps": {
                app_id: {str(n): d for n, d in per_n.items()}
                for app_id, per_n in sorted(self.per_app.items())
            },
            "excluded": sorted(self.excluded),
        }

    def write_long_csv(self, path: str | Path) -> Path:
        """Plot-ready long format: one (app, N, delta) row per line."""
        path = Path(path)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["appId", "n", "delta"])
            for app_id in sorted(self.per_app):
                for n in self.n_values:
                    writer.writerow([app_id, n, repr(self.per_app[app_id][n])])
        return path


def _app_rng(seed: int, app_id: str, label: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}\x1f{app_id}\x1f{label}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def run_delta_lu_study(
    dataset: Dataset,
    mode: str,
    n_values: tuple[int, ...] = (1, 2, 3, 4, 5),
    seed: int = 0,
    held_out_count: int = 5,
    t: float = 2.0,
) -> DeltaLuStudy:
    """Per-app uniformity change when N screenshots are replaced.

    Both modes hold out held_out_count screenshots first and score the
    baseline on the remainder. randomChange swaps in screenshots drawn
    uniformly from other apps; heldOutChange swaps in the app's own
    reserved screenshots. Apps smaller than held_out_count +
    max(n_values) + 1 are excluded, not fatal.
    """
    if mode not in STUDY_MODES:
        raise ValueError(f"mode must be one of {STUDY_MODES}")
    n_values = tuple(int(n) for n in n_values)
    if any(n < 0 for n in n_values):
        raise ValueError("N values must be nonnegative")
    if mode == "heldOutChange" and max(n_values) > held_out_count:
        raise ValueError(
            f"heldOutChange can replace at most heldOutCount={held_out_count} screenshots"
        )
    min_size = held_out_count + max(n_values) + 1

    apps = dataset.apps()
    total_shots = sum(a.n for a in apps)

    def qualifies(a) -> bool:
        if a.n < min_size:
            return False
        # random replacements are distinct donors from other apps, so the
        # foreign pool must cover the largest N
        if mode == "randomChange" and total_shots - a.n < max(n_values):
            return False
        return True

    eligible = [a for a in apps if qualifies(a)]
    excluded = [a.id for a in apps if not qualifies(a)]
    if not eligible:
        raise EmptyStudy(f"no app has the required {min_size} screenshots")

    # donor index for random replacements: every screenshot of every app
    owners = np.array([i for i, app in enumerate(apps) for _ in range(app.n)])
    all_vectors = dataset.screenshot_matrix
    app_index = {app.id: i for i, app in enumerate(apps)}

    per_app: dict[str, dict[int, float]] = {}
    for app in eligible:
        hold_rng = _app_rng(seed, app.id, "heldout")
        held = hold_rng.choice(app.n, size=held_out_count, replace=False)
        held_set = set(int(i) for i in held)
        remainder_idx = [i for i in range(app.n) if i not in held_set]
        remainder = app.vectors[remainder_idx]
        lu_before = uniformity_loss(remainder, t=t, set_id=app.id).lu

        deltas: dict[int, float] = {}
        for n in n_values:
            if n == 0:
                deltas[0] = 0.0
                continue
            rng = _app_rng(seed, app.id, f"{mode}:{n}")
            replace_pos = rng.choice(len(remainder_idx), size=n, replace=False)
            if mode == "heldOutChange":
                chosen = rng.choice(held_out_count, size=n, replace=False)
                incoming = app.vectors[held[chosen]]
            else:
                foreign = np.flatnonzero(owners != app_index[app.id])
                chosen = rng.choice(foreign.size, size=n, replace=False)
                incoming = all_vectors[foreign[chosen]]
            edited = remainder.copy()
            edited[replace_pos] = incoming
            lu_after = uniformity_loss(edited, t=t, set_id=app.id).lu
            deltas[n] = lu_after - lu_before
        per_app[app.id] = deltas

    # one eligible app leaves nothing to test against
    tests = {
        n: welch_ttest([per_app[a.id][n] for a in eligible], mu0=0.0) if len(eligible) >= 2 else None
        for n in n_values
    }
    return DeltaLuStudy(
        mode=mode,
        n_values=list(n_values),
        seed=seed,
        held_out_count=held_out_count,
        t=t,
        per_app=per_app,
        tests=tests,
        excluded=excluded,
    )


def study_to_json(study) -> str:
    """Canonical JSON for study artifacts: sorted keys, no timestamps,
    so identical inputs produce identical bytes."""
    return json.dumps(study.to_json_dict(), sort_keys=True, indent=2)
