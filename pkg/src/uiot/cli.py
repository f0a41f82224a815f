"""Operator command line: ingest, query, studies, and the service.

Human-readable TSV by default; --json switches every subcommand to a
machine-readable document on stdout (and error envelopes on stderr).
Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .dataset import ingest
from .encoder import HttpEncoder, SubprocessEncoder, encode_images
from .errors import UiotError
from .experiments import (
    GROUP_CRITERIA,
    group_pairs,
    pairwise_sweep,
    read_sweep,
    run_delta_lu_study,
    study_to_json,
)
from .retrieval import LabelEmbeddingSet, classify, rank_apps
from .transport import PlanCache, SolverConfig, app_distance
from .uieb import read_embeddings
from .uniformity import WhatIfEdit, delta_uniformity, uniformity_loss

CONTEXT_SETTINGS = {"auto_envvar_prefix": "UIOT", "help_option_names": ["-h", "--help"]}


class CliState:
    def __init__(self):
        self.dataset_path: str | None = None
        self.seed = 0
        self.threads = 1
        self.output_dir = Path(".")
        self.solver = "auto"
        self.epsilon = 0.01
        self.tol = 1e-6
        self.json_output = False
        self._dataset = None

    def solver_config(self) -> SolverConfig:
        return SolverConfig(solver=self.solver, epsilon=self.epsilon, tol=self.tol)

    def dataset(self):
        if self.dataset_path is None:
            raise click.UsageError("--dataset is required for this command")
        if self._dataset is None:
            self._dataset = ingest(self.dataset_path)
        return self._dataset

    def emit(self, payload, human: str | None = None):
        if self.json_output:
            click.echo(json.dumps(payload, sort_keys=True))
        else:
            click.echo(human if human is not None else json.dumps(payload, sort_keys=True, indent=2))

    def fail(self, exc: UiotError):
        if self.json_output:
            click.echo(json.dumps({"code": exc.code, "message": exc.message}), err=True)
        else:
            click.echo(f"error [{exc.code}]: {exc.message}", err=True)
        sys.exit(1)


pass_state = click.make_pass_decorator(CliState, ensure=True)


def _guard(state: CliState, fn):
    try:
        return fn()
    except UiotError as exc:
        state.fail(exc)


@click.group(context_settings=CONTEXT_SETTINGS)
@click.version_option(__version__)
@click.option("--dataset", "dataset_path", type=click.Path(), default=None, help="Manifest or JSONL path.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--output-dir", type=click.Path(), default=".", show_default=True)
@click.option("--solver", type=click.Choice(["exact", "sinkhorn", "auto"]), default="auto", show_default=True)
@click.option("--epsilon", type=float, default=0.01, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--json", "json_output", is_flag=True, help="Machine-readable output.")
@pass_state
def main(state, dataset_path, seed, threads, output_dir, solver, epsilon, tol, json_output):
    """App-to-app retrieval and design-consistency engine."""
    state.dataset_path = dataset_path
    state.seed = seed
    state.threads = max(1, threads)
    state.output_dir = Path(output_dir)
    state.solver = solver
    state.epsilon = epsilon
    state.tol = tol
    state.json_output = json_output


@main.command("ingest")
@click.option("--manifest", required=True, type=click.Path())
@pass_state
def ingest_cmd(state, manifest):
    """Validate a dataset and print its fingerprint."""

    def run():
        data = ingest(manifest)
        payload = {"fingerprint": data.fingerprint, **data.counts()}
        state.emit(
            payload,
            human="\n".join(
                [
                    f"fingerprint\t{data.fingerprint}",
                    f"apps\t{payload['apps']}",
                    f"screenshots\t{payload['screenshots']}",
                    f"embeddingDim\t{payload['embeddingDim']}",
                ]
                + [f"category:{c}\t{n}" for c, n in payload["categoryHistogram"].items()]
            ),
        )

    _guard(state, run)


@main.command("retrieve-app")
@click.option("--query", "query_id", required=True)
@click.option("--k", type=int, default=5, show_default=True)
@pass_state
def retrieve_app(state, query_id, k):
    """Rank apps by transport distance to the query app."""

    def run():
        data = state.dataset()
        result = rank_apps(data.app(query_id), data, k, config=state.solver_config())
        payload = result.to_json_dict()
        lines = ["rank\tappId\tdistance"]
        lines += [f"{i + 1}\t{h.target_id}\t{h.score:.6f}" for i, h in enumerate(result.hits)]
        state.emit(payload, human="\n".join(lines))

    _guard(state, run)


@main.command()
@click.option("--query", "query_id", required=True)
@click.option("--target", "target_id", required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write to a file instead of stdout.")
@pass_state
def plan(state, query_id, target_id, fmt, out):
    """Export the optimal transport plan between two apps."""

    def run():
        data = state.dataset()
        result = app_distance(data.app(query_id), data.app(target_id), config=state.solver_config())
        if fmt == "csv":
            if out is None:
                raise click.UsageError("--format csv requires --out")
            result.write_csv(out)
            state.emit({"written": str(out), "distance": result.distance}, human=f"wrote {out}")
            return
        payload = result.to_json_dict()
        if out is not None:
            Path(out).write_text(json.dumps(payload, sort_keys=True))
            state.emit({"written": str(out), "distance": result.distance}, human=f"wrote {out}")
        else:
            state.emit(payload, human=json.dumps(payload, indent=2, sort_keys=True))

    _guard(state, run)


@main.command()
@click.option("--app", "app_id", default=None)
@click.option("--all", "all_apps", is_flag=True)
@click.option("--t", type=float, default=2.0, show_default=True)
@pass_state
def uniformity(state, app_id, all_apps, t):
    """Uniformity-loss report for one app (or JSONL for --all)."""
    if (app_id is None) == (not all_apps):
        raise click.UsageError("pass exactly one of --app or --all")

    def run():
        data = state.dataset()
        if all_apps:
            for screen_set in data.apps():
                report = uniformity_loss(screen_set.vectors, t=t, set_id=screen_set.id)
                click.echo(json.dumps(report.to_json_dict(), sort_keys=True))
            return
        screen_set = data.app(app_id)
        report = uniformity_loss(screen_set.vectors, t=t, set_id=screen_set.id)
        state.emit(
            report.to_json_dict(),
            human=f"app\t{screen_set.id}\nn\t{report.n}\nt\t{report.t}\nlu\t{report.lu:.6f}",
        )

    _guard(state, run)


@main.command()
@click.option("--app", "app_id", required=True)
@click.option("--remove", "remove_ids", default="", help="Comma-separated screenshot ids.")
@click.option("--add-embeddings", "add_path", type=click.Path(), default=None, help="UIEB block of draft vectors.")
@click.option("--t", type=float, default=2.0, show_default=True)
@pass_state
def whatif(state, app_id, remove_ids, add_path, t):
    """Uniformity delta for a hypothetical edit."""

    def run():
        data = state.dataset()
        removals = [s for s in remove_ids.split(",") if s] if remove_ids else []
        added = read_embeddings(add_path).astype(np.float64) if add_path else None
        edit = WhatIfEdit(remove_ids=removals, add_vectors=added)
        report = delta_uniformity(data.app(app_id), edit, t=t)
        state.emit(
            report.to_json_dict(),
            human=f"luBefore\t{report.lu_before:.6f}\nluAfter\t{report.lu_after:.6f}\ndelta\t{report.delta:.6f}",
        )

    _guard(state, run)


@main.command("classify")
@click.option("--labels", "labels_path", required=True, type=click.Path(), help="Label-set prefix (see docs) or JSON file.")
@click.option("--screenshot", "screenshot_id", default=None, help="Global id appId/screenshotId.")
@click.option("--embedding", "embedding_path", type=click.Path(), default=None, help="UIEB block; classifies row 0.")
@click.option("--k", type=int, default=5, show_default=True)
@pass_state
def classify_cmd(state, labels_path, screenshot_id, embedding_path, k):
    """Zero-shot top-k labels for one screenshot."""
    if (screenshot_id is None) == (embedding_path is None):
        raise click.UsageError("pass exactly one of --screenshot or --embedding")

    def run():
        label_set = LabelEmbeddingSet.load(Path(labels_path))
        if screenshot_id is not None:
            vector = state.dataset().vector_for(screenshot_id)
        else:
            vector = read_embeddings(embedding_path).astype(np.float64)[0]
        ranked = classify(vector, label_set, k)
        payload = {"labels": [{"label": l, "similarity": s} for l, s in ranked]}
        state.emit(payload, human="\n".join(f"{l}\t{s:.6f}" for l, s in ranked))

    _guard(state, run)


@main.command()
@click.option("--out", type=click.Path(), default=None, help="Output CSV (default <output-dir>/pairs.csv).")
@pass_state
def sweep(state, out):
    """All-pairs transport distances, resumable CSV."""

    def run():
        data = state.dataset()
        target = Path(out) if out else state.output_dir / "pairs.csv"
        path = pairwise_sweep(data, config=state.solver_config(), out_csv=target, threads=state.threads)
        state.emit({"written": str(path), "pairs": len(read_sweep(path))}, human=f"wrote {path}")

    _guard(state, run)


@main.group()
def study():
    """Dataset-scale analysis protocols."""


@study.command("pair-grouping")
@click.option("--criterion", type=click.Choice(list(GROUP_CRITERIA)), required=True)
@click.option("--table", "table_path", type=click.Path(), default=None, help="Sweep CSV (default <output-dir>/pairs.csv).")
@pass_state
def pair_grouping(state, criterion, table_path):
    """Same-vs-different distance distributions under one criterion."""

    def run():
        data = state.dataset()
        table = Path(table_path) if table_path else state.output_dir / "pairs.csv"
        rows = read_sweep(table)
        report = group_pairs(rows, data, criterion)
        state.emit(report.to_json_dict(), human=json.dumps(report.to_json_dict(), indent=2, sort_keys=True))

    _guard(state, run)


@study.command("delta-lu")
@click.option("--mode", type=click.Choice(["random", "heldout"]), required=True)
@click.option("--n", "n_values", default="1,2,3,4,5", show_default=True, help="Comma-separated N grid.")
@click.option("--held-out", "held_out_count", type=int, default=5, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Also write the study JSON here.")
@pass_state
def delta_lu(state, mode, n_values, held_out_count, out):
    """Uniformity-change study (random or held-out replacements)."""

    def run():
        data = state.dataset()
        ns = tuple(int(x) for x in n_values.split(",") if x)
        result = run_delta_lu_study(
            data,
            mode={"random": "randomChange", "heldout": "heldOutChange"}[mode],
            n_values=ns,
            seed=state.seed,
            held_out_count=held_out_count,
        )
        doc = study_to_json(result)
        if out:
            Path(out).write_text(doc)
        click.echo(doc)

    _guard(state, run)


@main.command()
@click.option("--images", "images_dir", required=True, type=click.Path())
@click.option("--endpoint", required=True, help="http(s) URL or a subprocess command line.")
@click.option("--dim", type=int, default=None, help="Expected embedding dimension.")
@click.option("--pad-square", is_flag=True)
@click.option("--out", type=click.Path(), required=True, help="Output UIEB block.")
@pass_state
def encode(state, images_dir, endpoint, dim, pad_square, out):
    """Encode a directory of images into an embedding block."""

    def run():
        paths = sorted(p for p in Path(images_dir).iterdir() if p.is_file())
        if endpoint.startswith("http://") or endpoint.startswith("https://"):
            enc = HttpEncoder(endpoint, expected_dim=dim)
        else:
            enc = SubprocessEncoder(endpoint.split(), expected_dim=dim)
        with enc:
            block = encode_images(paths, enc, pad_square=pad_square, out_path=out)
        state.emit(
            {"written": str(out), "images": int(block.shape[0]), "dim": int(block.shape[1])},
            human=f"wrote {out} ({block.shape[0]} x {block.shape[1]})",
        )

    _guard(state, run)


@main.command()
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--labels", "labels_path", type=click.Path(), default=None, help="Label-set prefix to serve.")
@click.option("--static", "static_dir", type=click.Path(), default=None, help="UI bundle directory.")
@click.option("--studies-dir", type=click.Path(), default=None)
@pass_state
def serve(state, port, host, labels_path, static_dir, studies_dir):
    """Run the HTTP service over the ingested dataset."""

    def run():
        import uvicorn

        from .service import create_app

        label_sets = {}
        if labels_path:
            label_sets["default"] = LabelEmbeddingSet.load(Path(labels_path))
        app = create_app(
            state.dataset(),
            label_sets=label_sets,
            config=state.solver_config(),
            studies_dir=studies_dir or state.output_dir,
            static_dir=static_dir,
        )
        uvicorn.run(app, host=host, port=port, log_level="warning")

    _guard(state, run)


if __name__ == "__main__":
    main()
