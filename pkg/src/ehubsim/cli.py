"""Command-line entry points: simulation runs, the OD benchmark, schema
export, offline evaluation, and the HTTP service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .benchmark import od_benchmark
from .errors import EhubError
from .evalsuite import load_corpus, run_evaluation
from .network import TrafficLevel, generate_synthetic_grid, load_scenario
from .rag import RagPipeline, ReplayBackend, export_mschema_files
from .simulation import run_scenario_to_store
from .store import Datastore
from .embeddings import HashingEmbeddingProvider


@click.group()
def main() -> None:
    """Shared e-mobility simulation platform."""


def _fail(exc: EhubError) -> None:
    click.echo(f"error [{exc.code}]: {exc}", err=True)
    sys.exit(1)


@main.group()
def sim() -> None:
    """Simulation commands."""


@sim.command("run")
@click.argument("scenario", type=click.Path(exists=True))
@click.option("--export", "export_path", type=click.Path(), default=None,
              help="Also write records as newline-delimited JSON.")
@click.option("--db", "db_path", type=click.Path(), default=None,
              help="Sqlite file for the run (defaults to in-memory).")
@click.option("--until", "until_s", type=int, default=None,
              help="Stop after this many seconds (whole windows).")
def sim_run(scenario: str, export_path, db_path, until_s) -> None:
    """Run a scenario and ingest records into the datastore."""
    try:
        config = load_scenario(scenario)
        store = Datastore(db_path or ":memory:")
        store.init_schema()
        export_file = open(export_path, "w", encoding="utf-8") \
            if export_path else None

        def on_window(records) -> None:
            if export_file is not None:
                for r in records:
                    export_file.write(r.to_json() + "\n")

        summary = run_scenario_to_store(config, store, until_s=until_s,
                                        on_window=on_window)
        if export_file is not None:
            export_file.close()
        click.echo(json.dumps({
            "records": summary.records_emitted,
            "wall_clock_s": round(summary.wall_clock_s, 3),
            "spawned": summary.spawned,
            "arrived": summary.arrived,
        }, indent=2))
    except EhubError as exc:
        _fail(exc)


@main.group()
def bench() -> None:
    """Benchmark commands."""


@bench.command("od")
@click.argument("scenario", type=click.Path(exists=True))
@click.option("--pairs", type=int, default=400, show_default=True)
@click.option("--levels", default="low,medium,high", show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--snapshot-time", type=int, default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--csv", "csv_path", type=click.Path(), default=None)
def bench_od(scenario, pairs, levels, seed, snapshot_time, out_path, csv_path):
    """Solve OD pairs under each traffic level and report extra times."""
    try:
        config = load_scenario(scenario)
        level_list = [TrafficLevel(part.strip().lower())
                      for part in levels.split(",") if part.strip()]
        report = od_benchmark(config, n_pairs=pairs, levels=level_list,
                              seed=seed, snapshot_time_s=snapshot_time)
        if out_path:
            Path(out_path).write_text(report.to_json(), encoding="utf-8")
        if csv_path:
            Path(csv_path).write_text(report.to_csv(), encoding="utf-8")
        click.echo(json.dumps({
            "pairs": report.n_pairs,
            "excluded": report.excluded_pairs,
            "mean_extra_s": report.mean_extra_s,
        }, indent=2))
    except (EhubError, ValueError) as exc:
        if isinstance(exc, EhubError):
            _fail(exc)
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.group()
def rag() -> None:
    """Schema retrieval and text-to-SQL commands."""


def _load_store(db_path, seed_dir) -> Datastore:
    store = Datastore(db_path or ":memory:")
    if not store.list_tables():
        store.init_schema()
    if seed_dir:
        for table in ("online_demo", "stations", "user_paths"):
            path = Path(seed_dir) / f"{table}.jsonl"
            if path.exists():
                store.seed_table_from_jsonl(table, path)
    return store


@rag.command("schema-export")
@click.option("--db", "db_path", type=click.Path(exists=True), default=None,
              help="Sqlite database to introspect (default: empty schema).")
@click.option("--seed-dir", type=click.Path(exists=True), default=None,
              help="Directory of <table>.jsonl fixture files to load first.")
@click.option("--out", "out_dir", type=click.Path(), default="mschema",
              show_default=True)
def rag_schema_export(db_path, seed_dir, out_dir) -> None:
    """Write one schema JSON document per table."""
    try:
        store = _load_store(db_path, seed_dir)
        paths = export_mschema_files(store, out_dir)
        click.echo(json.dumps({"written": [str(p) for p in paths]}, indent=2))
    except EhubError as exc:
        _fail(exc)


@rag.command("eval")
@click.option("--corpus", type=click.Path(exists=True), required=True)
@click.option("--backend", "backend_spec", required=True,
              help="Backend spec, e.g. replay:<cassette.json>.")
@click.option("--db", "db_path", type=click.Path(exists=True), default=None)
@click.option("--seed-dir", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--csv", "csv_path", type=click.Path(), default=None)
def rag_eval(corpus, backend_spec, db_path, seed_dir, out_path, csv_path):
    """Evaluate a backend over a QA corpus against a fixture database."""
    try:
        if not backend_spec.startswith("replay:"):
            raise EhubError(f"unsupported backend spec {backend_spec!r}")
        backend = ReplayBackend(backend_spec.split(":", 1)[1])
        store = _load_store(db_path, seed_dir)
        pipeline = RagPipeline(store, HashingEmbeddingProvider())
        cases = load_corpus(corpus)
        report = run_evaluation(cases, pipeline.predictor(backend), store,
                                model=backend.backend_id)
        if out_path:
            Path(out_path).write_text(report.to_json(), encoding="utf-8")
        if csv_path:
            Path(csv_path).write_text(report.to_csv(), encoding="utf-8")
        summary = {
            s.user_class: {"execution_accuracy": s.execution_accuracy,
                           "cases": s.case_count}
            for s in report.slices
        }
        click.echo(json.dumps(summary, indent=2))
    except EhubError as exc:
        _fail(exc)


@main.command("grid")
@click.argument("n", type=int)
@click.argument("m", type=int)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def grid(n, m, seed, out_path) -> None:
    """Generate a synthetic grid network file."""
    try:
        Path(out_path).write_text(generate_synthetic_grid(n, m, seed),
                                  encoding="utf-8")
        click.echo(f"wrote {out_path}")
    except EhubError as exc:
        _fail(exc)


@main.command("serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port: int, host: str) -> None:
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
