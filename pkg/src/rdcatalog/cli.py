"""Operator command line: the offline pipeline plus the server.

Pipeline stages are separate subcommands (ingest, score, textnet) so a
curator can re-score or rebuild the network without re-ingesting.
Exit codes: 0 success, 1 completed with per-file failures, 2 fatal.
"""

from __future__ import annotations

import dataclasses
import sys
from datetime import timedelta
from pathlib import Path

import click

from . import __version__
from .convert import ConvertError, default_variable_selection, to_ascii
from .fetch import FetchPolicy, FileCache
from .model import (
    CatalogSnapshot,
    DataFormat,
    DatasetConfig,
    Granularity,
    ModelError,
    load_dataset_config,
    validate_record,
)
from .netcdf3 import FormatError, read_self_describing
from .payloads import make_snapshot_loader
from .registry import RegistryError, load_manifest, save_manifest
from .relatedness import AlignmentSpec, compute_score_matrix
from .store import CatalogStore, load_snapshot, save_snapshot
from .textnet import build_cooccurrence, load_wordlist, make_tokenizer


def _fail(message: str, code: int = 2):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _report_line(kind: str, path, message: str) -> None:
    # one parseable line per failed input file
    click.echo(f"{kind}\t{path}\t{message}", err=True)


def _load_snapshot_or_die(directory) -> CatalogSnapshot:
    try:
        return load_snapshot(directory)
    except Exception as exc:
        _fail(f"cannot read snapshot at {directory}: {exc}")


def _placeholder_config(slug: str) -> DatasetConfig:
    return DatasetConfig(
        id=slug,
        data_url_template="",
        granularity=Granularity.STATIC,
        format=DataFormat.OTHER,
        show_visualized=False,
        download_enabled=False,
        conversion_enabled=False,
    )


@click.group()
@click.version_option(version=__version__, prog_name="rdcatalog")
def main():
    """Research-data catalog pipeline and server."""


@main.command()
@click.argument("metadata_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("config_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def ingest(metadata_dir, config_dir, out_dir):
    """Parse metadata XML and dataset configs into a fresh snapshot."""
    from .ingest import ingest_directory

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    records, failures = ingest_directory(metadata_dir)
    errors = [(f.path, f.error) for f in failures]

    configs: dict[str, DatasetConfig] = {}
    config_root = Path(config_dir)
    for config_path in sorted(list(config_root.glob("*.yaml")) + list(config_root.glob("*.yml"))):
        try:
            cfg = load_dataset_config(config_path.read_text(encoding="utf-8"))
        except (ModelError, RegistryError, OSError) as exc:
            errors.append((config_path, str(exc)))
            continue
        if cfg.id in configs:
            errors.append((config_path, f"duplicate config id {cfg.id!r}"))
            continue
        configs[cfg.id] = cfg

    manifest_out = out / "manifests"
    manifest_out.mkdir(parents=True, exist_ok=True)
    for cfg in configs.values():
        if not cfg.manifest_path:
            continue
        manifest_path = Path(cfg.manifest_path)
        if not manifest_path.is_absolute():
            manifest_path = config_root / manifest_path
        try:
            manifest = load_manifest(manifest_path, cfg.id)
        except (OSError, ValueError) as exc:
            errors.append((manifest_path, str(exc)))
            continue
        save_manifest(manifest, manifest_out / f"{cfg.id}.txt")

    kept: dict[str, object] = {}
    for record in records:
        issues = validate_record(record)
        if issues:
            errors.append((record.id, "; ".join(str(i) for i in issues)))
            continue
        if record.config_ref not in configs:
            configs[record.config_ref] = _placeholder_config(record.config_ref)
        kept[record.id] = record

    snapshot = CatalogSnapshot(records=kept, configs=configs, version=1)
    try:
        save_snapshot(snapshot, out)
    except Exception as exc:
        _fail(f"cannot write snapshot: {exc}")

    for path, message in errors:
        _report_line("INGEST-ERROR", path, message)
    click.echo(f"ingested {len(kept)} records, {len(errors)} failures -> {out}")
    if errors:
        sys.exit(1)


@main.command()
@click.option("--snapshot", "snapshot_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--threshold", type=float, default=None,
              help="Related-list score threshold persisted into the snapshot.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--cadence", type=float, default=60.0, show_default=True,
              help="Target alignment cadence in seconds.")
@click.option("--min-overlap", type=int, default=16, show_default=True)
def score(snapshot_dir, threshold, jobs, cadence, min_overlap):
    """Compute pairwise relatedness scores and store them in the snapshot."""
    snapshot = _load_snapshot_or_die(snapshot_dir)
    if threshold is not None and not 0.0 <= threshold <= 1.0:
        _fail("--threshold must be within [0, 1]")
    if jobs < 1:
        _fail("--jobs must be at least 1")
    try:
        alignment = AlignmentSpec(
            cadence=timedelta(seconds=cadence), min_overlap_points=min_overlap
        )
    except ValueError as exc:
        _fail(str(exc))

    policy = FetchPolicy()
    cache = FileCache(Path(snapshot_dir) / "cache", policy.max_cache_size)
    loader = make_snapshot_loader(
        snapshot.configs, policy, cache, Path(snapshot_dir) / "manifests"
    )
    scores = compute_score_matrix(
        snapshot.records.values(), loader, alignment=alignment, jobs=jobs
    )

    settings = dict(snapshot.settings)
    if threshold is not None:
        settings["related_threshold"] = threshold
    updated = dataclasses.replace(snapshot, scores=scores, settings=settings)
    save_snapshot(updated, snapshot_dir)
    click.echo(f"scored {len(scores)} dataset pairs -> {snapshot_dir}")


@main.command()
@click.option("--snapshot", "snapshot_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--min-count", type=int, default=2, show_default=True)
@click.option("--min-co", type=int, default=2, show_default=True)
@click.option("--phrases", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Phrase dictionary file, one phrase per line.")
@click.option("--stopwords", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Stopword list file, one word per line.")
def textnet(snapshot_dir, min_count, min_co, phrases, stopwords):
    """Build the title co-occurrence network and store it in the snapshot."""
    snapshot = _load_snapshot_or_die(snapshot_dir)
    if min_count < 1 or min_co < 1:
        _fail("--min-count and --min-co must be at least 1")
    tokenizer = make_tokenizer(
        load_wordlist(phrases) if phrases else None,
        load_wordlist(stopwords) if stopwords else None,
    )
    titles = [r.title.get("en") for _, r in sorted(snapshot.records.items())]
    graph = build_cooccurrence(titles, tokenizer, min_count=min_count, min_co=min_co)
    updated = dataclasses.replace(snapshot, graph=graph)
    save_snapshot(updated, snapshot_dir)
    click.echo(
        f"network: {len(graph.nodes)} terms, {len(graph.edges)} links "
        f"from {graph.total_titles} titles -> {snapshot_dir}"
    )


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--ascii", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the delimited text here instead of stdout.")
@click.option("--variables", default=None,
              help="Comma-separated variable names (default: the record table).")
@click.option("--delimiter", default=",", show_default=True)
def convert(source, out_path, variables, delimiter):
    """Convert a self-describing binary data file to delimited text."""
    data = Path(source).read_bytes()
    try:
        dataset = read_self_describing(data)
        selection = (
            [v.strip() for v in variables.split(",") if v.strip()]
            if variables
            else default_variable_selection(dataset)
        )
        text = to_ascii(dataset, selection, delimiter=delimiter)
    except (FormatError, ConvertError) as exc:
        _fail(f"{source}: {exc}")
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--snapshot", "snapshot_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--listen", default="127.0.0.1:8000", show_default=True,
              help="host:port to bind.")
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None)
@click.option("--images", "image_dir", type=click.Path(exists=True, file_okay=False),
              default=None)
@click.option("--chip", "chip_list", multiple=True,
              help="Preset search chip (repeatable); defaults to the built-in set.")
def serve(snapshot_dir, listen, cache_dir, image_dir, chip_list):
    """Serve the catalog API over HTTP."""
    import uvicorn

    from .service import DEFAULT_CHIPS, create_app

    host, sep, port_text = listen.rpartition(":")
    if not sep or not host:
        _fail(f"--listen must be host:port, got {listen!r}")
    try:
        port = int(port_text)
    except ValueError:
        _fail(f"--listen port must be an integer, got {port_text!r}")

    snapshot = _load_snapshot_or_die(snapshot_dir)
    store = CatalogStore()
    store.swap_snapshot(snapshot)
    app = create_app(
        store,
        snapshot_dir=snapshot_dir,
        cache_dir=cache_dir,
        chips=tuple(chip_list) if chip_list else DEFAULT_CHIPS,
        image_dir=image_dir,
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--snapshot", "snapshot_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def report(snapshot_dir, out_dir):
    """Render the score table and figures for curator review."""
    from .report import render_report

    snapshot = _load_snapshot_or_die(snapshot_dir)
    paths = render_report(snapshot, out_dir)
    for path in paths:
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
