"""Catalog store: single-writer snapshot swaps over many concurrent readers.

Published snapshots are treated as immutable, so a reader works from one
object for its whole request and can never observe a half-applied update.
Access counters are the one mutable surface; they live in a side table
keyed by slug and survive snapshot replacement.

On-disk layout (versioned via ``layout`` in index.json):

    snapshot/
      index.json     layout marker, snapshot version, settings
      records.json   list of record documents
      configs.json   list of config documents
      scores.csv     a_id,b_id,method,score,detail
      graph.json     co-occurrence graph document (optional)
      manifests/     availability manifests referenced by configs
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from .model import (
    CatalogSnapshot,
    DatasetConfig,
    DatasetRecord,
    IntegrityError,
    UnknownDataset,
)

LAYOUT_VERSION = 1


class CatalogStore:
    """Holds the current snapshot and the access-count side table."""

    def __init__(self, snapshot: CatalogSnapshot | None = None):
        self._lock = threading.Lock()
        self._snapshot = snapshot or CatalogSnapshot(version=0)
        self._access: dict[str, int] = {}

    def snapshot(self) -> CatalogSnapshot:
        """The current snapshot; hold on to it for the whole read."""
        return self._snapshot

    def swap_snapshot(self, new: CatalogSnapshot) -> int:
        """Atomically publish ``new``; returns the version it received.

        Readers that grabbed the previous snapshot keep seeing it in its
        entirety; reads issued after the swap see only the new one.
        """
        new.check_integrity()
        with self._lock:
            new.version = self._snapshot.version + 1
            self._snapshot = new
            return new.version

    def upsert(self, record: DatasetRecord, config: DatasetConfig | None = None) -> None:
        """Publish a snapshot extended (or overwritten) with one record."""
        with self._lock:
            old = self._snapshot
            records = dict(old.records)
            configs = dict(old.configs)
            if config is not None:
                configs[config.id] = config
            records[record.id] = record
            new = CatalogSnapshot(
                records=records,
                configs=configs,
                scores=list(old.scores),
                graph=old.graph,
                version=old.version + 1,
                settings=dict(old.settings),
            )
            new.check_integrity()
            self._snapshot = new

    def get(self, slug: str) -> DatasetRecord:
        record = self._snapshot.records.get(slug)
        if record is None:
            raise UnknownDataset(slug)
        return record

    # -- access counters ---------------------------------------------------

    def record_access(self, slug: str) -> int:
        """Linearizable increment; returns the merged count."""
        snapshot = self._snapshot
        if slug not in snapshot.records:
            raise UnknownDataset(slug)
        with self._lock:
            self._access[slug] = self._access.get(slug, 0) + 1
            return snapshot.records[slug].access_count + self._access[slug]

    def access_count(self, slug: str) -> int:
        snapshot = self._snapshot
        record = snapshot.records.get(slug)
        if record is None:
            raise UnknownDataset(slug)
        return record.access_count + self._access.get(slug, 0)

    def access_counts(self) -> dict[str, int]:
        """Merged counts for every record in the current snapshot."""
        snapshot = self._snapshot
        with self._lock:
            side = dict(self._access)
        return {
            slug: rec.access_count + side.get(slug, 0)
            for slug, rec in snapshot.records.items()
        }


# -- persistence -----------------------------------------------------------


def save_snapshot(snapshot: CatalogSnapshot, directory) -> None:
    from .relatedness import save_scores_csv
    from .textnet import export_graph

    snapshot.check_integrity()
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    index = {
        "layout": LAYOUT_VERSION,
        "version": snapshot.version,
        "record_count": len(snapshot.records),
        "settings": snapshot.settings,
    }
    _dump_json(directory / "index.json", index)
    _dump_json(
        directory / "records.json",
        [snapshot.records[k].to_dict() for k in sorted(snapshot.records)],
    )
    _dump_json(
        directory / "configs.json",
        [snapshot.configs[k].to_dict() for k in sorted(snapshot.configs)],
    )
    save_scores_csv(snapshot.scores, directory / "scores.csv")
    if snapshot.graph is not None:
        (directory / "graph.json").write_text(
            export_graph(snapshot.graph), encoding="utf-8"
        )


def load_snapshot(directory) -> CatalogSnapshot:
    from .relatedness import load_scores_csv
    from .textnet import import_graph

    directory = Path(directory)
    index_path = directory / "index.json"
    if not index_path.is_file():
        raise FileNotFoundError(f"not a snapshot directory: {directory}")
    index = json.loads(index_path.read_text(encoding="utf-8"))
    if index.get("layout") != LAYOUT_VERSION:
        raise IntegrityError(f"unsupported snapshot layout {index.get('layout')!r}")

    records = {}
    for doc in json.loads((directory / "records.json").read_text(encoding="utf-8")):
        record = DatasetRecord.from_dict(doc)
        records[record.id] = record
    configs = {}
    for doc in json.loads((directory / "configs.json").read_text(encoding="utf-8")):
        config = DatasetConfig.from_dict(doc)
        configs[config.id] = config

    scores = []
    scores_path = directory / "scores.csv"
    if scores_path.is_file():
        scores = load_scores_csv(scores_path)

    graph = None
    graph_path = directory / "graph.json"
    if graph_path.is_file():
        graph = import_graph(graph_path.read_text(encoding="utf-8"))

    snapshot = CatalogSnapshot(
        records=records,
        configs=configs,
        scores=scores,
        graph=graph,
        version=int(index.get("version", 1)),
        settings=dict(index.get("settings", {})),
    )
    snapshot.check_integrity()
    return snapshot


def _dump_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
