"""Resolving dataset records to the numeric payloads the scorer consumes.

A record's data lives in remote granule files named by its URL template
and availability manifest.  This module fetches those files, decodes
them, and produces either a merged TimeSeries (time_series records) or
a Histogram (composition records).

Variable selection is conventional, since the source files carry no
role markers: the series variable is the first 1-D record variable
that is not the time coordinate itself; the composition variable is
the first 1-D non-record numeric variable, with bin positions taken
from the variable named after its dimension when present (bin indices
otherwise).  Histograms wider than the solver limit are rebinned by
mass-weighted aggregation.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable

import numpy as np

from .convert import TimeSeries, extract_timeseries
from .emd import MAX_BINS, Histogram, SizeLimit
from .fetch import FetchPolicy, FileCache, fetch_file
from .model import DatasetConfig, DatasetRecord, DataKind
from .netcdf3 import SelfDescribingDataset, read_self_describing
from .registry import load_manifest, resolve_range

log = logging.getLogger(__name__)


class PayloadError(Exception):
    pass


def series_variable(dataset: SelfDescribingDataset) -> str:
    """Name of the first 1-D record variable that is not the time coordinate."""
    rec = dataset.record_dimension
    if rec is None:
        raise PayloadError("dataset has no record dimension")
    for var in dataset.variables:
        if var.dimensions == (rec.name,) and var.name != rec.name and var.typecode != "c":
            return var.name
    raise PayloadError("no 1-D record variable found")


def series_from_dataset(dataset: SelfDescribingDataset) -> TimeSeries:
    return extract_timeseries(dataset, series_variable(dataset))


def merge_series(parts: list[TimeSeries]) -> TimeSeries:
    """Combine per-file series into one, dropping repeated timestamps."""
    if not parts:
        raise PayloadError("no series to merge")
    samples = []
    for part in parts:
        for i, (t, v) in enumerate(zip(part.times, part.values)):
            samples.append((t, v, i in part.gaps))
    samples.sort(key=lambda s: s[0])
    times, values, gaps = [], [], set()
    for t, v, is_gap in samples:
        if times and t == times[-1]:
            continue
        if is_gap:
            gaps.add(len(times))
        times.append(t)
        values.append(v)
    return TimeSeries(times=times, values=values, gaps=gaps)


def histogram_from_dataset(dataset: SelfDescribingDataset) -> Histogram:
    rec = dataset.record_dimension
    rec_name = rec.name if rec is not None else None
    for var in dataset.variables:
        if var.typecode == "c" or len(var.dimensions) != 1:
            continue
        dim = var.dimensions[0]
        if dim == rec_name or var.name == dim:
            continue
        masses = np.asarray(var.data, dtype=np.float64)
        if masses.size == 0 or np.any(~np.isfinite(masses)) or np.any(masses < 0):
            continue
        if masses.sum() <= 0:
            continue
        coord = dataset.variable(dim)
        if (
            coord is not None
            and coord.dimensions == (dim,)
            and coord.typecode != "c"
            and np.all(np.isfinite(np.asarray(coord.data, dtype=np.float64)))
            and np.all(np.diff(np.asarray(coord.data, dtype=np.float64)) > 0)
        ):
            positions = np.asarray(coord.data, dtype=np.float64)
        else:
            positions = np.arange(masses.size, dtype=np.float64)
        return rebin_histogram(Histogram(positions, masses))
    raise PayloadError("no usable composition variable found")


def rebin_histogram(hist: Histogram, max_bins: int = MAX_BINS) -> Histogram:
    """Aggregate adjacent bins down to max_bins, mass-weighted positions."""
    if hist.size <= max_bins:
        return hist
    if hist.ndim != 1:
        raise SizeLimit(f"cannot rebin {hist.ndim}-dimensional histogram")
    groups = np.array_split(np.arange(hist.size), max_bins)
    masses = np.array([hist.masses[g].sum() for g in groups])
    positions = []
    for g in groups:
        weights = hist.masses[g]
        if weights.sum() > 0:
            positions.append(float(np.average(hist.positions[g], weights=weights)))
        else:
            positions.append(float(hist.positions[g].mean()))
    return Histogram(np.array(positions), masses)


def make_snapshot_loader(
    configs: dict[str, DatasetConfig],
    policy: FetchPolicy,
    cache: FileCache,
    manifest_dir: Path,
) -> Callable[[DatasetRecord], TimeSeries | Histogram | None]:
    """Loader for the scorer: record -> TimeSeries / Histogram / None.

    Records without a config or manifest opt out quietly (returning
    None); decode and fetch problems raise, so the scorer logs and
    skips them.
    """
    manifest_dir = Path(manifest_dir)

    def load(record: DatasetRecord):
        config = configs.get(record.config_ref)
        if config is None:
            return None
        manifest_path = manifest_dir / f"{record.id}.txt"
        if not manifest_path.is_file():
            return None
        manifest = load_manifest(manifest_path, record.id)
        if not manifest.timestamps:
            return None
        start, end = manifest.span
        entries = resolve_range(config, manifest, start, end)
        if not entries:
            return None

        if record.data_kind is DataKind.COMPOSITION:
            path = fetch_file(entries[0].url, policy, cache)
            return histogram_from_dataset(read_self_describing(path.read_bytes()))

        parts = []
        for entry in entries[: policy.max_files]:
            path = fetch_file(entry.url, policy, cache)
            parts.append(series_from_dataset(read_self_describing(path.read_bytes())))
        return merge_series(parts)

    return load
