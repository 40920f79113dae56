"""Pairwise dataset relatedness: aligned Pearson scores and histogram distances.

Scores are stored per unordered dataset pair (slugs ordered ascending)
and normalized into [0, 1]: |r| for correlation, 1/(1 + d/sigma) for
earth mover's distance, where sigma is the median distance across the
composition corpus so the scale adapts to the data at hand.
"""

from __future__ import annotations

import csv
import io
import logging
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import timedelta
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .convert import TimeSeries
from .emd import Histogram, emd
from .model import DatasetRecord, DataKind, UnknownDataset

log = logging.getLogger(__name__)

METHODS = ("pearson", "emd")

DEFAULT_K = 10
DEFAULT_THRESHOLD = 0.7

_US = timedelta(microseconds=1)


class RelatednessError(Exception):
    pass


class NoOverlap(RelatednessError):
    pass


class DegenerateInput(RelatednessError):
    pass


@dataclass(frozen=True)
class AlignmentSpec:
    """How two series get resampled onto one grid before correlating."""

    cadence: timedelta = timedelta(minutes=1)
    aggregation: str = "mean"
    min_overlap_points: int = 16
    tolerance: timedelta | None = None  # nearest mode; default half the grid cadence

    def __post_init__(self):
        if self.cadence <= timedelta(0):
            raise ValueError("cadence must be positive")
        if self.aggregation not in ("mean", "nearest"):
            raise ValueError(f"unknown aggregation {self.aggregation!r}")
        if self.min_overlap_points < 3:
            raise ValueError("min_overlap_points must be at least 3")
        if self.tolerance is not None and self.tolerance <= timedelta(0):
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class RelatednessScore:
    dataset_a: str
    dataset_b: str
    score: float
    method: str
    detail: float

    def __post_init__(self):
        if self.dataset_a >= self.dataset_b:
            raise ValueError("pair must be ordered dataset_a < dataset_b")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score out of range: {self.score}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


def _native_cadence(series: TimeSeries) -> timedelta:
    if len(series.times) < 2:
        return timedelta(0)
    diffs = [b - a for a, b in zip(series.times, series.times[1:])]
    return statistics.median(diffs)


def _usable(series: TimeSeries) -> tuple[list, np.ndarray]:
    times = [t for i, t in enumerate(series.times) if i not in series.gaps]
    values = np.array(
        [v for i, v in enumerate(series.values) if i not in series.gaps], dtype=np.float64
    )
    return times, values


def _bin_mean(times, values, start, cadence_us: int, n_bins: int):
    sums = np.zeros(n_bins)
    counts = np.zeros(n_bins, dtype=np.int64)
    for t, v in zip(times, values):
        rel = (t - start) // _US
        if rel < 0:
            continue
        idx = rel // cadence_us
        if idx >= n_bins:
            continue
        sums[idx] += v
        counts[idx] += 1
    means = np.full(n_bins, np.nan)
    hit = counts > 0
    means[hit] = sums[hit] / counts[hit]
    return means


def _bin_nearest(times, values, start, cadence_us: int, n_bins: int, tol_us: int):
    rel = np.array([(t - start) // _US for t in times], dtype=np.int64)
    out = np.full(n_bins, np.nan)
    for k in range(n_bins):
        target = k * cadence_us
        pos = int(np.searchsorted(rel, target))
        best = None
        for cand in (pos - 1, pos):
            if 0 <= cand < len(rel):
                dist = abs(int(rel[cand]) - target)
                if dist <= tol_us and (best is None or dist < best[0]):
                    best = (dist, cand)
        if best is not None:
            out[k] = values[best[1]]
    return out


def align_series(a: TimeSeries, b: TimeSeries, spec: AlignmentSpec | None = None):
    """Resample two series onto a shared grid; returns paired value arrays.

    The grid cadence is the coarsest of the requested cadence and each
    series' native cadence (median sample spacing), so the finer series
    is aggregated rather than the coarse one interpolated.  Cells where
    either side has no usable sample are dropped.
    """
    spec = spec or AlignmentSpec()
    if not a.times or not b.times:
        raise NoOverlap("empty series")

    times_a, vals_a = _usable(a)
    times_b, vals_b = _usable(b)
    if not times_a or not times_b:
        raise NoOverlap("series contain only gaps")

    cadence = max(spec.cadence, _native_cadence(a), _native_cadence(b))
    start = max(times_a[0], times_b[0])
    end = min(times_a[-1], times_b[-1])
    if start > end:
        raise NoOverlap(f"time ranges do not intersect ({start} > {end})")

    cadence_us = cadence // _US
    n_bins = (end - start) // _US // cadence_us + 1
    if spec.aggregation == "mean":
        grid_a = _bin_mean(times_a, vals_a, start, cadence_us, n_bins)
        grid_b = _bin_mean(times_b, vals_b, start, cadence_us, n_bins)
    else:
        tol = spec.tolerance if spec.tolerance is not None else cadence / 2
        tol_us = tol // _US
        grid_a = _bin_nearest(times_a, vals_a, start, cadence_us, n_bins, tol_us)
        grid_b = _bin_nearest(times_b, vals_b, start, cadence_us, n_bins, tol_us)

    keep = ~np.isnan(grid_a) & ~np.isnan(grid_b)
    x, y = grid_a[keep], grid_b[keep]
    if len(x) < spec.min_overlap_points:
        raise NoOverlap(
            f"only {len(x)} aligned points, need {spec.min_overlap_points}"
        )
    return x, y


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient, clamped into [-1, 1]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise ValueError("inputs must be 1-D vectors of equal length")
    if len(x) < 3:
        raise ValueError("need at least 3 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(np.dot(dx, dx))
    sy = float(np.dot(dy, dy))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInput("constant vector has undefined correlation")
    r = float(np.dot(dx, dy)) / float(np.sqrt(sx) * np.sqrt(sy))
    return max(-1.0, min(1.0, r))


def _ordered(a_id: str, b_id: str) -> tuple[str, str]:
    return (a_id, b_id) if a_id < b_id else (b_id, a_id)


def compute_score_matrix(
    records: Iterable[DatasetRecord],
    loader: Callable[[DatasetRecord], TimeSeries | Histogram | None],
    alignment: AlignmentSpec | None = None,
    jobs: int = 1,
) -> list[RelatednessScore]:
    """Score every same-kind dataset pair; failures skip the pair, never abort.

    ``loader`` resolves a record to its numeric payload: a TimeSeries for
    time_series records, a Histogram for composition records, or None to
    opt the record out.  Pair computations run on up to ``jobs`` threads;
    the result list is sorted by pair, so the schedule cannot show through.
    """
    alignment = alignment or AlignmentSpec()
    series: dict[str, TimeSeries] = {}
    histograms: dict[str, Histogram] = {}
    for record in records:
        if record.data_kind not in (DataKind.TIME_SERIES, DataKind.COMPOSITION):
            continue
        try:
            payload = loader(record)
        except Exception as exc:
            log.warning("loader failed for %s: %s", record.id, exc)
            continue
        if payload is None:
            continue
        if record.data_kind is DataKind.TIME_SERIES:
            if not isinstance(payload, TimeSeries):
                log.warning("loader returned %s for %s, skipped", type(payload), record.id)
                continue
            series[record.id] = payload
        else:
            if not isinstance(payload, Histogram):
                continue
            histograms[record.id] = payload

    scores: list[RelatednessScore] = []

    ts_pairs = _sorted_pairs(series)
    def correlate(pair):
        a_id, b_id = pair
        try:
            x, y = align_series(series[a_id], series[b_id], alignment)
            r = pearson(x, y)
        except (NoOverlap, DegenerateInput) as exc:
            log.info("no pearson score for (%s, %s): %s", a_id, b_id, exc)
            return None
        return RelatednessScore(a_id, b_id, score=abs(r), method="pearson", detail=r)

    for result in _map_pairs(correlate, ts_pairs, jobs):
        if result is not None:
            scores.append(result)

    comp_pairs = _sorted_pairs(histograms)
    def distance(pair):
        a_id, b_id = pair
        try:
            return emd(histograms[a_id], histograms[b_id])
        except Exception as exc:
            log.info("no emd distance for (%s, %s): %s", a_id, b_id, exc)
            return None

    distances = list(zip(comp_pairs, _map_pairs(distance, comp_pairs, jobs)))
    valid = [d for _, d in distances if d is not None]
    if valid:
        sigma = statistics.median(valid)
        if sigma <= 0:
            # corpus of (near-)identical histograms; fall back to unit scale
            sigma = 1.0
        for (a_id, b_id), d in distances:
            if d is None:
                continue
            scores.append(
                RelatednessScore(
                    a_id, b_id, score=1.0 / (1.0 + d / sigma), method="emd", detail=d
                )
            )

    scores.sort(key=lambda s: (s.dataset_a, s.dataset_b))
    return scores


def _sorted_pairs(by_id: dict) -> list[tuple[str, str]]:
    ids = sorted(by_id)
    return [(a, b) for i, a in enumerate(ids) for b in ids[i + 1 :]]


def _map_pairs(fn, pairs, jobs: int):
    if jobs <= 1 or len(pairs) < 2:
        return [fn(p) for p in pairs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, pairs))


def top_related(
    scores: Sequence[RelatednessScore],
    dataset_id: str,
    k: int = DEFAULT_K,
    threshold: float = DEFAULT_THRESHOLD,
    known_ids: Iterable[str] | None = None,
) -> list[dict]:
    """Neighbors of a dataset at or above the score threshold, best first."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be within [0, 1]")
    if known_ids is not None and dataset_id not in set(known_ids):
        raise UnknownDataset(dataset_id)
    neighbors = []
    for s in scores:
        if s.dataset_a == dataset_id:
            other = s.dataset_b
        elif s.dataset_b == dataset_id:
            other = s.dataset_a
        else:
            continue
        if s.score >= threshold:
            neighbors.append({"id": other, "score": s.score, "method": s.method})
    neighbors.sort(key=lambda e: (-e["score"], e["id"]))
    return neighbors[:k]


_CSV_HEADER = ["dataset_a", "dataset_b", "method", "score", "detail"]


def save_scores_csv(scores: Sequence[RelatednessScore], path) -> None:
    """Write the score table as delimited text, one row per pair, sorted."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    for s in sorted(scores, key=lambda s: (s.dataset_a, s.dataset_b, s.method)):
        writer.writerow([s.dataset_a, s.dataset_b, s.method, repr(s.score), repr(s.detail)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def load_scores_csv(path) -> list[RelatednessScore]:
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != _CSV_HEADER:
        raise ValueError(f"unexpected score table header: {header}")
    scores = []
    for row in reader:
        if not row:
            continue
        a, b, method, score, detail = row
        scores.append(
            RelatednessScore(a, b, score=float(score), method=method, detail=float(detail))
        )
    return scores
