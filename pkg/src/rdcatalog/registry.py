"""Granule registry: filename templates, availability manifests, zip packaging.

Data files live in remote repositories and are addressed by URL templates
with date tokens (``%YYYY``, ``%YY``, ``%mm``, ``%dd``, ``%HH``).  Which
granules actually exist is declared by a curator-supplied availability
manifest: a plain-text file with one ISO 8601 timestamp per line.
"""

from __future__ import annotations

import posixpath
import zipfile
from dataclasses import dataclass, field
from datetime import datetime
from io import BytesIO
from typing import TYPE_CHECKING, Iterable, Sequence
from urllib.parse import urlsplit

from .timeutil import as_utc, parse_timestamp

if TYPE_CHECKING:
    from .model import DatasetConfig

#: Recognised template tokens, longest first so %YYYY wins over %YY.
TEMPLATE_TOKENS = ("%YYYY", "%YY", "%mm", "%dd", "%HH")

#: Tokens that encode a time field (all of them, today).
TIME_TOKENS = frozenset(TEMPLATE_TOKENS)


class RegistryError(Exception):
    pass


class InvalidTemplate(RegistryError):
    pass


class InvertedRange(RegistryError):
    pass


class EmptySelection(RegistryError):
    pass


def validate_template(template: str) -> list[str]:
    """Return the tokens used by ``template``, rejecting unknown % sequences."""
    tokens = []
    i = 0
    while i < len(template):
        if template[i] != "%":
            i += 1
            continue
        for tok in TEMPLATE_TOKENS:
            if template.startswith(tok, i):
                tokens.append(tok)
                i += len(tok)
                break
        else:
            raise InvalidTemplate(
                f"unknown token at position {i} in template {template!r}"
            )
    return tokens


def expand_template(template: str, ts: datetime) -> str:
    """Substitute zero-padded date fields of ``ts`` into ``template``.

    Non-token text passes through verbatim.  The template must have been
    validated; an unknown % sequence here raises InvalidTemplate.
    """
    ts = as_utc(ts)
    out = []
    i = 0
    while i < len(template):
        ch = template[i]
        if ch != "%":
            out.append(ch)
            i += 1
            continue
        if template.startswith("%YYYY", i):
            out.append(f"{ts.year:04d}")
            i += 5
        elif template.startswith("%YY", i):
            out.append(f"{ts.year % 100:02d}")
            i += 3
        elif template.startswith("%mm", i):
            out.append(f"{ts.month:02d}")
            i += 3
        elif template.startswith("%dd", i):
            out.append(f"{ts.day:02d}")
            i += 3
        elif template.startswith("%HH", i):
            out.append(f"{ts.hour:02d}")
            i += 3
        else:
            raise InvalidTemplate(
                f"unknown token at position {i} in template {template!r}"
            )
    return "".join(out)


def truncate_to_granularity(ts: datetime, granularity: str) -> datetime:
    """Truncate a timestamp to the resolution of the dataset granularity."""
    ts = as_utc(ts)
    if granularity == "hourly":
        return ts.replace(minute=0, second=0, microsecond=0)
    if granularity == "daily":
        return ts.replace(hour=0, minute=0, second=0, microsecond=0)
    if granularity == "monthly":
        return ts.replace(day=1, hour=0, minute=0, second=0, microsecond=0)
    if granularity == "static":
        return ts.replace(hour=0, minute=0, second=0, microsecond=0)
    raise ValueError(f"unknown granularity {granularity!r}")


@dataclass
class AvailabilityManifest:
    """Sorted, de-duplicated timestamps for which a dataset granule exists."""

    dataset_id: str
    timestamps: tuple[datetime, ...] = ()

    def __post_init__(self):
        ts = tuple(as_utc(t) for t in self.timestamps)
        for a, b in zip(ts, ts[1:]):
            if a >= b:
                raise ValueError("manifest timestamps must be strictly increasing")
        self.timestamps = ts

    @property
    def span(self) -> tuple[datetime, datetime] | None:
        if not self.timestamps:
            return None
        return self.timestamps[0], self.timestamps[-1]


def load_manifest(path, dataset_id: str = "") -> AvailabilityManifest:
    """Load a manifest file: one ISO 8601 timestamp per line, # comments allowed."""
    stamps = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            stamps.add(parse_timestamp(line))
    return AvailabilityManifest(dataset_id, tuple(sorted(stamps)))


def save_manifest(manifest: AvailabilityManifest, path) -> None:
    from .timeutil import format_timestamp

    with open(path, "w", encoding="utf-8") as fh:
        for ts in manifest.timestamps:
            fh.write(format_timestamp(ts) + "\n")


@dataclass
class FileEntry:
    """A concrete granule: truncated timestamp, resolved URL, display name."""

    timestamp: datetime
    url: str
    display_name: str


def _display_name(url: str) -> str:
    name = posixpath.basename(urlsplit(url).path)
    return name or url.rstrip("/").rsplit("/", 1)[-1]


def resolve_range(
    config: "DatasetConfig",
    manifest: AvailabilityManifest,
    start: datetime,
    end: datetime,
    template: str | None = None,
) -> list[FileEntry]:
    """Expand one FileEntry per manifest timestamp within [start, end].

    Timestamps are truncated to the dataset granularity before expansion;
    several manifest entries collapsing onto one granule yield one entry.
    ``template`` overrides the data URL template (used for visuals).
    """
    start, end = as_utc(start), as_utc(end)
    if start > end:
        raise InvertedRange(f"range start {start} is after end {end}")
    tmpl = template if template is not None else config.data_url_template
    if not tmpl:
        return []
    entries: list[FileEntry] = []
    seen = set()
    for ts in manifest.timestamps:
        if ts < start or ts > end:
            continue
        slot = truncate_to_granularity(ts, config.granularity.value)
        if slot in seen:
            continue
        seen.add(slot)
        url = expand_template(tmpl, slot)
        entries.append(FileEntry(slot, url, _display_name(url)))
    entries.sort(key=lambda e: e.timestamp)
    return entries


def available_dates(manifest: AvailabilityManifest, year: int, month: int) -> set[int]:
    """Days of (year, month) on which at least one granule exists."""
    if not 1 <= month <= 12:
        raise ValueError(f"month out of range: {month}")
    return {
        ts.day
        for ts in manifest.timestamps
        if ts.year == year and ts.month == month
    }


@dataclass
class ZipEntry:
    display_name: str
    content: bytes
    timestamp: datetime | None = None


def dedupe_names(names: Iterable[str]) -> list[str]:
    # duplicate display names get -2, -3, ... before the extension
    out: list[str] = []
    used: set[str] = set()
    counts: dict[str, int] = {}
    for name in names:
        candidate = name
        while candidate in used:
            counts[name] = counts.get(name, 1) + 1
            stem, dot, ext = name.rpartition(".")
            if dot:
                candidate = f"{stem}-{counts[name]}.{ext}"
            else:
                candidate = f"{name}-{counts[name]}"
        used.add(candidate)
        out.append(candidate)
    return out


def package_zip(entries: Sequence[ZipEntry]) -> bytes:
    """Build a zip archive from in-memory entries, ordered by timestamp.

    Member modification times mirror the entry timestamps (zip cannot
    represent pre-1980 times; older stamps clamp to 1980-01-01).
    Extraction reproduces every content byte-for-byte.
    """
    if not entries:
        raise EmptySelection("no files selected")
    # sort by timestamp; entries without one keep input order at the end
    ordered = sorted(
        enumerate(entries),
        key=lambda pair: (pair[1].timestamp is None, pair[1].timestamp or datetime.min, pair[0]),
    )
    names = dedupe_names(e.display_name for _, e in ordered)
    buf = BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        for name, (_, entry) in zip(names, ordered):
            zf.writestr(zip_member_info(name, entry.timestamp), entry.content)
    return buf.getvalue()


def zip_member_info(name: str, timestamp: datetime | None) -> zipfile.ZipInfo:
    """Deflated ZipInfo stamped with the timestamp (zip times floor at 1980)."""
    if timestamp is not None and as_utc(timestamp).year >= 1980:
        ts = as_utc(timestamp)
        date_time = (ts.year, ts.month, ts.day, ts.hour, ts.minute, ts.second)
    else:
        date_time = (1980, 1, 1, 0, 0, 0)
    info = zipfile.ZipInfo(name, date_time=date_time)
    info.compress_type = zipfile.ZIP_DEFLATED
    return info
