"""Uniform catalog record, per-dataset configuration, and snapshot types.

Every source schema is mapped onto :class:`DatasetRecord`, the single
record shape the rest of the system consumes.  A :class:`DatasetConfig`
(one YAML document per dataset, written by the data provider) declares how
granule URLs are derived from timestamps and which page features are
enabled.  A :class:`CatalogSnapshot` bundles records, configs, relatedness
scores and the title co-occurrence graph into one immutable publication
unit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import TYPE_CHECKING, Any, Mapping

import yaml

from . import registry
from .timeutil import as_utc, format_timestamp, parse_timestamp

if TYPE_CHECKING:
    from .relatedness import RelatednessScore
    from .textnet import CooccurrenceGraph

SNIPPET_MAX = 120

_SLUG_RE = re.compile(r"^[a-z0-9][a-z0-9-]*$")


class ModelError(Exception):
    pass


class ParseError(ModelError):
    """Config document is not well-formed or lacks required fields."""


class InconsistentConfig(ModelError):
    """Config fields contradict each other."""


class IntegrityError(ModelError):
    """Snapshot contains dangling references."""


class UnknownDataset(ModelError):
    pass


class SourceSchema(str, Enum):
    SPASE_IUGONET = "spase_iugonet"
    ISO19115 = "iso19115"


class DataKind(str, Enum):
    TIME_SERIES = "time_series"
    COMPOSITION = "composition"
    SPECIMEN = "specimen"
    OTHER = "other"


class Granularity(str, Enum):
    DAILY = "daily"
    HOURLY = "hourly"
    MONTHLY = "monthly"
    STATIC = "static"


class DataFormat(str, Enum):
    NETCDF = "netcdf"
    CDF = "cdf"
    OTHER = "other"


@dataclass
class LocalizedText:
    """English text with an optional Japanese parallel.

    Rendering in Japanese falls back to English when no translation
    exists, so localized output is never empty while ``en`` is set.
    """

    en: str
    ja: str | None = None

    def get(self, lang: str = "en") -> str:
        if lang == "ja" and self.ja:
            return self.ja
        return self.en

    def to_dict(self) -> dict:
        d: dict[str, str] = {"en": self.en}
        if self.ja is not None:
            d["ja"] = self.ja
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "LocalizedText":
        return cls(en=d["en"], ja=d.get("ja"))


@dataclass
class Site:
    name: str
    latitude: float | None = None
    longitude: float | None = None


@dataclass
class Contact:
    role: str
    name: str
    affiliation: str = ""
    email: str | None = None


@dataclass
class DatasetRecord:
    """The schema-independent catalog entry."""

    id: str
    source_id: str
    source_schema: SourceSchema
    title: LocalizedText
    snippet: LocalizedText
    description: LocalizedText
    config_ref: str
    discipline: list[str] = field(default_factory=list)
    data_kind: DataKind = DataKind.OTHER
    keywords: list[str] = field(default_factory=list)
    site: Site | None = None
    temporal_coverage: tuple[datetime, datetime] | None = None
    contacts: list[Contact] = field(default_factory=list)
    thumbnail: str = ""
    metadata_display: list[tuple[str, str]] = field(default_factory=list)
    access_count: int = 0

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "id": self.id,
            "source_id": self.source_id,
            "source_schema": self.source_schema.value,
            "title": self.title.to_dict(),
            "snippet": self.snippet.to_dict(),
            "description": self.description.to_dict(),
            "config_ref": self.config_ref,
            "discipline": list(self.discipline),
            "data_kind": self.data_kind.value,
            "keywords": list(self.keywords),
            "thumbnail": self.thumbnail,
            "metadata_display": [[k, v] for k, v in self.metadata_display],
            "access_count": self.access_count,
            "contacts": [
                {
                    "role": c.role,
                    "name": c.name,
                    "affiliation": c.affiliation,
                    "email": c.email,
                }
                for c in self.contacts
            ],
        }
        if self.site is not None:
            d["site"] = {
                "name": self.site.name,
                "latitude": self.site.latitude,
                "longitude": self.site.longitude,
            }
        if self.temporal_coverage is not None:
            d["temporal_coverage"] = [
                format_timestamp(self.temporal_coverage[0]),
                format_timestamp(self.temporal_coverage[1]),
            ]
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "DatasetRecord":
        site = None
        if d.get("site"):
            site = Site(
                name=d["site"]["name"],
                latitude=d["site"].get("latitude"),
                longitude=d["site"].get("longitude"),
            )
        coverage = None
        if d.get("temporal_coverage"):
            a, b = d["temporal_coverage"]
            coverage = (parse_timestamp(a), parse_timestamp(b))
        return cls(
            id=d["id"],
            source_id=d["source_id"],
            source_schema=SourceSchema(d["source_schema"]),
            title=LocalizedText.from_dict(d["title"]),
            snippet=LocalizedText.from_dict(d["snippet"]),
            description=LocalizedText.from_dict(d["description"]),
            config_ref=d["config_ref"],
            discipline=list(d.get("discipline", [])),
            data_kind=DataKind(d.get("data_kind", "other")),
            keywords=list(d.get("keywords", [])),
            site=site,
            temporal_coverage=coverage,
            contacts=[
                Contact(
                    role=c.get("role", ""),
                    name=c.get("name", ""),
                    affiliation=c.get("affiliation", ""),
                    email=c.get("email"),
                )
                for c in d.get("contacts", [])
            ],
            thumbnail=d.get("thumbnail", ""),
            metadata_display=[(k, v) for k, v in d.get("metadata_display", [])],
            access_count=int(d.get("access_count", 0)),
        )


@dataclass
class DatasetConfig:
    """Per-dataset configuration supplied by the data provider."""

    id: str
    data_url_template: str
    granularity: Granularity
    format: DataFormat = DataFormat.OTHER
    visual_url_template: str | None = None
    show_visualized: bool = True
    download_enabled: bool = True
    conversion_enabled: bool = False
    manifest_path: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "data_url_template": self.data_url_template,
            "granularity": self.granularity.value,
            "format": self.format.value,
            "visual_url_template": self.visual_url_template,
            "show_visualized": self.show_visualized,
            "download_enabled": self.download_enabled,
            "conversion_enabled": self.conversion_enabled,
            "manifest_path": self.manifest_path,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "DatasetConfig":
        return cls(
            id=d["id"],
            data_url_template=d["data_url_template"],
            granularity=Granularity(d["granularity"]),
            format=DataFormat(d.get("format", "other")),
            visual_url_template=d.get("visual_url_template"),
            show_visualized=bool(d.get("show_visualized", True)),
            download_enabled=bool(d.get("download_enabled", True)),
            conversion_enabled=bool(d.get("conversion_enabled", False)),
            manifest_path=d.get("manifest_path", ""),
        )


def load_dataset_config(document: str) -> DatasetConfig:
    """Parse one dataset-config YAML document into a validated DatasetConfig.

    Unspecified booleans default to: show_visualized=true,
    download_enabled=true, conversion_enabled=false.
    """
    try:
        raw = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed YAML: {exc}") from exc
    if not isinstance(raw, Mapping):
        raise ParseError("config document must be a YAML mapping")

    for key in ("id", "data_url_template", "granularity"):
        if key not in raw or raw[key] in (None, ""):
            raise ParseError(f"config is missing required field {key!r}")
    try:
        granularity = Granularity(str(raw["granularity"]))
    except ValueError as exc:
        raise ParseError(f"unknown granularity {raw['granularity']!r}") from exc
    try:
        fmt = DataFormat(str(raw.get("format", "other")))
    except ValueError as exc:
        raise ParseError(f"unknown format {raw['format']!r}") from exc

    cfg = DatasetConfig(
        id=str(raw["id"]),
        data_url_template=str(raw["data_url_template"]),
        granularity=granularity,
        format=fmt,
        visual_url_template=(
            str(raw["visual_url_template"])
            if raw.get("visual_url_template") not in (None, "")
            else None
        ),
        show_visualized=bool(raw.get("show_visualized", True)),
        download_enabled=bool(raw.get("download_enabled", True)),
        conversion_enabled=bool(raw.get("conversion_enabled", False)),
        manifest_path=str(raw.get("manifest_path", "") or ""),
    )
    validate_config(cfg)
    return cfg


def validate_config(cfg: DatasetConfig) -> None:
    """Raise InvalidTemplate / InconsistentConfig on a bad configuration."""
    tokens = set(registry.validate_template(cfg.data_url_template))
    if cfg.visual_url_template:
        tokens |= set(registry.validate_template(cfg.visual_url_template))

    if cfg.granularity is Granularity.STATIC and tokens & registry.TIME_TOKENS:
        raise InconsistentConfig(
            f"config {cfg.id!r}: static granularity with time tokens {sorted(tokens)}"
        )
    if cfg.granularity is Granularity.MONTHLY and tokens & {"%dd", "%HH"}:
        raise InconsistentConfig(
            f"config {cfg.id!r}: monthly granularity cannot use day/hour tokens"
        )
    if cfg.conversion_enabled and cfg.format is not DataFormat.NETCDF:
        raise InconsistentConfig(
            f"config {cfg.id!r}: conversion_enabled requires format=netcdf"
        )


@dataclass
class ValidationIssue:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


def validate_record(
    record: DatasetRecord, configs: Mapping[str, DatasetConfig] | None = None
) -> list[ValidationIssue]:
    """Check every record invariant; an empty report means the record is valid.

    ``configs`` enables the cross-reference checks (config_ref resolution,
    time-series records needing a time-granular template); pass None to
    validate the record in isolation.
    """
    issues: list[ValidationIssue] = []

    def add(code: str, message: str) -> None:
        issues.append(ValidationIssue(code, message))

    if not _SLUG_RE.match(record.id or ""):
        add("BadSlug", f"id {record.id!r} is not a lowercase URL-safe slug")
    if not record.title.en.strip():
        add("MissingTitle", "title.en must be non-empty")
    if not record.snippet.en.strip():
        add("MissingSnippet", "snippet.en must be non-empty")
    if not record.description.en.strip():
        add("MissingDescription", "description.en must be non-empty")
    for lang, text in (("en", record.snippet.en), ("ja", record.snippet.ja)):
        if text is not None and len(text) > SNIPPET_MAX:
            add(
                "SnippetTooLong",
                f"snippet.{lang} is {len(text)} chars (max {SNIPPET_MAX})",
            )
    if record.temporal_coverage is not None:
        start, end = record.temporal_coverage
        if start > end:
            add(
                "InvertedTimeSpan",
                f"coverage end {end} precedes start {start}",
            )
    if record.access_count < 0:
        add("NegativeAccessCount", f"access_count {record.access_count}")
    if record.site is not None:
        lat, lon = record.site.latitude, record.site.longitude
        if lat is not None and not -90.0 <= lat <= 90.0:
            add("BadCoordinates", f"latitude {lat} out of range")
        if lon is not None and not -180.0 <= lon <= 180.0:
            add("BadCoordinates", f"longitude {lon} out of range")

    if configs is not None:
        cfg = configs.get(record.config_ref)
        if cfg is None:
            add("UnknownConfig", f"config_ref {record.config_ref!r} does not resolve")
        elif record.data_kind is DataKind.TIME_SERIES and cfg.granularity is Granularity.STATIC:
            add(
                "NonTemporalConfig",
                "time_series record requires a time-granular template",
            )
    return issues


@dataclass
class CatalogSnapshot:
    """One immutable publication of the whole catalog."""

    records: dict[str, DatasetRecord] = field(default_factory=dict)
    configs: dict[str, DatasetConfig] = field(default_factory=dict)
    scores: list["RelatednessScore"] = field(default_factory=list)
    graph: "CooccurrenceGraph | None" = None
    version: int = 1
    settings: dict[str, Any] = field(default_factory=dict)

    def check_integrity(self) -> None:
        """Raise IntegrityError on dangling config or score references."""
        for slug, record in self.records.items():
            if record.id != slug:
                raise IntegrityError(f"record keyed {slug!r} carries id {record.id!r}")
            if record.config_ref not in self.configs:
                raise IntegrityError(
                    f"record {slug!r} references missing config {record.config_ref!r}"
                )
        for score in self.scores:
            for ref in (score.dataset_a, score.dataset_b):
                if ref not in self.records:
                    raise IntegrityError(f"score references missing dataset {ref!r}")


def slugify(text: str) -> str:
    """Lowercase and map non-alphanumeric runs to single hyphens."""
    slug = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")
    return slug or "dataset"
