"""Multidisciplinary research-data catalog: ingest, score, search, serve."""

try:
    from importlib.metadata import PackageNotFoundError, version
except ImportError:  # pragma: no cover
    PackageNotFoundError = Exception  # type: ignore[assignment]
    version = None  # type: ignore[assignment]

try:
    __version__ = version("rdcatalog") if version else "0.0.0"
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

from .model import (  # noqa: E402
    CatalogSnapshot,
    Contact,
    DataFormat,
    DataKind,
    DatasetConfig,
    DatasetRecord,
    Granularity,
    LocalizedText,
    Site,
    SourceSchema,
)

__all__ = [
    "__version__",
    "CatalogSnapshot",
    "Contact",
    "DataFormat",
    "DataKind",
    "DatasetConfig",
    "DatasetRecord",
    "Granularity",
    "LocalizedText",
    "Site",
    "SourceSchema",
]
