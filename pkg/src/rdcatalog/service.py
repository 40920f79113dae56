"""HTTP API over the catalog store.

All endpoints are read-only views over the store's current snapshot;
the one piece of state they touch is the access counter, which lives
beside the snapshot and survives swaps.  Each request captures the
snapshot reference once, so a swap mid-request cannot mix versions
into one response.

Downloads build the zip on disk and stream it in chunks; memory use is
bounded by one converted file, never by the archive size.
"""

from __future__ import annotations

import logging
import os
import secrets
import shutil
import tempfile
import zipfile
from datetime import datetime
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse, Response
from starlette.background import BackgroundTask

from . import convert, netcdf3, query, registry, textnet
from .fetch import FetchPolicy, FileCache, TooManyFiles, UpstreamFetchFailed, fetch_file
from .model import CatalogSnapshot, DatasetConfig, DatasetRecord, Granularity
from .relatedness import DEFAULT_K, DEFAULT_THRESHOLD, top_related
from .store import CatalogStore
from .timeutil import end_of_day, format_timestamp, parse_timestamp

log = logging.getLogger(__name__)

_ZIP_COPY_CHUNK = 64 * 1024

_IMAGE_TYPES = {
    ".png": "image/png",
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
}

DEFAULT_CHIPS = ("Meteorite Sample", "Animal Specimen", "Aurora")


def _parse_point(value: str, *, closing: bool) -> datetime:
    """A range endpoint; bare dates span their whole day on the closing side."""
    value = value.strip()
    try:
        ts = parse_timestamp(value)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=f"bad timestamp {value!r}") from exc
    if closing and len(value) == 10:
        return end_of_day(ts)
    return ts


def _localized(record: DatasetRecord, lang: str) -> dict:
    return {
        "id": record.id,
        "title": record.title.get(lang),
        "snippet": record.snippet.get(lang),
        "thumbnail": record.thumbnail,
        "discipline": list(record.discipline),
        "keywords": list(record.keywords),
        "data_kind": record.data_kind.value,
    }


def create_app(
    store: CatalogStore,
    snapshot_dir=None,
    cache_dir=None,
    policy: FetchPolicy | None = None,
    chips: tuple[str, ...] = DEFAULT_CHIPS,
    image_dir=None,
) -> FastAPI:
    """Wire the API around a store.

    ``snapshot_dir`` is where availability manifests live (under
    ``manifests/<id>.txt``); without it the calendar, download, and
    visuals endpoints see empty manifests.  ``image_dir`` is the root
    served by the image passthrough.
    """
    policy = policy or FetchPolicy()
    if cache_dir is None:
        cache_dir = Path(tempfile.mkdtemp(prefix="catalog-cache-"))
    cache = FileCache(cache_dir, policy.max_cache_size)
    snapshot_dir = Path(snapshot_dir) if snapshot_dir is not None else None
    image_root = Path(image_dir).resolve() if image_dir is not None else None

    app = FastAPI(title="research-data catalog", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def malformed_params(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc.errors()[:3])})

    def current() -> CatalogSnapshot:
        return store.snapshot()

    def get_record(snapshot: CatalogSnapshot, dataset_id: str) -> DatasetRecord:
        record = snapshot.records.get(dataset_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown dataset {dataset_id!r}")
        return record

    def get_config(snapshot: CatalogSnapshot, record: DatasetRecord) -> DatasetConfig | None:
        return snapshot.configs.get(record.config_ref)

    def load_manifest_for(record: DatasetRecord) -> registry.AvailabilityManifest:
        if snapshot_dir is not None:
            path = snapshot_dir / "manifests" / f"{record.id}.txt"
            if path.is_file():
                return registry.load_manifest(path, record.id)
        return registry.AvailabilityManifest(record.id, ())

    def check_lang(lang: str) -> str:
        if lang not in ("en", "ja"):
            raise HTTPException(status_code=400, detail=f"unsupported lang {lang!r}")
        return lang

    @app.get("/api/config")
    def api_config():
        snapshot = current()
        return {
            "chips": list(chips),
            "languages": ["en", "ja"],
            "snapshot_version": snapshot.version,
            "related_threshold": float(
                snapshot.settings.get("related_threshold", DEFAULT_THRESHOLD)
            ),
            "related_k": int(snapshot.settings.get("related_k", DEFAULT_K)),
        }

    @app.get("/api/datasets")
    def list_datasets(
        q: str = "",
        chips_param: list[str] = Query(default=[], alias="chips"),
        combine: str = "AND",
        sort: str = "random",
        seed: int | None = None,
        page: int = 1,
        page_size: int = 20,
        lang: str = "en",
    ):
        check_lang(lang)
        snapshot = current()
        try:
            search_query = query.SearchQuery(
                text=q, chips=tuple(chips_param), combine=combine, lang=lang
            )
            if sort == "random":
                issued = seed if seed is not None else secrets.randbits(32)
                order = query.SortOrder.random(issued)
            elif sort in ("access_desc", "title_asc"):
                issued = None
                order = query.SortOrder(sort)
            else:
                raise HTTPException(status_code=400, detail=f"unknown sort {sort!r}")
            result = query.search(
                snapshot,
                search_query,
                order,
                page=page,
                page_size=page_size,
                access_counts=store.access_counts(),
            )
        except (ValueError, query.InvalidPage) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        counts = store.access_counts()
        items = []
        for record in result["items"]:
            item = _localized(record, lang)
            item["access_count"] = counts.get(record.id, record.access_count)
            items.append(item)
        return {
            "total": result["total"],
            "page": page,
            "page_size": page_size,
            "sort": sort,
            "seed": issued,
            "items": items,
        }

    @app.get("/api/datasets/{dataset_id}")
    def get_dataset(dataset_id: str, lang: str = "en"):
        check_lang(lang)
        snapshot = current()
        record = get_record(snapshot, dataset_id)
        config = get_config(snapshot, record)
        count = store.record_access(dataset_id)
        doc = _localized(record, lang)
        doc.update(
            {
                "description": record.description.get(lang),
                "source_id": record.source_id,
                "source_schema": record.source_schema.value,
                "metadata_display": [list(row) for row in record.metadata_display],
                "site": (
                    {
                        "name": record.site.name,
                        "lat": record.site.latitude,
                        "lon": record.site.longitude,
                    }
                    if record.site
                    else None
                ),
                "temporal_coverage": (
                    [format_timestamp(record.temporal_coverage[0]),
                     format_timestamp(record.temporal_coverage[1])]
                    if record.temporal_coverage
                    else None
                ),
                "contacts": [
                    {
                        "role": c.role,
                        "name": c.name,
                        "affiliation": c.affiliation,
                        "email": c.email,
                    }
                    for c in record.contacts
                ],
                "access_count": count,
                "download_enabled": bool(config and config.download_enabled),
                "conversion_enabled": bool(config and config.conversion_enabled),
                "show_visualized": bool(config and config.show_visualized),
                "granularity": config.granularity.value if config else None,
            }
        )
        return doc

    @app.get("/api/datasets/{dataset_id}/available-dates")
    def available_dates(dataset_id: str, year: int, month: int):
        snapshot = current()
        record = get_record(snapshot, dataset_id)
        manifest = load_manifest_for(record)
        try:
            days = registry.available_dates(manifest, year, month)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"year": year, "month": month, "days": sorted(days)}

    @app.get("/api/datasets/{dataset_id}/download")
    def download(
        dataset_id: str,
        from_param: str = Query(alias="from"),
        to_param: str = Query(alias="to"),
        format: str = "original",
    ):
        snapshot = current()
        record = get_record(snapshot, dataset_id)
        config = get_config(snapshot, record)
        if config is None or not config.download_enabled:
            raise HTTPException(status_code=409, detail="downloads disabled for this dataset")
        if format not in ("original", "ascii"):
            raise HTTPException(status_code=400, detail=f"unknown format {format!r}")
        if format == "ascii" and not config.conversion_enabled:
            raise HTTPException(
                status_code=409, detail="plain-text conversion unavailable for this dataset"
            )
        start = _parse_point(from_param, closing=False)
        end = _parse_point(to_param, closing=True)
        manifest = load_manifest_for(record)
        try:
            entries = registry.resolve_range(config, manifest, start, end)
        except registry.InvertedRange as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        if not entries:
            raise HTTPException(
                status_code=400, detail="no files available in the selected range"
            )
        if len(entries) > policy.max_files:
            exc = TooManyFiles(len(entries), policy.max_files)
            raise HTTPException(status_code=413, detail=str(exc))

        names = [e.display_name for e in entries]
        if format == "ascii":
            names = [n.rsplit(".", 1)[0] + ".txt" if "." in n else n + ".txt" for n in names]
        names = registry.dedupe_names(names)

        tmp = tempfile.NamedTemporaryFile(suffix=".zip", delete=False)
        tmp.close()
        try:
            with zipfile.ZipFile(tmp.name, "w", zipfile.ZIP_DEFLATED) as zf:
                for entry, member_name in zip(entries, names):
                    try:
                        path = fetch_file(entry.url, policy, cache)
                    except UpstreamFetchFailed as exc:
                        raise HTTPException(status_code=502, detail=str(exc)) from exc
                    info = registry.zip_member_info(member_name, entry.timestamp)
                    if format == "ascii":
                        try:
                            dataset = netcdf3.read_self_describing(path.read_bytes())
                            text = convert.to_ascii(
                                dataset, convert.default_variable_selection(dataset)
                            )
                        except (netcdf3.FormatError, convert.ConvertError) as exc:
                            raise HTTPException(
                                status_code=502,
                                detail=f"cannot convert {entry.display_name}: {exc}",
                            ) from exc
                        zf.writestr(info, text)
                    else:
                        with open(path, "rb") as src, zf.open(info, "w") as dst:
                            shutil.copyfileobj(src, dst, _ZIP_COPY_CHUNK)
        except BaseException:
            os.unlink(tmp.name)
            raise
        archive_name = f"{dataset_id}_{from_param}_{to_param}.zip".replace("/", "-")
        return FileResponse(
            tmp.name,
            media_type="application/zip",
            filename=archive_name,
            background=BackgroundTask(os.unlink, tmp.name),
        )

    @app.get("/api/datasets/{dataset_id}/related")
    def related(dataset_id: str, limit: int | None = None, lang: str = "en"):
        check_lang(lang)
        snapshot = current()
        get_record(snapshot, dataset_id)
        threshold = float(snapshot.settings.get("related_threshold", DEFAULT_THRESHOLD))
        k = int(snapshot.settings.get("related_k", DEFAULT_K))
        if limit is not None:
            if limit < 1:
                raise HTTPException(status_code=400, detail="limit must be >= 1")
            k = limit
        entries = top_related(snapshot.scores, dataset_id, k=k, threshold=threshold)
        out = []
        for entry in entries:
            neighbor = snapshot.records.get(entry["id"])
            if neighbor is None:
                continue
            out.append(
                {
                    **entry,
                    "title": neighbor.title.get(lang),
                    "thumbnail": neighbor.thumbnail,
                }
            )
        return {"items": out}

    @app.get("/api/datasets/{dataset_id}/visuals")
    def visuals(
        dataset_id: str,
        from_param: str | None = Query(default=None, alias="from"),
        to_param: str | None = Query(default=None, alias="to"),
    ):
        snapshot = current()
        record = get_record(snapshot, dataset_id)
        config = get_config(snapshot, record)
        if config is None or not config.show_visualized:
            raise HTTPException(
                status_code=409, detail="visualized data disabled for this dataset"
            )
        template = config.visual_url_template
        if not template:
            return {"items": []}
        tokens = registry.validate_template(template)
        if config.granularity is Granularity.STATIC or not tokens:
            return {"items": [{"timestamp": None, "url": template}]}
        manifest = load_manifest_for(record)
        if not manifest.timestamps:
            return {"items": []}
        span_start, span_end = manifest.span
        start = _parse_point(from_param, closing=False) if from_param else span_start
        end = _parse_point(to_param, closing=True) if to_param else span_end
        try:
            entries = registry.resolve_range(config, manifest, start, end, template=template)
        except registry.InvertedRange as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "items": [
                {"timestamp": format_timestamp(e.timestamp), "url": e.url} for e in entries
            ]
        }

    @app.get("/api/network")
    def network():
        snapshot = current()
        if snapshot.graph is None:
            document = textnet.export_graph(
                textnet.CooccurrenceGraph(nodes=(), edges=(), total_titles=0)
            )
        else:
            document = textnet.export_graph(snapshot.graph)
        return Response(content=document, media_type="application/json")

    @app.get("/api/images/{image_path:path}")
    def image(image_path: str):
        if image_root is None:
            raise HTTPException(status_code=404, detail="no image directory configured")
        candidate = (image_root / image_path).resolve()
        if not candidate.is_relative_to(image_root):
            raise HTTPException(status_code=404, detail="image not found")
        media_type = _IMAGE_TYPES.get(candidate.suffix.lower())
        if media_type is None or not candidate.is_file():
            raise HTTPException(status_code=404, detail="image not found")
        return FileResponse(candidate, media_type=media_type)

    return app
