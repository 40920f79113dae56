#!/usr/bin/env python3
"""Record API responses for the web UI's contract tests.

Builds a small demonstration catalog, serves it with the real backend
in-process, and dumps each response the UI exercises into
tests/fixtures/*.json as {"status": ..., "body": ...}. Rerun after any
API change so the stub stays honest:

    python3 scripts/record_fixtures.py
"""
from __future__ import annotations

import json
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from fastapi.testclient import TestClient

from rdcatalog.model import (
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
from rdcatalog.registry import AvailabilityManifest, save_manifest
from rdcatalog.relatedness import RelatednessScore
from rdcatalog.service import create_app
from rdcatalog.store import CatalogStore, save_snapshot
from rdcatalog.textnet import build_cooccurrence, make_tokenizer

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

UTC = timezone.utc


def record(slug, schema, title, ja, snippet, description, *, kind, discipline,
           keywords, site=None, coverage=None, contacts=(), thumbnail="",
           metadata=(), access=0):
    return DatasetRecord(
        id=slug,
        source_id=f"demo:{slug}",
        source_schema=schema,
        title=LocalizedText(title, ja),
        snippet=LocalizedText(snippet),
        description=LocalizedText(description),
        config_ref=slug,
        discipline=list(discipline),
        data_kind=kind,
        keywords=list(keywords),
        site=site,
        temporal_coverage=coverage,
        contacts=list(contacts),
        thumbnail=thumbnail,
        metadata_display=list(metadata),
        access_count=access,
    )


def build_corpus():
    records = [
        record(
            "syowa-magnetometer", SourceSchema.SPASE_IUGONET,
            "Fluxgate Magnetometer Observations at Syowa Station",
            "昭和基地フラックスゲート磁力計観測",
            "One-second geomagnetic field vectors from the fluxgate magnetometer at Syowa Station.",
            "Continuous three-component geomagnetic field measurements recorded at Syowa Station, "
            "Antarctica. The fluxgate magnetometer samples at one second cadence and the archive "
            "is repackaged into daily files. Useful for auroral electrojet and substorm studies.",
            kind=DataKind.TIME_SERIES,
            discipline=["Space and Upper Atmospheric Sciences"],
            keywords=["aurora", "magnetometer", "geomagnetism"],
            site=Site("Syowa Station", -69.0064, 39.59),
            coverage=(datetime(2024, 4, 1, tzinfo=UTC), datetime(2024, 4, 5, 23, 59, 59, tzinfo=UTC)),
            contacts=[Contact("PI", "Akira Sato", "National Institute of Polar Research", "sato@example.org")],
            thumbnail="syowa-magnetometer/card.png",
            metadata=[("Instrument", "Fluxgate magnetometer"), ("Cadence", "1 s"),
                      ("File format", "NetCDF classic")],
            access=412,
        ),
        record(
            "riometer-syowa", SourceSchema.SPASE_IUGONET,
            "Imaging Riometer Ionospheric Absorption at Syowa Station",
            None,
            "Cosmic noise absorption maps from the 38.2 MHz imaging riometer at Syowa Station.",
            "Ionospheric absorption derived from cosmic radio noise at 38.2 MHz. The imaging "
            "riometer resolves an 8 by 8 beam grid over Syowa Station and complements the "
            "magnetometer during auroral precipitation events.",
            kind=DataKind.TIME_SERIES,
            discipline=["Space and Upper Atmospheric Sciences"],
            keywords=["riometer", "ionosphere", "aurora"],
            site=Site("Syowa Station", -69.0064, 39.59),
            coverage=(datetime(2024, 4, 1, tzinfo=UTC), datetime(2024, 4, 30, 23, 59, 59, tzinfo=UTC)),
            contacts=[Contact("PI", "Akira Sato", "National Institute of Polar Research", "sato@example.org")],
            thumbnail="riometer-syowa/card.png",
            metadata=[("Instrument", "Imaging riometer"), ("Frequency", "38.2 MHz")],
            access=218,
        ),
        record(
            "aurora-allsky-camera", SourceSchema.SPASE_IUGONET,
            "All-Sky Camera Aurora Images at Syowa Station",
            "昭和基地全天カメラオーロラ画像",
            "Color all-sky images of the aurora captured each clear winter night at Syowa Station.",
            "Night-time all-sky camera imagery of auroral displays over Syowa Station. Frames are "
            "exposed every ten seconds during dark hours and bundled per night.",
            kind=DataKind.OTHER,
            discipline=["Space and Upper Atmospheric Sciences"],
            keywords=["aurora", "imaging", "optical"],
            site=Site("Syowa Station", -69.0064, 39.59),
            coverage=(datetime(2023, 3, 1, tzinfo=UTC), datetime(2023, 9, 30, 23, 59, 59, tzinfo=UTC)),
            thumbnail="aurora-allsky-camera/card.png",
            metadata=[("Instrument", "All-sky color camera"), ("Exposure", "10 s")],
            access=390,
        ),
        record(
            "dome-ice-core", SourceSchema.ISO19115,
            "Dome Fuji Ice Core Chemical Composition",
            "ドームふじ氷床コア化学組成",
            "Major ion and isotope composition along the Dome Fuji deep ice core.",
            "Chemical composition profiles measured on the Dome Fuji deep ice core, including "
            "major ions and stable water isotopes. Depth-resolved tables cover the full core.",
            kind=DataKind.COMPOSITION,
            discipline=["Polar Science", "Glaciology"],
            keywords=["ice core", "chemistry", "isotope"],
            site=Site("Dome Fuji", -77.3088, 39.7031),
            coverage=(datetime(1995, 1, 1, tzinfo=UTC), datetime(2007, 12, 31, tzinfo=UTC)),
            contacts=[Contact("Curator", "Haruka Mori", "National Institute of Polar Research", None)],
            metadata=[("Core depth", "3035 m"), ("Sampling", "50 cm resolution")],
            access=77,
        ),
        record(
            "meteorite-catalog", SourceSchema.ISO19115,
            "Antarctic Meteorite Specimen Catalog",
            "南極隕石標本カタログ",
            "Classification records for meteorite specimens recovered from the Antarctic ice sheet.",
            "Curated catalog of meteorite specimens collected on the Antarctic ice sheet, with "
            "classification, mass, and recovery-site records for each specimen.",
            kind=DataKind.SPECIMEN,
            discipline=["Polar Science"],
            keywords=["Meteorite Sample", "mineralogy"],
            metadata=[("Specimens", "17402"), ("Collection", "JARE")],
            access=160,
        ),
        record(
            "penguin-census", SourceSchema.ISO19115,
            "Adelie Penguin Breeding Census near Syowa Station",
            "昭和基地周辺アデリーペンギン営巣調査",
            "Annual breeding pair counts at Adelie penguin rookeries on the Soya Coast.",
            "Annual census of Adelie penguin breeding pairs at rookeries around Syowa Station. "
            "Counts are made photographically during the incubation period each November.",
            kind=DataKind.SPECIMEN,
            discipline=["Bioscience"],
            keywords=["Animal Specimen", "ecology", "penguin"],
            site=Site("Soya Coast", -69.02, 39.55),
            coverage=(datetime(2010, 11, 1, tzinfo=UTC), datetime(2023, 11, 30, tzinfo=UTC)),
            metadata=[("Survey window", "November"), ("Method", "Aerial photography")],
            access=54,
        ),
    ]

    configs = [
        DatasetConfig(
            id="syowa-magnetometer",
            data_url_template="https://data.example.org/mag/%YYYY/%mm/syowa-%YYYY%mm%dd.nc",
            granularity=Granularity.DAILY,
            format=DataFormat.NETCDF,
            visual_url_template="https://data.example.org/mag/plots/keogram-%YYYY%mm%dd.png",
            show_visualized=True,
            download_enabled=True,
            conversion_enabled=True,
        ),
        DatasetConfig(
            id="riometer-syowa",
            data_url_template="https://data.example.org/rio/%YYYY/syowa-rio-%YYYY%mm%dd.nc",
            granularity=Granularity.DAILY,
            format=DataFormat.NETCDF,
            show_visualized=False,
            download_enabled=True,
        ),
        DatasetConfig(
            id="aurora-allsky-camera",
            data_url_template="https://data.example.org/asc/%YYYY%mm/night-%YYYY%mm%dd.tar",
            granularity=Granularity.DAILY,
            show_visualized=False,
            download_enabled=False,
        ),
        DatasetConfig(
            id="dome-ice-core",
            data_url_template="https://data.example.org/icecore/dome-fuji-composition.csv",
            granularity=Granularity.STATIC,
            show_visualized=False,
            download_enabled=False,
        ),
        DatasetConfig(
            id="meteorite-catalog",
            data_url_template="https://data.example.org/meteorites/catalog.csv",
            granularity=Granularity.STATIC,
            show_visualized=False,
            download_enabled=False,
        ),
        DatasetConfig(
            id="penguin-census",
            data_url_template="https://data.example.org/penguin/census.csv",
            granularity=Granularity.STATIC,
            show_visualized=False,
            download_enabled=False,
        ),
    ]

    scores = [
        RelatednessScore("riometer-syowa", "syowa-magnetometer", 0.91, "pearson", 0.91),
        RelatednessScore("aurora-allsky-camera", "dome-ice-core", 0.22, "pearson", 0.22),
    ]

    titles = [r.title.en for r in records]
    graph = build_cooccurrence(titles, tokenizer=make_tokenizer(), min_count=1, min_co=1)

    return CatalogSnapshot(
        records={r.id: r for r in records},
        configs={c.id: c for c in configs},
        scores=scores,
        graph=graph,
        version=1,
    )


def dump(client: TestClient, name: str, path: str, params=None):
    response = client.get(path, params=params)
    payload = {"status": response.status_code, "body": response.json()}
    out = FIXTURES / f"{name}.json"
    out.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"  {name}.json <- {response.status_code} {path}")


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    snapshot = build_corpus()

    with tempfile.TemporaryDirectory() as tmp:
        snap_dir = Path(tmp) / "snapshot"
        save_snapshot(snapshot, snap_dir)
        manifest_dir = snap_dir / "manifests"
        manifest_dir.mkdir()
        save_manifest(
            AvailabilityManifest("syowa-magnetometer", (
                datetime(2024, 4, 1, tzinfo=UTC),
                datetime(2024, 4, 2, tzinfo=UTC),
                datetime(2024, 4, 5, tzinfo=UTC),
            )),
            manifest_dir / "syowa-magnetometer.txt",
        )
        save_manifest(
            AvailabilityManifest("riometer-syowa", tuple(
                datetime(2024, 4, d, tzinfo=UTC) for d in range(1, 31)
            )),
            manifest_dir / "riometer-syowa.txt",
        )

        store = CatalogStore()
        store.swap_snapshot(snapshot)
        app = create_app(store, snapshot_dir=snap_dir)
        client = TestClient(app)

        base = {"combine": "AND", "sort": "random", "page": 1, "page_size": 20, "lang": "en"}

        dump(client, "config", "/api/config")

        first = client.get("/api/datasets", params=base)
        seed = first.json()["seed"]
        (FIXTURES / "datasets_first_load.json").write_text(
            json.dumps({"status": first.status_code, "body": first.json()},
                       indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        print(f"  datasets_first_load.json <- {first.status_code} (seed {seed})")

        dump(client, "datasets_seeded", "/api/datasets", {**base, "seed": seed})
        dump(client, "datasets_or", "/api/datasets", {**base, "combine": "OR", "seed": seed})
        dump(client, "datasets_q_aurora", "/api/datasets", {**base, "q": "aurora"})
        dump(client, "datasets_deeplink", "/api/datasets", {
            "q": "ice", "chips": ["Aurora"], "combine": "OR", "sort": "title_asc",
            "page": 1, "page_size": 20, "lang": "ja",
        })
        dump(client, "datasets_empty", "/api/datasets", {
            "q": "driftwood", "combine": "AND", "sort": "title_asc",
            "page": 1, "page_size": 20, "lang": "en",
        })

        dump(client, "dataset_syowa", "/api/datasets/syowa-magnetometer", {"lang": "en"})
        dump(client, "dataset_riometer", "/api/datasets/riometer-syowa", {"lang": "en"})
        dump(client, "dataset_missing", "/api/datasets/missing-dataset", {"lang": "en"})

        for month in (3, 4, 5):
            dump(client, f"dates_2024_{month:02d}",
                 "/api/datasets/syowa-magnetometer/available-dates",
                 {"year": 2024, "month": month})

        dump(client, "related_syowa", "/api/datasets/syowa-magnetometer/related", {"lang": "en"})
        dump(client, "related_riometer", "/api/datasets/riometer-syowa/related", {"lang": "en"})
        dump(client, "visuals_syowa", "/api/datasets/syowa-magnetometer/visuals")
        dump(client, "network", "/api/network")

        # a catalog that has not published a co-occurrence graph yet
        bare = build_corpus()
        bare.graph = None
        bare_store = CatalogStore()
        bare_store.swap_snapshot(bare)
        bare_client = TestClient(create_app(bare_store))
        dump(bare_client, "network_empty", "/api/network")

    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
