from datetime import datetime, timezone

import pytest

from helpers import iso_doc, spase_doc
from rdcatalog.ingest import (
    IngestOptions,
    MissingRequired,
    UnsupportedRoot,
    XmlError,
    detect_schema,
    ingest_directory,
    load_mapping_table,
    parse_document,
    parse_iso19115,
    parse_spase,
)
from rdcatalog.model import DataKind, SourceSchema, validate_record

UTC = timezone.utc


# -- schema detection ----------------------------------------------------------


def test_detects_spase_by_namespace():
    assert detect_schema(spase_doc()) is SourceSchema.SPASE_IUGONET


def test_detects_iso_by_namespace():
    assert detect_schema(iso_doc()) is SourceSchema.ISO19115


def test_detect_rejects_unknown_root():
    with pytest.raises(UnsupportedRoot):
        detect_schema("<catalog><entry/></catalog>")


def test_detect_rejects_malformed_xml():
    with pytest.raises(XmlError):
        detect_schema("<Spase><unclosed></Spase")


# -- SPASE parsing ---------------------------------------------------------------


def test_spase_minimal_fixture_maps_title_and_coverage():
    record = parse_spase(
        spase_doc(
            source_id="spase://IUGONET/NumericalData/SYO/mag",
            title="Syowa magnetometer",
            start="2019-01-01T00:00:00",
            stop="2019-12-31T00:00:00",
        )
    )
    assert record.title.en == "Syowa magnetometer"
    assert record.source_id == "spase://IUGONET/NumericalData/SYO/mag"
    assert record.temporal_coverage == (
        datetime(2019, 1, 1, tzinfo=UTC),
        datetime(2019, 12, 31, tzinfo=UTC),
    )
    assert record.source_schema is SourceSchema.SPASE_IUGONET
    assert record.data_kind is DataKind.TIME_SERIES
    assert record.id == "spase-iugonet-numericaldata-syo-mag"
    assert record.keywords == ["aurora", "magnetometer"]


def test_spase_missing_resource_name_raises():
    with pytest.raises(MissingRequired) as err:
        parse_spase(spase_doc(omit_resource_name=True))
    assert err.value.field_name == "title"


def test_spase_contacts_preserve_document_order():
    record = parse_spase(
        spase_doc(
            contacts=(
                ("PrincipalInvestigator", "spase://SMWG/Person/First.Person"),
                ("CoInvestigator", "spase://SMWG/Person/Second.Person"),
            )
        )
    )
    assert [c.role for c in record.contacts] == [
        "PrincipalInvestigator",
        "CoInvestigator",
    ]
    assert [c.name for c in record.contacts] == ["First.Person", "Second.Person"]


def test_spase_japanese_title_maps_to_ja():
    record = parse_spase(spase_doc(ja_title="昭和基地磁力計"))
    assert record.title.ja == "昭和基地磁力計"
    assert record.title.en == "Syowa magnetometer"


def test_spase_display_data_is_not_time_series():
    record = parse_spase(spase_doc(resource_kind="DisplayData"))
    assert record.data_kind is DataKind.OTHER


def test_spase_metadata_display_rows():
    record = parse_spase(spase_doc())
    labels = [label for label, _ in record.metadata_display]
    assert labels[0] == "Resource ID"
    assert "Observed region" in labels
    assert "Instrument" in labels


def test_spase_snippet_is_capped():
    record = parse_spase(spase_doc(description="word " * 100))
    assert len(record.snippet.en) <= 120


# -- ISO parsing -------------------------------------------------------------------


def test_iso_minimal_fixture_with_kind_override():
    doc = iso_doc(file_identifier="nipr:ads:penguin-001", title="Adelie penguin specimen")
    options = IngestOptions(kind_overrides={"nipr:ads:penguin-001": DataKind.SPECIMEN})
    record = parse_iso19115(doc, options)
    assert record.title.en == "Adelie penguin specimen"
    assert record.data_kind is DataKind.SPECIMEN
    assert record.source_schema is SourceSchema.ISO19115


def test_iso_without_abstract_falls_back_to_title():
    record = parse_iso19115(iso_doc(abstract=None))
    assert record.description.en == record.title.en


def test_iso_begin_only_coverage_degenerates():
    record = parse_iso19115(iso_doc(begin="2019-11-01", end=None))
    begin = datetime(2019, 11, 1, tzinfo=UTC)
    assert record.temporal_coverage == (begin, begin)


def test_iso_site_and_topic_mapping():
    record = parse_iso19115(iso_doc(site="Syowa Station", topic="biota"))
    assert record.site is not None
    assert record.site.name == "Syowa Station"
    assert record.discipline == ["biota"]


def test_iso_contact_mapping():
    record = parse_iso19115(iso_doc(contact_name="A. Researcher", organisation="NIPR"))
    assert record.contacts
    assert record.contacts[0].name == "A. Researcher"
    assert record.contacts[0].affiliation == "NIPR"
    assert record.contacts[0].role == "pointOfContact"


def test_iso_missing_title_raises():
    with pytest.raises(MissingRequired):
        parse_iso19115(iso_doc(omit_title=True))


def test_iso_thumbnail_mapping():
    record = parse_iso19115(iso_doc(thumbnail="https://h/thumbs/p.png"))
    assert record.thumbnail == "https://h/thumbs/p.png"


# -- cross-cutting -------------------------------------------------------------------


def test_parse_determinism():
    doc = spase_doc()
    assert parse_document(doc) == parse_document(doc)


def test_every_parsed_record_validates_cleanly():
    for doc in (spase_doc(), iso_doc(), spase_doc(resource_kind="DisplayData")):
        record = parse_document(doc)
        assert validate_record(record) == [], record.id


def test_mapping_table_loads_and_covers_required():
    table = load_mapping_table()
    for schema in ("spase_iugonet", "iso19115"):
        fields = {row.field for row in table.rows[schema] if row.required}
        assert {"source_id", "title"} <= fields


# -- directory ingestion ---------------------------------------------------------------


def test_ingest_directory_mixed_corpus(tmp_path):
    (tmp_path / "a.xml").write_text(spase_doc(source_id="spase://X/NumericalData/A"), encoding="utf-8")
    (tmp_path / "b.xml").write_text(spase_doc(source_id="spase://X/NumericalData/B"), encoding="utf-8")
    (tmp_path / "c.xml").write_text(iso_doc(file_identifier="nipr:ads:c"), encoding="utf-8")
    records, failures = ingest_directory(tmp_path)
    assert failures == []
    assert len(records) == 3
    assert [r.id for r in records] == sorted(r.id for r in records)


def test_ingest_directory_isolates_malformed_file(tmp_path):
    (tmp_path / "a.xml").write_text(spase_doc(source_id="spase://X/NumericalData/A"), encoding="utf-8")
    (tmp_path / "bad.xml").write_text("<Spase><broken", encoding="utf-8")
    (tmp_path / "c.xml").write_text(iso_doc(), encoding="utf-8")
    records, failures = ingest_directory(tmp_path)
    assert len(records) == 2
    assert len(failures) == 1
    assert failures[0].path.endswith("bad.xml")


def test_ingest_directory_suffixes_slug_collisions(tmp_path):
    doc = spase_doc(source_id="spase://X/NumericalData/Same")
    (tmp_path / "a.xml").write_text(doc, encoding="utf-8")
    (tmp_path / "b.xml").write_text(doc, encoding="utf-8")
    records, failures = ingest_directory(tmp_path)
    assert failures == []
    slugs = sorted(r.id for r in records)
    assert slugs == ["spase-x-numericaldata-same", "spase-x-numericaldata-same-2"]
    for record in records:
        assert record.config_ref == record.id


def test_ingest_directory_rejects_missing_path(tmp_path):
    with pytest.raises(OSError):
        ingest_directory(tmp_path / "nope")
