"""Source metadata ingestion: two XML schemas in, uniform records out.

The mapping from source elements to record fields is data, not code: a
mapping table (``data/mappings.yaml``) lists {path, field, transform}
rows per schema, with transforms registered below.  Parsing works on a
namespace-stripped element tree so curator documents survive namespace
prefix and version churn.
"""

from __future__ import annotations

import textwrap
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping

import yaml

from .model import (
    Contact,
    DataKind,
    DatasetRecord,
    LocalizedText,
    Site,
    SourceSchema,
    slugify,
)
from .timeutil import parse_timestamp

XML_LANG = "lang"  # after namespace stripping, {xml ns}lang becomes plain "lang"

#: SPASE resource elements we accept as a catalog entry.
SPASE_RESOURCE_KINDS = {
    "NumericalData": DataKind.TIME_SERIES,
    "DisplayData": DataKind.OTHER,
    "Catalog": DataKind.OTHER,
    "Granule": DataKind.OTHER,
}


class IngestError(Exception):
    pass


class XmlError(IngestError):
    pass


class UnsupportedRoot(IngestError):
    pass


class MissingRequired(IngestError):
    def __init__(self, field_name: str):
        super().__init__(f"required field {field_name!r} could not be mapped")
        self.field_name = field_name


class MappingError(IngestError):
    """The mapping table itself is invalid."""


@dataclass
class MappingRow:
    path: str
    field: str
    transform: str
    required: bool = False
    label: str | None = None


@dataclass
class MappingTable:
    """Per-schema element-to-field mapping rows."""

    version: int
    rows: dict[str, list[MappingRow]]

    def for_schema(self, schema: SourceSchema) -> list[MappingRow]:
        return self.rows[schema.value]


@dataclass
class IngestOptions:
    """Per-run knobs: forced data kinds and slug overrides by source id."""

    kind_overrides: dict[str, DataKind] = field(default_factory=dict)
    slug_overrides: dict[str, str] = field(default_factory=dict)


@dataclass
class IngestFailure:
    path: str
    error: str


# -- transforms --------------------------------------------------------------


def _strip_namespaces(root: ET.Element) -> ET.Element:
    for el in root.iter():
        if "}" in el.tag:
            el.tag = el.tag.rsplit("}", 1)[1]
        el.attrib = {
            (k.rsplit("}", 1)[1] if "}" in k else k): v for k, v in el.attrib.items()
        }
    return root


def _text_of(el: ET.Element) -> str:
    """Element text, or the text of a CharacterString/URL wrapper child."""
    if el.text and el.text.strip():
        return el.text.strip()
    for child in el:
        if child.tag in ("CharacterString", "URL", "Date", "DateTime") and child.text:
            return child.text.strip()
    # code lists often carry the value as an attribute
    if el.attrib.get("codeListValue"):
        return el.attrib["codeListValue"]
    return ""


def _tr_text(elements, root):
    for el in elements:
        value = _text_of(el)
        if value:
            return value
    return None


def _tr_text_list(elements, root):
    values = []
    for el in elements:
        value = _text_of(el)
        if value and value not in values:
            values.append(value)
    return values


def _tr_localized_text(elements, root):
    en, ja = None, None
    for el in elements:
        lang = el.attrib.get(XML_LANG, "").lower()
        value = _text_of(el)
        if not value:
            continue
        if lang.startswith("ja"):
            ja = ja or value
        elif en is None:
            en = value
        # ISO locale mechanism: a LocalisedCharacterString sibling/descendant
        for loc in el.iter("LocalisedCharacterString"):
            locale = (loc.attrib.get("locale", "") + loc.attrib.get(XML_LANG, "")).lower()
            if "ja" in locale and loc.text and loc.text.strip():
                ja = ja or loc.text.strip()
    if en is None:
        return None
    return LocalizedText(en=en, ja=ja)


def _tr_spase_contacts(elements, root):
    contacts = []
    for el in elements:
        role = ""
        for r in el.iter("Role"):
            if r.text and r.text.strip():
                role = r.text.strip()
                break
        name = _first_text(el, "Name")
        person = _first_text(el, "PersonID")
        if not name and person:
            # spase://.../Person/Some.Name -> "Some.Name"
            name = person.rstrip("/").rsplit("/", 1)[-1]
        contacts.append(
            Contact(
                role=role,
                name=name or "",
                affiliation=_first_text(el, "Affiliation") or "",
                email=_first_text(el, "Email") or None,
            )
        )
    return contacts


def _tr_iso_contacts(elements, root):
    contacts = []
    for el in elements:
        name = _first_text(el, "individualName") or _first_text(el, "organisationName")
        role = ""
        for r in el.iter("CI_RoleCode"):
            role = _text_of(r)
            if role:
                break
        contacts.append(
            Contact(
                role=role,
                name=name or "",
                affiliation=_first_text(el, "organisationName") or "",
                email=_first_text(el, "electronicMailAddress") or None,
            )
        )
    return contacts


def _tr_time_span(elements, root):
    for el in elements:
        start = _first_text(el, "StartDate")
        stop = _first_text(el, "StopDate")
        if start:
            begin = parse_timestamp(start)
            end = parse_timestamp(stop) if stop else begin
            return (begin, end)
    return None


def _tr_time_period(elements, root):
    for el in elements:
        begin = _first_text(el, "beginPosition") or _first_text(el, "timePosition")
        end = _first_text(el, "endPosition")
        if begin:
            b = parse_timestamp(begin)
            e = parse_timestamp(end) if end else b
            return (b, e)
    return None


def _tr_iso_site(elements, root):
    name = None
    for el in elements:
        name = _text_of(el)
        if name:
            break
    if not name:
        return None
    lat = lon = None
    for box in root.iter("EX_GeographicBoundingBox"):
        try:
            west = float(_first_text(box, "westBoundLongitude") or "")
            east = float(_first_text(box, "eastBoundLongitude") or "")
            south = float(_first_text(box, "southBoundLatitude") or "")
            north = float(_first_text(box, "northBoundLatitude") or "")
        except ValueError:
            continue
        lat = (south + north) / 2.0
        lon = (west + east) / 2.0
        break
    return Site(name=name, latitude=lat, longitude=lon)


def _first_text(scope: ET.Element, tag: str) -> str:
    for el in scope.iter(tag):
        value = _text_of(el)
        if value:
            return value
    return ""


TRANSFORMS: dict[str, Callable] = {
    "text": _tr_text,
    "text_list": _tr_text_list,
    "localized_text": _tr_localized_text,
    "spase_contacts": _tr_spase_contacts,
    "iso_contacts": _tr_iso_contacts,
    "time_span": _tr_time_span,
    "time_period": _tr_time_period,
    "iso_site": _tr_iso_site,
    "display": _tr_text,
}

#: Record fields that must have at least one mapping row per schema.
REQUIRED_FIELDS = ("source_id", "title")


def load_mapping_table(path=None) -> MappingTable:
    """Load the mapping table, validating transforms and required coverage."""
    if path is None:
        text = (
            resources.files("rdcatalog").joinpath("data/mappings.yaml").read_text("utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    raw = yaml.safe_load(text)
    rows: dict[str, list[MappingRow]] = {}
    for schema in SourceSchema:
        schema_rows = []
        for item in raw.get(schema.value, []):
            row = MappingRow(
                path=item["path"],
                field=item["field"],
                transform=item["transform"],
                required=bool(item.get("required", False)),
                label=item.get("label"),
            )
            if row.transform not in TRANSFORMS:
                raise MappingError(f"unknown transform {row.transform!r}")
            schema_rows.append(row)
        mapped = {r.field for r in schema_rows if r.required}
        missing = [f for f in REQUIRED_FIELDS if f not in mapped]
        if missing:
            raise MappingError(
                f"schema {schema.value!r} lacks required mappings for {missing}"
            )
        rows[schema.value] = schema_rows
    return MappingTable(version=int(raw.get("version", 1)), rows=rows)


_DEFAULT_TABLE: MappingTable | None = None


def default_mapping_table() -> MappingTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = load_mapping_table()
    return _DEFAULT_TABLE


# -- parsing -----------------------------------------------------------------


def _findall(scope: ET.Element, path: str) -> list[ET.Element]:
    """Evaluate a mapping path: ``a/b`` direct children, ``a//b`` any depth.

    A leading ``.//`` searches descendants of the scope element.  This is
    deliberately smaller than XPath; mapping rows should stay readable.
    """
    current = [scope]
    deep = False
    for step in path.split("/"):
        if step == "":
            deep = True
            continue
        if step == ".":
            continue
        nxt: list[ET.Element] = []
        seen: set[int] = set()
        for node in current:
            found = node.iter(step) if deep else (c for c in node if c.tag == step)
            for el in found:
                if id(el) not in seen:
                    seen.add(id(el))
                    nxt.append(el)
        current = nxt
        deep = False
        if not current:
            break
    return current


def _parse_xml(document: str) -> ET.Element:
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise XmlError(f"malformed XML: {exc}") from exc
    return _strip_namespaces(root)


def detect_schema(document: str) -> SourceSchema:
    """Route a document to its parser by root element namespace (or name)."""
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise XmlError(f"malformed XML: {exc}") from exc
    tag = root.tag
    ns = tag.rsplit("}", 1)[0].lstrip("{") if "}" in tag else ""
    local = tag.rsplit("}", 1)[1] if "}" in tag else tag
    if "spase" in ns.lower() or local == "Spase":
        return SourceSchema.SPASE_IUGONET
    if "isotc211" in ns.lower() or local in ("MD_Metadata", "MI_Metadata"):
        return SourceSchema.ISO19115
    raise UnsupportedRoot(f"unrecognised root element {tag!r}")


def _apply_mapping(
    resource: ET.Element,
    schema: SourceSchema,
    table: MappingTable,
) -> dict:
    values: dict = {"metadata_display": []}
    for row in table.for_schema(schema):
        matched = _findall(resource, row.path)
        result = TRANSFORMS[row.transform](matched, resource)
        if row.field == "metadata_display":
            if result:
                values["metadata_display"].append((row.label or row.path, str(result)))
            continue
        empty = result is None or result == [] or result == ""
        if empty:
            if row.required:
                raise MissingRequired(row.field)
            continue
        if row.field not in values:
            values[row.field] = result
    for name in REQUIRED_FIELDS:
        if name not in values:
            raise MissingRequired(name)
    return values


def _snippet_from(text: str) -> str:
    short = textwrap.shorten(text, width=120, placeholder="…")
    return short or text[:120]


def _build_record(
    values: dict,
    schema: SourceSchema,
    data_kind: DataKind,
    default_discipline: list[str],
) -> DatasetRecord:
    source_id = values["source_id"]
    slug = slugify(source_id)
    title: LocalizedText = values["title"]
    description: LocalizedText = values.get("description") or LocalizedText(en=title.en)
    snippet = LocalizedText(
        en=_snippet_from(description.en),
        ja=_snippet_from(description.ja) if description.ja else None,
    )
    return DatasetRecord(
        id=slug,
        source_id=source_id,
        source_schema=schema,
        title=title,
        snippet=snippet,
        description=description,
        config_ref=slug,
        discipline=values.get("discipline") or list(default_discipline),
        data_kind=data_kind,
        keywords=values.get("keywords", []),
        site=values.get("site"),
        temporal_coverage=values.get("temporal_coverage"),
        contacts=values.get("contacts", []),
        thumbnail=values.get("thumbnail") or f"thumbnails/{slug}.png",
        metadata_display=values["metadata_display"],
    )


def parse_spase(
    document: str,
    options: IngestOptions | None = None,
    table: MappingTable | None = None,
) -> DatasetRecord:
    """Parse a SPASE/IUGONET resource document into a DatasetRecord."""
    options = options or IngestOptions()
    table = table or default_mapping_table()
    root = _parse_xml(document)
    if root.tag != "Spase":
        raise UnsupportedRoot(f"expected a Spase root element, got {root.tag!r}")
    resource = None
    for child in root:
        if child.tag in SPASE_RESOURCE_KINDS:
            resource = child
            break
    if resource is None:
        raise UnsupportedRoot("document contains no recognised resource element")

    values = _apply_mapping(resource, SourceSchema.SPASE_IUGONET, table)
    kind = SPASE_RESOURCE_KINDS[resource.tag]
    kind = options.kind_overrides.get(values["source_id"], kind)
    return _build_record(
        values,
        SourceSchema.SPASE_IUGONET,
        kind,
        default_discipline=["Space and Upper Atmospheric Sciences"],
    )


def parse_iso19115(
    document: str,
    options: IngestOptions | None = None,
    table: MappingTable | None = None,
) -> DatasetRecord:
    """Parse an ISO 19115/19139 metadata document into a DatasetRecord."""
    options = options or IngestOptions()
    table = table or default_mapping_table()
    root = _parse_xml(document)
    if root.tag not in ("MD_Metadata", "MI_Metadata"):
        raise UnsupportedRoot(f"expected MD_Metadata, got {root.tag!r}")

    values = _apply_mapping(root, SourceSchema.ISO19115, table)
    kind = options.kind_overrides.get(values["source_id"], DataKind.OTHER)
    return _build_record(
        values,
        SourceSchema.ISO19115,
        kind,
        default_discipline=["Polar Science"],
    )


_PARSERS = {
    SourceSchema.SPASE_IUGONET: parse_spase,
    SourceSchema.ISO19115: parse_iso19115,
}


def parse_document(
    document: str,
    options: IngestOptions | None = None,
    table: MappingTable | None = None,
) -> DatasetRecord:
    schema = detect_schema(document)
    return _PARSERS[schema](document, options, table)


def ingest_directory(
    path,
    options: IngestOptions | None = None,
    table: MappingTable | None = None,
) -> tuple[list[DatasetRecord], list[IngestFailure]]:
    """Parse every ``*.xml`` file under ``path``.

    Per-file failures are collected, never fatal.  Slug collisions get
    numeric suffixes (``x``, ``x-2``, ...) in file order; the returned
    records are sorted by slug so the result is schedule-independent.
    """
    options = options or IngestOptions()
    directory = Path(path)
    if not directory.is_dir():
        raise OSError(f"not a directory: {directory}")

    records: list[DatasetRecord] = []
    failures: list[IngestFailure] = []
    taken: set[str] = set()
    for xml_path in sorted(directory.glob("*.xml")):
        try:
            document = xml_path.read_text(encoding="utf-8")
            record = parse_document(document, options, table)
        except IngestError as exc:
            failures.append(IngestFailure(str(xml_path), str(exc)))
            continue
        slug = options.slug_overrides.get(record.source_id, record.id)
        base, n = slug, 1
        while slug in taken:
            n += 1
            slug = f"{base}-{n}"
        taken.add(slug)
        if slug != record.id:
            record.id = slug
            record.config_ref = slug
            if record.thumbnail.startswith("thumbnails/"):
                record.thumbnail = f"thumbnails/{slug}.png"
        records.append(record)
    records.sort(key=lambda r: r.id)
    return records, failures
