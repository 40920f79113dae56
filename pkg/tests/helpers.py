"""Shared test helpers: independent oracles and fixture factories.

The zip reader here is written against the zip format directly (struct +
zlib) so archive tests never validate zipfile with zipfile.  NetCDF
fixtures are produced by scipy's writer, which acts as the independent
reference tooling for the binary reader.
"""
from __future__ import annotations

import io
import struct
import zlib
from datetime import datetime, timedelta, timezone

import numpy as np

from rdcatalog.model import (
    CatalogSnapshot,
    DataFormat,
    DataKind,
    DatasetConfig,
    DatasetRecord,
    Granularity,
    LocalizedText,
    SourceSchema,
)

UTC = timezone.utc
EPOCH_2024 = datetime(2024, 1, 1, tzinfo=UTC)


# -- independent zip extraction oracle --------------------------------------

_EOCD = b"PK\x05\x06"
_CENTRAL = b"PK\x01\x02"
_LOCAL = b"PK\x03\x04"


def read_zip_independent(data: bytes) -> dict[str, bytes]:
    """Extract a zip archive using only struct and zlib.

    Walks the central directory, inflates each member from its local
    header, and verifies size and CRC against the directory entry.
    Returns members in central-directory order (dicts preserve it).
    """
    eocd_off = data.rfind(_EOCD)
    if eocd_off < 0:
        raise AssertionError("missing end-of-central-directory record")
    (sig, _disk, _cd_disk, _n_disk, n_total, _cd_size, cd_offset, _clen) = struct.unpack_from(
        "<4s4H2IH", data, eocd_off
    )
    assert sig == _EOCD
    members: dict[str, bytes] = {}
    pos = cd_offset
    for _ in range(n_total):
        (
            sig, _vmade, _vneed, _flags, method, _mtime, _mdate,
            crc, csize, usize, nlen, elen, clen,
            _dstart, _iattr, _eattr, local_off,
        ) = struct.unpack_from("<4s6H3I5H2I", data, pos)
        assert sig == _CENTRAL, "central directory entry out of place"
        name = data[pos + 46 : pos + 46 + nlen].decode("utf-8")
        pos += 46 + nlen + elen + clen

        (lsig, _lv, _lf, _lm, _lt, _ld, _lcrc, _lcs, _lus, lnlen, lelen) = struct.unpack_from(
            "<4s5H3I2H", data, local_off
        )
        assert lsig == _LOCAL, "local header signature mismatch"
        body_start = local_off + 30 + lnlen + lelen
        raw = data[body_start : body_start + csize]
        assert len(raw) == csize, "member payload truncated"
        if method == 0:
            content = raw
        elif method == 8:
            content = zlib.decompress(raw, wbits=-15)
        else:
            raise AssertionError(f"unexpected compression method {method}")
        assert len(content) == usize, f"member {name!r} size mismatch"
        assert zlib.crc32(content) & 0xFFFFFFFF == crc, f"member {name!r} CRC mismatch"
        assert name not in members, f"duplicate member name {name!r}"
        members[name] = content
    return members


# -- reference NetCDF fixtures (scipy writer) --------------------------------


def netcdf_bytes(build, version: int = 1) -> bytes:
    """Serialize a NetCDF classic file via scipy's writer."""
    from scipy.io import netcdf_file

    bio = io.BytesIO()
    f = netcdf_file(bio, "w", version=version)
    try:
        build(f)
        f.flush()
        return bio.getvalue()
    finally:
        f.close()


def timeseries_nc(
    n: int = 5,
    fill_index: int | None = None,
    version: int = 1,
    channels: int = 0,
    cadence_s: float = 60.0,
    values=None,
    units: bytes = b"seconds since 2024-01-01 00:00:00",
) -> bytes:
    """A record-dimension file: time coordinate plus one measured variable.

    ``channels`` > 0 makes the measurement 2-D (time x ch); ``fill_index``
    plants the variable's fill value at that record.
    """
    times = np.arange(n, dtype=np.float64) * cadence_s
    if values is None:
        values = 20.0 + 0.5 * np.arange(n, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    fill = -9999.0

    def build(f):
        f.history = b"reference fixture"
        f.institution = b"test bench"
        f.createDimension("time", None)
        tvar = f.createVariable("time", "d", ("time",))
        tvar[:] = times
        tvar.units = units
        if channels:
            f.createDimension("ch", channels)
            v = f.createVariable("bfield", "d", ("time", "ch"))
            data = np.stack([values + 100.0 * c for c in range(channels)], axis=1)
            v[:] = data
            v.units = b"nT"
        else:
            v = f.createVariable("temperature", "d", ("time",))
            data = values.copy()
            if fill_index is not None:
                data[fill_index] = fill
            v[:] = data
            v.units = b"degC"
            v._FillValue = fill

    return netcdf_bytes(build, version=version)


def composition_nc(masses, positions=None, version: int = 1) -> bytes:
    """A non-record file: one binned composition variable with coordinates."""
    masses = np.asarray(masses, dtype=np.float64)
    if positions is None:
        positions = np.arange(len(masses), dtype=np.float64)
    positions = np.asarray(positions, dtype=np.float64)

    def build(f):
        f.createDimension("bin", len(masses))
        pvar = f.createVariable("bin", "d", ("bin",))
        pvar[:] = positions
        pvar.units = b"um"
        mvar = f.createVariable("abundance", "d", ("bin",))
        mvar[:] = masses
        mvar.units = b"fraction"

    return netcdf_bytes(build, version=version)


# -- source metadata document factories --------------------------------------


def spase_doc(
    source_id: str = "spase://IUGONET/NumericalData/SYO/magnetometer",
    title: str = "Syowa magnetometer",
    description: str = "Fluxgate magnetometer observation at Syowa Station.",
    ja_title: str | None = None,
    keywords: tuple[str, ...] = ("aurora", "magnetometer"),
    start: str | None = "2019-01-01T00:00:00",
    stop: str | None = "2019-12-31T23:59:59",
    contacts: tuple[tuple[str, str], ...] = (
        ("PrincipalInvestigator", "spase://SMWG/Person/Taro.Nankyoku"),
    ),
    resource_kind: str = "NumericalData",
    release_date: str = "2021-01-01T00:00:00",
    observed_region: str = "Earth.Surface.Polar",
    omit_resource_name: bool = False,
) -> str:
    """A minimal SPASE/IUGONET resource document."""
    header = []
    if not omit_resource_name:
        header.append(f"      <ResourceName>{title}</ResourceName>")
    if ja_title:
        header.append(f'      <ResourceName xml:lang="ja">{ja_title}</ResourceName>')
    header.append(f"      <ReleaseDate>{release_date}</ReleaseDate>")
    header.append(f"      <Description>{description}</Description>")
    for kw in keywords:
        header.append(f"      <Keyword>{kw}</Keyword>")
    for role, person in contacts:
        header.append(
            "      <Contact>\n"
            f"        <Role>{role}</Role>\n"
            f"        <PersonID>{person}</PersonID>\n"
            "      </Contact>"
        )
    span = ""
    if start:
        stop_el = f"\n        <StopDate>{stop}</StopDate>" if stop else ""
        span = (
            "    <TemporalDescription>\n"
            "      <TimeSpan>\n"
            f"        <StartDate>{start}</StartDate>{stop_el}\n"
            "      </TimeSpan>\n"
            "    </TemporalDescription>\n"
        )
    header_text = "\n".join(header)
    return f"""<?xml version="1.0" encoding="UTF-8"?>
<Spase xmlns="http://www.spase-group.org/data/schema">
  <Version>2.2.2</Version>
  <{resource_kind}>
    <ResourceID>{source_id}</ResourceID>
    <ResourceHeader>
{header_text}
    </ResourceHeader>
{span}    <ObservedRegion>{observed_region}</ObservedRegion>
    <InstrumentID>spase://IUGONET/Instrument/SYO/fluxgate</InstrumentID>
    <AccessInformation>
      <RepositoryID>spase://IUGONET/Repository/NIPR</RepositoryID>
    </AccessInformation>
  </{resource_kind}>
</Spase>
"""


def iso_doc(
    file_identifier: str = "nipr:ads:penguin-census-001",
    title: str = "Adelie penguin census at Syowa Station",
    abstract: str | None = "Annual breeding-pair counts from the east Ongul colonies.",
    keywords: tuple[str, ...] = ("penguin", "census"),
    begin: str | None = "2019-11-01",
    end: str | None = "2020-01-31",
    site: str | None = "Syowa Station",
    topic: str = "biota",
    contact_name: str = "A. Researcher",
    organisation: str = "NIPR",
    thumbnail: str | None = None,
    date_stamp: str = "2020-05-01",
    omit_title: bool = False,
) -> str:
    """A minimal ISO 19115/19139 metadata document."""
    title_el = (
        ""
        if omit_title
        else (
            "          <gmd:title><gco:CharacterString>"
            + title
            + "</gco:CharacterString></gmd:title>\n"
        )
    )
    abstract_el = (
        f"      <gmd:abstract><gco:CharacterString>{abstract}</gco:CharacterString></gmd:abstract>\n"
        if abstract
        else ""
    )
    kw_els = "".join(
        f"          <gmd:keyword><gco:CharacterString>{kw}</gco:CharacterString></gmd:keyword>\n"
        for kw in keywords
    )
    temporal = ""
    if begin:
        end_el = f"\n                <gml:endPosition>{end}</gml:endPosition>" if end else ""
        temporal = f"""          <gmd:temporalElement>
            <gmd:EX_TemporalExtent>
              <gmd:extent>
                <gml:TimePeriod gml:id="tp1">
                <gml:beginPosition>{begin}</gml:beginPosition>{end_el}
                </gml:TimePeriod>
              </gmd:extent>
            </gmd:EX_TemporalExtent>
          </gmd:temporalElement>
"""
    geographic = ""
    if site:
        geographic = f"""          <gmd:geographicElement>
            <gmd:EX_GeographicDescription>
              <gmd:geographicIdentifier>
                <gmd:MD_Identifier>
                  <gmd:code><gco:CharacterString>{site}</gco:CharacterString></gmd:code>
                </gmd:MD_Identifier>
              </gmd:geographicIdentifier>
            </gmd:EX_GeographicDescription>
          </gmd:geographicElement>
"""
    overview = (
        (
            "      <gmd:graphicOverview><gmd:MD_BrowseGraphic>"
            f"<gmd:fileName><gco:CharacterString>{thumbnail}</gco:CharacterString></gmd:fileName>"
            "</gmd:MD_BrowseGraphic></gmd:graphicOverview>\n"
        )
        if thumbnail
        else ""
    )
    return f"""<?xml version="1.0" encoding="UTF-8"?>
<gmd:MD_Metadata xmlns:gmd="http://www.isotc211.org/2005/gmd"
                 xmlns:gco="http://www.isotc211.org/2005/gco"
                 xmlns:gml="http://www.opengis.net/gml">
  <gmd:fileIdentifier><gco:CharacterString>{file_identifier}</gco:CharacterString></gmd:fileIdentifier>
  <gmd:dateStamp><gco:Date>{date_stamp}</gco:Date></gmd:dateStamp>
  <gmd:identificationInfo>
    <gmd:MD_DataIdentification>
      <gmd:citation>
        <gmd:CI_Citation>
{title_el}        </gmd:CI_Citation>
      </gmd:citation>
{abstract_el}      <gmd:pointOfContact>
        <gmd:CI_ResponsibleParty>
          <gmd:individualName><gco:CharacterString>{contact_name}</gco:CharacterString></gmd:individualName>
          <gmd:organisationName><gco:CharacterString>{organisation}</gco:CharacterString></gmd:organisationName>
          <gmd:role><gmd:CI_RoleCode codeList="codelist#CI_RoleCode" codeListValue="pointOfContact"/></gmd:role>
        </gmd:CI_ResponsibleParty>
      </gmd:pointOfContact>
      <gmd:descriptiveKeywords>
        <gmd:MD_Keywords>
{kw_els}        </gmd:MD_Keywords>
      </gmd:descriptiveKeywords>
      <gmd:topicCategory><gmd:MD_TopicCategoryCode>{topic}</gmd:MD_TopicCategoryCode></gmd:topicCategory>
{overview}      <gmd:extent>
        <gmd:EX_Extent>
{temporal}{geographic}        </gmd:EX_Extent>
      </gmd:extent>
    </gmd:MD_DataIdentification>
  </gmd:identificationInfo>
</gmd:MD_Metadata>
"""


# -- record / config / snapshot factories ------------------------------------


def make_record(
    slug: str,
    *,
    title: str | None = None,
    ja: str | None = None,
    snippet: str | None = None,
    description: str | None = None,
    keywords: tuple[str, ...] = (),
    discipline: tuple[str, ...] = ("Polar Science",),
    kind: DataKind = DataKind.OTHER,
    access: int = 0,
    coverage: tuple[datetime, datetime] | None = None,
    thumbnail: str = "",
    config_ref: str | None = None,
    schema: SourceSchema = SourceSchema.ISO19115,
    metadata: tuple[tuple[str, str], ...] = (),
) -> DatasetRecord:
    title = title if title is not None else slug.replace("-", " ").title()
    snippet = snippet if snippet is not None else f"Short caption for {slug}."
    description = description if description is not None else f"Long description for {slug}."
    return DatasetRecord(
        id=slug,
        source_id=f"src:{slug}",
        source_schema=schema,
        title=LocalizedText(en=title, ja=ja),
        snippet=LocalizedText(en=snippet),
        description=LocalizedText(en=description),
        config_ref=config_ref if config_ref is not None else slug,
        discipline=list(discipline),
        data_kind=kind,
        keywords=list(keywords),
        temporal_coverage=coverage,
        thumbnail=thumbnail or f"thumbnails/{slug}.png",
        metadata_display=list(metadata),
        access_count=access,
    )


def make_config(
    slug: str,
    *,
    template: str = "",
    granularity: Granularity = Granularity.STATIC,
    fmt: DataFormat = DataFormat.OTHER,
    visual: str | None = None,
    show_visualized: bool = False,
    download: bool = False,
    conversion: bool = False,
    manifest: str = "",
) -> DatasetConfig:
    return DatasetConfig(
        id=slug,
        data_url_template=template,
        granularity=granularity,
        format=fmt,
        visual_url_template=visual,
        show_visualized=show_visualized,
        download_enabled=download,
        conversion_enabled=conversion,
        manifest_path=manifest,
    )


def make_snapshot(
    records,
    configs=None,
    scores=(),
    graph=None,
    version: int = 1,
    settings=None,
) -> CatalogSnapshot:
    records = list(records)
    if configs is None:
        configs = [make_config(r.id) for r in records]
    config_map = {c.id: c for c in configs}
    for record in records:
        config_map.setdefault(record.config_ref, make_config(record.config_ref))
    snapshot = CatalogSnapshot(
        records={r.id: r for r in records},
        configs=config_map,
        scores=list(scores),
        graph=graph,
        version=version,
        settings=dict(settings or {}),
    )
    snapshot.check_integrity()
    return snapshot


def minutes(n: float) -> timedelta:
    return timedelta(minutes=n)
