"""Reader for the NetCDF classic binary format (versions 1 and 2).

The classic container is fully self-describing: a header declares
dimensions, attributes and variables, followed by fixed-size data blocks
and an interleaved record section.  Everything is big-endian; version 2
differs only in 64-bit data offsets.  This module decodes the container
eagerly and defensively: any malformed or short input raises a typed
error (UnsupportedFormat / MalformedHeader / TruncatedFile), never an
unhandled exception.

Writing, NetCDF-4/HDF5 and compression are out of scope.  Other
self-describing containers can be plugged into ``read_self_describing``
through the magic-byte adapter registry without touching this decoder.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# header tags
_NC_DIMENSION = 0x0A
_NC_VARIABLE = 0x0B
_NC_ATTRIBUTE = 0x0C
_ABSENT = 0x00

_STREAMING = 0xFFFFFFFF

#: nc_type code -> (type letter, numpy dtype, size in bytes)
_TYPES = {
    1: ("b", ">i1", 1),
    2: ("c", "S1", 1),
    3: ("h", ">i2", 2),
    4: ("i", ">i4", 4),
    5: ("f", ">f4", 4),
    6: ("d", ">f8", 8),
}

#: Magic prefixes of NASA CDF containers (unsupported; adapter seam only).
_NASA_CDF_MAGICS = (b"\xcd\xf3\x00\x01", b"\xcd\xf2\x60\x02", b"\x00\x00\xff\xff")


class FormatError(Exception):
    """Base error for self-describing container decoding."""


class UnsupportedFormat(FormatError):
    pass


class TruncatedFile(FormatError):
    pass


class MalformedHeader(FormatError):
    pass


@dataclass
class Dimension:
    name: str
    length: int
    is_record: bool = False


@dataclass
class Variable:
    name: str
    dimensions: tuple[str, ...]
    typecode: str  # one of b c h i f d
    attributes: dict
    data: np.ndarray

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)


@dataclass
class SelfDescribingDataset:
    dimensions: list[Dimension] = field(default_factory=list)
    variables: list[Variable] = field(default_factory=list)
    global_attributes: dict = field(default_factory=dict)

    def variable(self, name: str) -> Variable | None:
        for v in self.variables:
            if v.name == name:
                return v
        return None

    def dimension(self, name: str) -> Dimension | None:
        for d in self.dimensions:
            if d.name == name:
                return d
        return None

    @property
    def record_dimension(self) -> Dimension | None:
        for d in self.dimensions:
            if d.is_record:
                return d
        return None


class _Cursor:
    """Bounds-checked big-endian reader over the raw bytes."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def need(self, n: int) -> None:
        if n < 0:
            raise MalformedHeader("negative length in header")
        if self.pos + n > len(self.data):
            raise TruncatedFile(
                f"need {n} bytes at offset {self.pos}, file has {len(self.data)}"
            )

    def read(self, n: int) -> bytes:
        self.need(n)
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def read_i4(self) -> int:
        return struct.unpack(">i", self.read(4))[0]

    def read_u4(self) -> int:
        return struct.unpack(">I", self.read(4))[0]

    def read_i8(self) -> int:
        return struct.unpack(">q", self.read(8))[0]

    def align4(self) -> None:
        pad = (4 - self.pos % 4) % 4
        self.read(pad)


def _read_name(cur: _Cursor) -> str:
    n = cur.read_i4()
    if n < 0:
        raise MalformedHeader("negative name length")
    raw = cur.read(n)
    cur.align4()
    return raw.decode("utf-8", errors="replace")


def _read_attr_values(cur: _Cursor, nc_type: int, nelems: int):
    if nc_type not in _TYPES:
        raise MalformedHeader(f"unknown attribute type {nc_type}")
    if nelems < 0:
        raise MalformedHeader("negative attribute length")
    letter, dtype, size = _TYPES[nc_type]
    raw = cur.read(nelems * size)
    cur.align4()
    if letter == "c":
        return raw.decode("utf-8", errors="replace")
    values = np.frombuffer(raw, dtype=dtype)
    if nelems == 1:
        return values[0].item()
    return tuple(v.item() for v in values)


def _read_attr_list(cur: _Cursor) -> dict:
    tag = cur.read_i4()
    nelems = cur.read_i4()
    if tag == _ABSENT:
        if nelems != 0:
            raise MalformedHeader("ABSENT attribute list with nonzero count")
        return {}
    if tag != _NC_ATTRIBUTE:
        raise MalformedHeader(f"expected attribute tag, got {tag}")
    if nelems < 0:
        raise MalformedHeader("negative attribute count")
    attrs: dict = {}
    for _ in range(nelems):
        name = _read_name(cur)
        nc_type = cur.read_i4()
        count = cur.read_i4()
        value = _read_attr_values(cur, nc_type, count)
        if name in attrs:
            raise MalformedHeader(f"duplicate attribute {name!r}")
        attrs[name] = value
    return attrs


def read_netcdf_classic(data: bytes) -> SelfDescribingDataset:
    """Decode a classic container (CDF-1 or CDF-2) from raw bytes."""
    if len(data) < 4:
        raise UnsupportedFormat("file shorter than the magic number")
    if data[:4] in _NASA_CDF_MAGICS:
        raise UnsupportedFormat(
            "NASA CDF container detected; no native decoder is registered"
        )
    if data[:3] != b"CDF":
        raise UnsupportedFormat(f"bad magic {data[:4]!r}")
    version = data[3]
    if version not in (1, 2):
        raise UnsupportedFormat(f"unsupported container version {version}")

    cur = _Cursor(data)
    cur.pos = 4
    numrecs = cur.read_u4()
    streaming = numrecs == _STREAMING

    # dimensions
    tag = cur.read_i4()
    ndims = cur.read_i4()
    dims: list[Dimension] = []
    if tag == _ABSENT:
        if ndims != 0:
            raise MalformedHeader("ABSENT dimension list with nonzero count")
    elif tag != _NC_DIMENSION:
        raise MalformedHeader(f"expected dimension tag, got {tag}")
    else:
        if ndims < 0:
            raise MalformedHeader("negative dimension count")
        for _ in range(ndims):
            name = _read_name(cur)
            length = cur.read_i4()
            if length < 0:
                raise MalformedHeader(f"dimension {name!r} has negative length")
            is_record = length == 0
            if is_record and any(d.is_record for d in dims):
                raise MalformedHeader("more than one record dimension")
            dims.append(Dimension(name, length, is_record))

    global_attrs = _read_attr_list(cur)

    # variable headers
    tag = cur.read_i4()
    nvars = cur.read_i4()
    var_heads = []
    if tag == _ABSENT:
        if nvars != 0:
            raise MalformedHeader("ABSENT variable list with nonzero count")
        nvars = 0
    elif tag != _NC_VARIABLE:
        raise MalformedHeader(f"expected variable tag, got {tag}")
    elif nvars < 0:
        raise MalformedHeader("negative variable count")
    for _ in range(nvars):
        name = _read_name(cur)
        rank = cur.read_i4()
        if rank < 0:
            raise MalformedHeader(f"variable {name!r} has negative rank")
        dimids = []
        for _ in range(rank):
            dimid = cur.read_i4()
            if not 0 <= dimid < len(dims):
                raise MalformedHeader(f"variable {name!r} references dimension {dimid}")
            dimids.append(dimid)
        for pos, dimid in enumerate(dimids):
            if dims[dimid].is_record and pos != 0:
                raise MalformedHeader(
                    f"variable {name!r}: record dimension must come first"
                )
        attrs = _read_attr_list(cur)
        nc_type = cur.read_i4()
        if nc_type not in _TYPES:
            raise MalformedHeader(f"variable {name!r} has unknown type {nc_type}")
        cur.read_u4()  # stored vsize is redundant; sizes are recomputed below
        begin = cur.read_i4() if version == 1 else cur.read_i8()
        if begin < 0:
            raise MalformedHeader(f"variable {name!r} has negative data offset")
        var_heads.append((name, dimids, attrs, nc_type, begin))

    # slab sizes: per-record bytes for record variables, full extent otherwise
    def _sizes(dimids, nc_type):
        _, _, elsize = _TYPES[nc_type]
        rest = 1
        for dimid in dimids:
            if not dims[dimid].is_record:
                rest *= dims[dimid].length
        slab = rest * elsize
        padded = (slab + 3) // 4 * 4
        return slab, padded

    record_vars = [h for h in var_heads if h[1] and dims[h[1][0]].is_record]
    recsize = sum(_sizes(dimids, nc_type)[1] for _, dimids, _, nc_type, _ in record_vars)
    if len(record_vars) == 1:
        recsize = _sizes(record_vars[0][1], record_vars[0][3])[0]

    if streaming:
        if record_vars and recsize > 0:
            first = min(h[4] for h in record_vars)
            if first > len(data):
                raise TruncatedFile("record section offset beyond end of file")
            numrecs = (len(data) - first) // recsize
        else:
            numrecs = 0
    elif record_vars and recsize > 0:
        # reject absurd record counts before any allocation happens
        if numrecs > len(data) // recsize + 1:
            raise TruncatedFile(
                f"header declares {numrecs} records, file can hold at most "
                f"{len(data) // recsize + 1}"
            )

    variables: list[Variable] = []
    for name, dimids, attrs, nc_type, begin in var_heads:
        letter, dtype, elsize = _TYPES[nc_type]
        dim_names = tuple(dims[i].name for i in dimids)
        shape = tuple(
            numrecs if dims[i].is_record else dims[i].length for i in dimids
        )
        slab, _ = _sizes(dimids, nc_type)
        is_record = bool(dimids) and dims[dimids[0]].is_record
        if not is_record:
            if begin + slab > len(data):
                raise TruncatedFile(f"variable {name!r} data extends past end of file")
            arr = np.frombuffer(data, dtype=dtype, count=max(slab // elsize, 0), offset=begin)
        else:
            count = slab // elsize
            arr = np.empty(numrecs * count, dtype=dtype)
            for rec in range(numrecs):
                off = begin + rec * recsize
                if off + slab > len(data):
                    raise TruncatedFile(
                        f"record {rec} of variable {name!r} extends past end of file"
                    )
                arr[rec * count : (rec + 1) * count] = np.frombuffer(
                    data, dtype=dtype, count=count, offset=off
                )
        try:
            arr = arr.reshape(shape)
        except ValueError as exc:
            raise MalformedHeader(f"variable {name!r} shape mismatch") from exc
        variables.append(Variable(name, dim_names, letter, attrs, arr))

    # publish the current record count on the record dimension
    for d in dims:
        if d.is_record:
            d.length = numrecs

    return SelfDescribingDataset(
        dimensions=dims, variables=variables, global_attributes=global_attrs
    )


#: magic-byte adapter registry for additional self-describing containers
_ADAPTERS: list[tuple[bytes, Callable[[bytes], SelfDescribingDataset]]] = [
    (b"CDF\x01", read_netcdf_classic),
    (b"CDF\x02", read_netcdf_classic),
]


def register_adapter(magic: bytes, reader: Callable[[bytes], SelfDescribingDataset]) -> None:
    """Register a decoder for another container, keyed by magic prefix."""
    _ADAPTERS.insert(0, (magic, reader))


def read_self_describing(data: bytes) -> SelfDescribingDataset:
    """Dispatch to the decoder registered for the input's magic bytes."""
    for magic, reader in _ADAPTERS:
        if data[: len(magic)] == magic:
            return reader(data)
    if data[:4] in _NASA_CDF_MAGICS:
        raise UnsupportedFormat(
            "NASA CDF container detected; no native decoder is registered"
        )
    raise UnsupportedFormat(f"unrecognised magic {data[:4]!r}")
