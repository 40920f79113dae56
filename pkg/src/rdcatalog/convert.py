"""Plain-text conversion and time-series extraction for decoded datasets.

The tabular text layout is part of this package's external contract and
is frozen by golden tests:

    # <global attribute name>: <value>          (one line per attribute)
    # variable: <name> units: <units>           (one line per column source)
    # columns: <comma-joined column names>
    <one delimited row per record>

A time coordinate (a variable named after the row dimension whose units
follow the ``<unit> since <epoch>`` convention, unit one of seconds /
minutes / hours / days) renders as ISO 8601.  Floats use the shortest
representation that round-trips in the variable's element type; values
equal to the variable's declared fill value (and NaNs) render as empty
fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Sequence

import numpy as np

from .netcdf3 import SelfDescribingDataset, Variable
from .timeutil import UTC, format_timestamp, parse_timestamp

_TIME_UNITS = {
    "seconds": 1.0,
    "second": 1.0,
    "sec": 1.0,
    "s": 1.0,
    "minutes": 60.0,
    "minute": 60.0,
    "min": 60.0,
    "hours": 3600.0,
    "hour": 3600.0,
    "h": 3600.0,
    "days": 86400.0,
    "day": 86400.0,
    "d": 86400.0,
}

_FILL_ATTRS = ("_FillValue", "missing_value")


class ConvertError(Exception):
    pass


class MixedDimensions(ConvertError):
    pass


class NoSuchVariable(ConvertError):
    pass


class NoTimeCoordinate(ConvertError):
    pass


class NonScalarVariable(ConvertError):
    pass


class NonMonotonicTime(ConvertError):
    pass


@dataclass
class TimeSeries:
    """Strictly increasing UTC sample times with per-index gap markers."""

    times: list[datetime]
    values: list[float]
    gaps: set[int] = field(default_factory=set)

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")
        for a, b in zip(self.times, self.times[1:]):
            if a >= b:
                raise NonMonotonicTime(f"sample times not strictly increasing at {b}")


def parse_time_units(units: str) -> tuple[float, datetime] | None:
    """Split a ``<unit> since <epoch>`` units string; None when it isn't one."""
    if not units or " since " not in units:
        return None
    unit, _, epoch_text = units.partition(" since ")
    scale = _TIME_UNITS.get(unit.strip().lower())
    if scale is None:
        return None
    epoch_text = epoch_text.strip()
    if epoch_text.endswith(" UTC"):
        epoch_text = epoch_text[:-4].strip()
    try:
        epoch = parse_timestamp(epoch_text.replace(" ", "T", 1))
    except ValueError:
        return None
    return scale, epoch


def _units_of(var: Variable) -> str:
    units = var.attributes.get("units", "")
    if isinstance(units, bytes):
        units = units.decode("utf-8", errors="replace")
    return str(units)


def _fill_value(var: Variable):
    for attr in _FILL_ATTRS:
        if attr in var.attributes:
            return var.attributes[attr]
    return None


def _time_to_datetime(value: float, scale: float, epoch: datetime) -> datetime:
    return epoch + timedelta(microseconds=round(float(value) * scale * 1e6))


def format_number(value) -> str:
    """Shortest decimal string that round-trips in the value's own dtype."""
    if isinstance(value, (np.floating, float)):
        if np.isnan(value):
            return "nan"
        if isinstance(value, np.float32):
            if np.isinf(value):
                return "inf" if value > 0 else "-inf"
            mag = abs(float(value))
            if value != 0 and (mag >= 1e16 or mag < 1e-4):
                return np.format_float_scientific(value, unique=True, trim="-")
            return np.format_float_positional(value, unique=True, trim="-")
        return repr(float(value))
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    if isinstance(value, bytes):
        return value.decode("utf-8", errors="replace")
    return str(value)


def _is_time_coordinate(var: Variable, row_dim: str) -> tuple[float, datetime] | None:
    if var.name != row_dim:
        return None
    return parse_time_units(_units_of(var))


def _row_dimension(dataset: SelfDescribingDataset, variables: list[Variable]) -> str | None:
    """The shared leading dimension of the selected variables, or None if all scalar."""
    leading = {v.dimensions[0] for v in variables if v.dimensions}
    if not leading:
        return None
    if len(leading) > 1 or any(not v.dimensions for v in variables):
        raise MixedDimensions(
            f"selected variables do not share one leading dimension: {sorted(leading)}"
        )
    return leading.pop()


def _column_values(var: Variable, n_rows: int) -> tuple[list[str], list[np.ndarray]]:
    """Flatten trailing dimensions into indexed columns of length n_rows."""
    data = var.data
    if data.ndim == 1:
        return [var.name], [data]
    flat = data.reshape(n_rows, -1)
    names = [f"{var.name}[{i}]" for i in range(flat.shape[1])]
    return names, [flat[:, i] for i in range(flat.shape[1])]


def default_variable_selection(dataset: SelfDescribingDataset) -> list[str] | None:
    """The dataset's main table: its record variables, else everything.

    Files often carry scalar housekeeping variables next to the record
    table; selecting record variables only keeps the table convertible.
    """
    rec = dataset.record_dimension
    if rec is None:
        return None
    names = [
        v.name
        for v in dataset.variables
        if v.dimensions and v.dimensions[0] == rec.name
    ]
    return names or None


def to_ascii(
    dataset: SelfDescribingDataset,
    variables: Sequence[str] | None = None,
    delimiter: str = ",",
) -> str:
    """Render the dataset as delimited text with a ``# `` header block."""
    if variables is None:
        selected = list(dataset.variables)
    else:
        selected = []
        for name in variables:
            var = dataset.variable(name)
            if var is None:
                raise NoSuchVariable(name)
            selected.append(var)

    lines: list[str] = []
    for name, value in dataset.global_attributes.items():
        lines.append(f"# {name}: {format_number(value)}")
    for var in selected:
        units = _units_of(var) or "-"
        lines.append(f"# variable: {var.name} units: {units}")

    if not selected:
        return "\n".join(lines) + "\n" if lines else ""

    row_dim = _row_dimension(dataset, selected)
    if row_dim is None:
        n_rows = 1
        columns = [(v.name, v.data.reshape(1)) for v in selected]
        col_names = [name for name, _ in columns]
        col_data = [data for _, data in columns]
        time_specs = [None] * len(col_names)
        fills = [_fill_value(v) for v in selected]
        owners = list(selected)
    else:
        n_rows = selected[0].data.shape[0]
        col_names, col_data, time_specs, fills, owners = [], [], [], [], []
        for var in selected:
            names, cols = _column_values(var, n_rows)
            spec = _is_time_coordinate(var, row_dim)
            fill = _fill_value(var)
            for name, colvals in zip(names, cols):
                col_names.append(name)
                col_data.append(colvals)
                time_specs.append(spec)
                fills.append(fill)
                owners.append(var)

    lines.append("# columns: " + delimiter.join(col_names))

    for row in range(n_rows):
        cells = []
        for col, spec, fill, owner in zip(col_data, time_specs, fills, owners):
            value = col[row]
            if owner.typecode == "c":
                cells.append(format_number(value))
                continue
            is_fill = fill is not None and value == fill
            if is_fill or (isinstance(value, np.floating) and np.isnan(value)):
                cells.append("")
            elif spec is not None:
                scale, epoch = spec
                cells.append(format_timestamp(_time_to_datetime(value, scale, epoch)))
            else:
                cells.append(format_number(value))
        lines.append(delimiter.join(cells))
    return "\n".join(lines) + "\n"


def extract_timeseries(dataset: SelfDescribingDataset, variable_name: str) -> TimeSeries:
    """Pull one record variable out as a gap-aware UTC time series.

    Requires a time coordinate: a 1-D variable named after the record
    dimension with ``<unit> since <epoch>`` units.  Samples equal to the
    variable's fill value (or NaN) are kept in place but flagged as gaps.
    """
    var = dataset.variable(variable_name)
    if var is None:
        raise NoSuchVariable(variable_name)

    rec_dim = dataset.record_dimension
    if rec_dim is None:
        # fall back to the variable's own leading dimension
        if not var.dimensions:
            raise NonScalarVariable(f"{variable_name!r} has no dimensions")
        rec_name = var.dimensions[0]
    else:
        rec_name = rec_dim.name
    if var.dimensions != (rec_name,):
        raise NonScalarVariable(
            f"{variable_name!r} must be 1-D over {rec_name!r}, has {var.dimensions}"
        )

    time_var = dataset.variable(rec_name)
    spec = parse_time_units(_units_of(time_var)) if time_var is not None else None
    if time_var is None or spec is None or time_var.dimensions != (rec_name,):
        raise NoTimeCoordinate(
            f"no time coordinate with '<unit> since <epoch>' units on {rec_name!r}"
        )
    scale, epoch = spec

    times = [_time_to_datetime(v, scale, epoch) for v in time_var.data]
    fill = _fill_value(var)
    values: list[float] = []
    gaps: set[int] = set()
    for i, raw in enumerate(var.data):
        v = float(raw)
        if (fill is not None and raw == fill) or np.isnan(v):
            gaps.add(i)
        values.append(v)
    return TimeSeries(times=times, values=values, gaps=gaps)
