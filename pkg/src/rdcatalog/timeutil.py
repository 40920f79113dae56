"""Small UTC timestamp helpers shared across modules.

All timestamps in this package are timezone-aware UTC datetimes; naive
inputs are interpreted as UTC.
"""

from __future__ import annotations

import re
from datetime import datetime, timezone

UTC = timezone.utc

_FRACTION = re.compile(r"\.(\d+)")


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO 8601 date or datetime into an aware UTC datetime.

    Accepts a trailing ``Z``, an explicit offset, or no offset (UTC
    assumed), and bare dates (midnight assumed).
    """
    s = text.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    # fromisoformat (3.10) wants exactly 3 or 6 fractional digits
    s = _FRACTION.sub(lambda m: "." + m.group(1)[:6].ljust(6, "0"), s, count=1)
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC)


def format_timestamp(dt: datetime) -> str:
    """Render an aware datetime as compact ISO 8601 with a ``Z`` suffix."""
    dt = as_utc(dt)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%f").rstrip("0") + "Z"
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def as_utc(dt: datetime) -> datetime:
    if dt.tzinfo is None:
        return dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC)


def end_of_day(dt: datetime) -> datetime:
    """Last representable instant of the given day, second resolution."""
    return as_utc(dt).replace(hour=23, minute=59, second=59, microsecond=0)
