from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdcatalog.timeutil import as_utc, end_of_day, format_timestamp, parse_timestamp

UTC = timezone.utc


def test_parse_accepts_z_suffix():
    assert parse_timestamp("2024-04-23T06:30:00Z") == datetime(2024, 4, 23, 6, 30, tzinfo=UTC)


def test_parse_accepts_offset_and_converts():
    dt = parse_timestamp("2024-04-23T09:30:00+03:00")
    assert dt == datetime(2024, 4, 23, 6, 30, tzinfo=UTC)
    assert dt.tzinfo == UTC


def test_parse_naive_assumed_utc():
    assert parse_timestamp("2024-04-23T06:30:00") == datetime(2024, 4, 23, 6, 30, tzinfo=UTC)


def test_parse_bare_date_is_midnight():
    assert parse_timestamp("2024-04-23") == datetime(2024, 4, 23, tzinfo=UTC)


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_timestamp("not a time")


def test_format_is_compact_iso_with_z():
    assert format_timestamp(datetime(2024, 4, 23, 6, 30, tzinfo=UTC)) == "2024-04-23T06:30:00Z"


def test_format_keeps_subsecond_precision():
    text = format_timestamp(datetime(2024, 4, 23, 6, 30, 0, 250000, tzinfo=UTC))
    assert text == "2024-04-23T06:30:00.25Z"


def test_end_of_day():
    dt = end_of_day(datetime(2024, 4, 23, 6, 30, tzinfo=UTC))
    assert dt == datetime(2024, 4, 23, 23, 59, 59, tzinfo=UTC)


@given(
    st.datetimes(
        min_value=datetime(1970, 1, 1),
        max_value=datetime(2100, 1, 1),
        timezones=st.just(UTC),
    )
)
def test_format_parse_round_trip(dt):
    # microseconds rendered with trailing zeros stripped still re-parse
    assert parse_timestamp(format_timestamp(dt)) == dt


def test_as_utc_converts_offsets():
    plus9 = timezone(timedelta(hours=9))
    dt = datetime(2024, 4, 23, 9, 0, tzinfo=plus9)
    assert as_utc(dt) == datetime(2024, 4, 23, 0, 0, tzinfo=UTC)
