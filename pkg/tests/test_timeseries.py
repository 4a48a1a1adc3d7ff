import datetime as dt
import io
import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from histent.errors import (
    DuplicateDate,
    EmptyFile,
    EmptyIntersection,
    EmptySeries,
    MissingColumn,
    UnparseableDate,
    UnparseableValue,
)
from histent.timeseries import (
    ColumnSchema,
    PriceSeries,
    WindowKind,
    WindowSpec,
    aggregate,
    align,
    parse_price_csv,
    partition,
    write_price_csv,
)

from conftest import weekdays

YAHOO = """Date,Open,High,Low,Close,Adj Close,Volume
2014-03-18,187.0,188.0,186.0,187.5,170.0,1000
2014-03-17,186.0,187.0,185.0,186.5,169.0,1000
2014-03-19,188.0,189.0,187.0,188.5,171.0,1000
"""


def test_parse_default_schema():
    s = parse_price_csv(io.StringIO(YAHOO))
    assert len(s) == 3
    assert s.dates[0] == dt.date(2014, 3, 17)  # sorted
    assert np.array_equal(s.values, [186.0, 187.0, 188.0])


def test_parse_close_column():
    s = parse_price_csv(io.StringIO(YAHOO), ColumnSchema(value_column="Close"))
    assert np.array_equal(s.values, [186.5, 187.5, 188.5])


def test_parse_skips_sentinels(caplog):
    text = YAHOO + "2014-03-20,null,1,1,1,1,1\n2014-03-21,,1,1,1,1,1\n"
    with caplog.at_level(logging.WARNING):
        s = parse_price_csv(io.StringIO(text))
    assert len(s) == 3 and s.skipped == 2
    assert "skipped 2" in caplog.text


def test_parse_single_null_counter():
    s = parse_price_csv(io.StringIO(YAHOO + "2014-03-20,null,1,1,1,1,1\n"))
    assert s.skipped == 1


@pytest.mark.parametrize("text,exc", [
    ("", EmptyFile),
    ("Date,Open\n", EmptyFile),
    ("Day,Open\n2014-01-02,1\n", MissingColumn),
    ("Date,Close\n2014-01-02,1\n", MissingColumn),
    ("Date,Open\n02/01/2014,1\n", UnparseableDate),
    ("Date,Open\n2014-01-02,abc\n", UnparseableValue),
    ("Date,Open\n2014-01-02,inf\n", UnparseableValue),
    ("Date,Open\n2014-01-02,1\n2014-01-02,2\n", DuplicateDate),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_price_csv(io.StringIO(text))


def test_parse_bom_header():
    s = parse_price_csv(io.StringIO("﻿Date,Open\n2014-01-02,5\n"))
    assert s.values[0] == 5.0


def test_series_invariants():
    with pytest.raises(EmptySeries):
        PriceSeries((), [])
    d = dt.date(2020, 1, 1)
    with pytest.raises(DuplicateDate):
        PriceSeries((d, d), [1.0, 2.0])
    with pytest.raises(ValueError):
        PriceSeries((d + dt.timedelta(1), d), [1.0, 2.0])


def test_between():
    s = PriceSeries.from_values(np.arange(10.0), start=dt.date(2020, 1, 6))
    sub = s.between(dt.date(2020, 1, 8), dt.date(2020, 1, 13))
    assert [d.day for d in sub.dates] == [8, 9, 10, 13]
    with pytest.raises(EmptySeries):
        s.between(dt.date(2021, 1, 1))


@settings(max_examples=40)
@given(st.lists(st.floats(0.01, 1e6, allow_nan=False), min_size=1, max_size=60))
def test_round_trip(values):
    s = PriceSeries.from_values(values)
    buf = io.StringIO()
    write_price_csv(s, buf)
    first = buf.getvalue()
    back = parse_price_csv(io.StringIO(first))
    assert back.dates == s.dates and np.array_equal(back.values, s.values)
    buf2 = io.StringIO()
    write_price_csv(back, buf2)
    assert buf2.getvalue() == first


def test_window_spec_parse():
    assert WindowSpec.parse("month").kind is WindowKind.MONTH
    assert WindowSpec.parse("week").convention == "iso-8601-week"
    spec = WindowSpec.parse("fixed:5")
    assert spec.k == 5 and str(spec) == "fixed:5"
    for bad in ("fixed:0", "fixed:x", "year"):
        with pytest.raises(ValueError):
            WindowSpec.parse(bad)


def test_partition_single_week():
    s = PriceSeries.from_values([1, 2, 3, 4, 5], start=dt.date(2014, 3, 17))
    w = partition(s, WindowSpec(WindowKind.WEEK))
    assert len(w) == 1 and len(w[0]) == 5 and w[0].label == "2014-W12"


def test_partition_month_21_days():
    # March 2014 has 21 weekdays
    dates = [d for d in weekdays(dt.date(2014, 3, 1), 40) if d.month == 3]
    assert len(dates) == 21
    s = PriceSeries(tuple(dates), np.ones(21))
    w = partition(s, WindowSpec(WindowKind.MONTH))
    assert len(w) == 1 and len(w[0]) == 21 and w[0].label == "2014-03"


def test_partition_fixed():
    s = PriceSeries.from_values(np.arange(7.0))
    w = partition(s, WindowSpec(WindowKind.FIXED, 3))
    assert [len(x) for x in w] == [3, 3, 1]
    assert [x.label for x in w] == ["0-2", "3-5", "6-6"]


def test_partition_iso_year_boundary():
    # 2014-12-29 .. 2015-01-02 is ISO week 2015-W01
    s = PriceSeries.from_values(np.ones(6), start=dt.date(2014, 12, 26))
    labels = [w.label for w in partition(s, WindowSpec(WindowKind.WEEK))]
    assert labels == ["2014-W52", "2015-W01"]


def test_partition_oversize_warning(caplog):
    dates = tuple(dt.date(2020, 1, 6) + dt.timedelta(i) for i in range(7))
    s = PriceSeries(dates, np.ones(7))
    with caplog.at_level(logging.WARNING):
        partition(s, WindowSpec(WindowKind.WEEK))
    assert "exceed 5" in caplog.text


@settings(max_examples=40)
@given(st.integers(1, 300), st.sampled_from(["month", "week", "fixed:1", "fixed:4", "fixed:21"]))
def test_partition_completeness(n, kind):
    s = PriceSeries.from_values(np.arange(float(n)), start=dt.date(2013, 12, 20))
    windows = partition(s, WindowSpec.parse(kind))
    assert all(len(w) >= 1 for w in windows)
    joined = np.concatenate([w.points.values for w in windows])
    assert np.array_equal(joined, s.values)
    assert [w.start for w in windows] == list(np.cumsum([0] + [len(w) for w in windows[:-1]]))
    if kind == "week":
        assert all(len(w) <= 5 for w in windows)
    if kind == "month":
        assert all(len(w) <= 23 for w in windows)


def test_align():
    a = PriceSeries.from_values([1.0, 2.0, 3.0], start=dt.date(2020, 1, 6))
    assert [x[1:] for x in align(a, a)] == [(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]
    far = PriceSeries.from_values([1.0], start=dt.date(2021, 1, 4))
    with pytest.raises(EmptyIntersection):
        align(a, far)


def test_align_weekends():
    every_day = tuple(dt.date(2020, 1, 1) + dt.timedelta(i) for i in range(14))
    a = PriceSeries(every_day, np.arange(14.0))
    b = PriceSeries.from_values(np.arange(10.0), start=dt.date(2020, 1, 1))
    pairs = align(a, b)
    assert len(pairs) == 10 <= min(len(a), len(b))
    assert all(d.weekday() < 5 for d, _, _ in pairs)
    assert [d for d, _, _ in pairs] == sorted(d for d, _, _ in pairs)


def test_aggregate_month_mean():
    s = PriceSeries.from_values(np.arange(1.0, 41.0), start=dt.date(2014, 3, 3))
    windows = partition(s, WindowSpec(WindowKind.MONTH))
    ref = PriceSeries.from_values(np.full(60, 2.0), start=dt.date(2014, 2, 3))
    out = dict(aggregate(ref, windows, WindowSpec(WindowKind.MONTH)))
    assert out == {"2014-03": 2.0, "2014-04": 2.0}
    last = dict(aggregate(s, windows, WindowSpec(WindowKind.MONTH), "last"))
    assert last["2014-03"] == 21.0
