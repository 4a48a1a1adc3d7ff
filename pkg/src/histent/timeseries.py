"""Dated price series: CSV ingestion, calendar windows and date alignment."""
from __future__ import annotations

import csv
import datetime as dt
import enum
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import (
    DuplicateDate,
    EmptyFile,
    EmptyIntersection,
    EmptySeries,
    MissingColumn,
    UnparseableDate,
    UnparseableValue,
)

logger = logging.getLogger(__name__)

SENTINELS = frozenset({"", "null", "nan", "none", "n/a"})
WEEK_SOFT_CAP = 5
MONTH_SOFT_CAP = 23


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple
    values: np.ndarray
    units: str = ""
    skipped: int = 0

    def __post_init__(self):
        dates = tuple(self.dates)
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if not dates:
            raise EmptySeries("price series is empty")
        if len(dates) != values.shape[0]:
            raise ValueError("dates and values differ in length")
        for prev, cur in zip(dates, dates[1:]):
            if cur == prev:
                raise DuplicateDate(f"duplicate date {cur.isoformat()}")
            if cur < prev:
                raise ValueError("dates must be strictly increasing")
        values.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.dates)

    def slice(self, start: int, stop: int) -> "PriceSeries":
        return PriceSeries(self.dates[start:stop], self.values[start:stop], self.units)

    def between(self, first: dt.date | None = None, last: dt.date | None = None) -> "PriceSeries":
        """Sub-series with ``first <= date <= last`` (bounds optional)."""
        idx = [
            i for i, d in enumerate(self.dates)
            if (first is None or d >= first) and (last is None or d <= last)
        ]
        if not idx:
            raise EmptySeries("no observations in the requested date range")
        return self.slice(idx[0], idx[-1] + 1)

    @classmethod
    def from_values(cls, values: Sequence[float], start: dt.date = dt.date(2000, 1, 3), units: str = "") -> "PriceSeries":
        """Synthetic series on consecutive weekdays starting at ``start``."""
        dates = []
        d = start
        while len(dates) < len(values):
            if d.weekday() < 5:
                dates.append(d)
            d += dt.timedelta(days=1)
        return cls(tuple(dates), np.asarray(values, dtype=np.float64), units)


@dataclass(frozen=True)
class ColumnSchema:
    date_column: str = "Date"
    value_column: str = "Open"
    units: str = ""


REFERENCE_SCHEMA = ColumnSchema(value_column="Close")


def _parse_date(text: str, line: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise UnparseableDate(f"line {line}: cannot parse date {text!r}") from None


def parse_price_csv(stream: TextIO, schema: ColumnSchema = ColumnSchema()) -> PriceSeries:
    """Read a header-first CSV into a sorted :class:`PriceSeries`.

    Rows whose value is empty or a sentinel such as ``null`` are skipped
    and counted in ``PriceSeries.skipped``.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or not any(h.strip() for h in header):
        raise EmptyFile("input has no header row")
    header = [h.strip().lstrip("﻿") for h in header]
    try:
        di = header.index(schema.date_column)
    except ValueError:
        raise MissingColumn(f"missing date column {schema.date_column!r}") from None
    try:
        vi = header.index(schema.value_column)
    except ValueError:
        raise MissingColumn(f"missing value column {schema.value_column!r}") from None

    rows: dict[dt.date, float] = {}
    skipped = 0
    for line, row in enumerate(reader, start=2):
        if not row or not any(c.strip() for c in row):
            continue
        if len(row) <= max(di, vi):
            raise UnparseableValue(f"line {line}: too few fields")
        date = _parse_date(row[di], line)
        raw = row[vi].strip()
        if raw.lower() in SENTINELS:
            skipped += 1
            continue
        try:
            value = float(raw)
        except ValueError:
            raise UnparseableValue(f"line {line}: cannot parse value {raw!r}") from None
        if not math.isfinite(value):
            raise UnparseableValue(f"line {line}: non-finite value {raw!r}")
        if date in rows:
            raise DuplicateDate(f"line {line}: duplicate date {date.isoformat()}")
        rows[date] = value
    if skipped:
        logger.warning("skipped %d rows with missing %s values", skipped, schema.value_column)
    if not rows:
        raise EmptyFile("input has no data rows")
    dates = sorted(rows)
    return PriceSeries(tuple(dates), np.array([rows[d] for d in dates]), schema.units, skipped)


def read_price_csv(path, schema: ColumnSchema = ColumnSchema()) -> PriceSeries:
    with open(Path(path), newline="", encoding="utf-8") as fh:
        return parse_price_csv(fh, schema)


def write_price_csv(series: PriceSeries, stream: TextIO, schema: ColumnSchema = ColumnSchema()) -> None:
    """Normalized two-column CSV; ``parse_price_csv`` reads it back exactly."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([schema.date_column, schema.value_column])
    for d, v in zip(series.dates, series.values):
        writer.writerow([d.isoformat(), repr(float(v))])


class WindowKind(enum.Enum):
    MONTH = "month"
    WEEK = "week"
    FIXED = "fixed"


@dataclass(frozen=True)
class WindowSpec:
    kind: WindowKind
    k: int = 0

    def __post_init__(self):
        if self.kind is WindowKind.FIXED and self.k < 1:
            raise ValueError("fixed windows need k >= 1")

    @classmethod
    def parse(cls, text: str) -> "WindowSpec":
        text = text.strip().lower()
        if text.startswith("fixed:"):
            try:
                k = int(text.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad window {text!r}") from None
            return cls(WindowKind.FIXED, k)
        return cls(WindowKind(text))

    def __str__(self):
        return f"fixed:{self.k}" if self.kind is WindowKind.FIXED else self.kind.value

    @property
    def convention(self) -> str:
        return {
            WindowKind.MONTH: "calendar-month",
            WindowKind.WEEK: "iso-8601-week",
            WindowKind.FIXED: f"fixed-count-{self.k}",
        }[self.kind]


@dataclass(frozen=True)
class Window:
    label: str
    start: int  # index of the first point in the parent series
    points: PriceSeries = field(repr=False)

    def __len__(self):
        return len(self.points)


def _key(date: dt.date, spec: WindowSpec):
    if spec.kind is WindowKind.MONTH:
        return f"{date.year:04d}-{date.month:02d}"
    iso = date.isocalendar()
    return f"{iso[0]:04d}-W{iso[1]:02d}"


def partition(series: PriceSeries, spec: WindowSpec) -> list[Window]:
    """Split into contiguous non-overlapping windows covering every point."""
    n = len(series)
    out: list[Window] = []
    if spec.kind is WindowKind.FIXED:
        for start in range(0, n, spec.k):
            stop = min(start + spec.k, n)
            out.append(Window(f"{start}-{stop - 1}", start, series.slice(start, stop)))
        return out
    start = 0
    current = _key(series.dates[0], spec)
    for i in range(1, n + 1):
        key = _key(series.dates[i], spec) if i < n else None
        if key != current:
            out.append(Window(current, start, series.slice(start, i)))
            start = i
            current = key
    cap = WEEK_SOFT_CAP if spec.kind is WindowKind.WEEK else MONTH_SOFT_CAP
    big = [w.label for w in out if len(w) > cap]
    if big:
        logger.warning("%d windows exceed %d points (first: %s)", len(big), cap, big[0])
    return out


def align(a: PriceSeries, b: PriceSeries) -> list[tuple[dt.date, float, float]]:
    """Inner join of two series on exact dates, sorted by date."""
    bmap = dict(zip(b.dates, b.values))
    out = [(d, float(v), float(bmap[d])) for d, v in zip(a.dates, a.values) if d in bmap]
    if not out:
        raise EmptyIntersection("series share no dates")
    return out


AGGREGATORS = {
    "mean": lambda v: float(np.mean(v)),
    "last": lambda v: float(v[-1]),
    "first": lambda v: float(v[0]),
    "max": lambda v: float(np.max(v)),
}


def aggregate(series: PriceSeries, windows: Iterable[Window], spec: WindowSpec, how: str = "mean") -> list[tuple[str, float]]:
    """Reduce ``series`` over the date span of each window.

    Calendar windows use the full calendar period (every observation of
    ``series`` whose month/week key equals the label); fixed windows use
    the span from their first to last date.
    """
    fn = AGGREGATORS[how]
    dates = np.array([d.toordinal() for d in series.dates])
    out = []
    for w in windows:
        lo = w.points.dates[0].toordinal()
        hi = w.points.dates[-1].toordinal()
        if spec.kind is not WindowKind.FIXED:
            lo, hi = _period_bounds(w.label)
        mask = (dates >= lo) & (dates <= hi)
        if mask.any():
            out.append((w.label, fn(series.values[mask])))
    return out


def _period_bounds(label: str) -> tuple[int, int]:
    if "-W" in label:
        year, week = label.split("-W")
        first = dt.date.fromisocalendar(int(year), int(week), 1)
        return first.toordinal(), first.toordinal() + 6
    year, month = (int(x) for x in label.split("-"))
    first = dt.date(year, month, 1)
    nxt = dt.date(year + (month == 12), month % 12 + 1, 1)
    return first.toordinal(), nxt.toordinal() - 1
