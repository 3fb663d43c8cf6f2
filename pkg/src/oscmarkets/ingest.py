"""Price data ingestion: CSV parsing, weekly resampling, displacement series.

Input is UTF-8 CSV with a `date,close` header (extra columns ignored).
Daily data is resampled to weekly bars by keeping the last available close
of each ISO-8601 week (Mon-Sun); weekly input passes through unchanged.
Gaps are never filled: a displacement simply spans the gap, since markets
pick up where they left off.

Displacement series are serializable to CSV with header
`week_end,x_a,x_b,ratio`; floats are written with repr so a round trip
through text is exact.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass, field
from typing import IO, Union

from .errors import DataError
from .model import Displacement, displacement_ratio

__all__ = [
    "PricePoint",
    "PriceSeries",
    "DisplacementEntry",
    "DisplacementSeries",
    "parse_prices",
    "parse_displacements",
    "to_displacements",
    "window",
    "write_prices",
    "write_displacements",
]

WEEK_UNIT = "1 trading week"

TextSource = Union[str, bytes, IO]


@dataclass(frozen=True)
class PricePoint:
    week_end: dt.date
    close: float

    def __post_init__(self):
        if not isinstance(self.week_end, dt.date):
            raise DataError(f"week_end must be a date, got {self.week_end!r}")
        close = float(self.close)
        if not close > 0.0:
            raise DataError(f"close must be > 0, got {close}")
        object.__setattr__(self, "close", close)


@dataclass(frozen=True)
class PriceSeries:
    """Ordered weekly closes for one asset."""

    asset_id: str
    points: tuple[PricePoint, ...]
    unit: str = WEEK_UNIT

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) < 2:
            raise DataError(
                f"price series needs at least 2 points, got {len(self.points)}"
            )
        for prev, cur in zip(self.points, self.points[1:]):
            if cur.week_end <= prev.week_end:
                raise DataError(
                    f"dates must be strictly increasing: {prev.week_end} "
                    f"followed by {cur.week_end}"
                )

    def closes(self) -> list[float]:
        return [p.close for p in self.points]


@dataclass(frozen=True)
class DisplacementEntry:
    """A weekly displacement tagged with the week's end date."""

    week_end: dt.date
    value: Displacement

    @property
    def x_a(self) -> float:
        return self.value.x_a

    @property
    def x_b(self) -> float:
        return self.value.x_b

    @property
    def ratio(self) -> float:
        return self.value.ratio


@dataclass(frozen=True)
class DisplacementSeries:
    """Dated weekly displacements.

    Price-derived series (to_displacements) additionally chain, each week
    opening at the prior week's close; synthetic series fabricate their
    endpoints, so chaining is a property of the derivation, not the type.
    """

    asset_id: str
    entries: tuple[DisplacementEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise DataError("displacement series must not be empty")
        for prev, cur in zip(self.entries, self.entries[1:]):
            if cur.week_end <= prev.week_end:
                raise DataError(
                    f"dates must be strictly increasing: {prev.week_end} "
                    f"followed by {cur.week_end}"
                )

    def __len__(self) -> int:
        return len(self.entries)

    def ratios(self) -> list[float]:
        return [e.ratio for e in self.entries]


def _as_text(source: TextSource) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DataError(f"input is not valid UTF-8: {exc}") from None
    return source


def _skip(row) -> bool:
    """Blank lines and `#` comment lines (config echoes) carry no data."""
    if not any(cell.strip() for cell in row):
        return True
    return row[0].lstrip().startswith("#")


def _read_rows(text: str, required: tuple[str, ...]):
    """Yield (line_number, row_dict) for each non-blank CSV data row."""
    reader = csv.reader(io.StringIO(text))
    header = None
    for row in reader:
        if _skip(row):
            continue
        header = [cell.strip().lower() for cell in row]
        break
    if header is None:
        raise DataError("no rows: input is empty")
    idx = {}
    for name in required:
        if name not in header:
            raise DataError(f"missing required column {name!r} in header")
        idx[name] = header.index(name)
    n_any = False
    for row in reader:
        if _skip(row):
            continue
        if len(row) < len(header):
            raise DataError(
                f"line {reader.line_num}: expected {len(header)} fields, "
                f"got {len(row)}"
            )
        n_any = True
        yield reader.line_num, {k: row[i].strip() for k, i in idx.items()}
    if not n_any:
        raise DataError("no rows: header present but no data")


def _parse_date(lineno: int, text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise DataError(f"line {lineno}: bad date {text!r}") from None


def _parse_float(lineno: int, name: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"line {lineno}: bad {name} {text!r}") from None
    if not math.isfinite(value):
        raise DataError(f"line {lineno}: non-finite {name} {text!r}")
    return value


def _resample_weekly(rows: list[tuple[int, dt.date, float]]):
    """Keep the last close of each ISO week; dates stay as observed."""
    out: list[tuple[int, dt.date, float]] = []
    last_key = None
    for lineno, day, close in rows:
        key = day.isocalendar()[:2]
        if key == last_key:
            out[-1] = (lineno, day, close)
        else:
            out.append((lineno, day, close))
            last_key = key
    return out


def parse_prices(source: TextSource, fmt: str = "weekly_csv",
                 asset_id: str = "asset") -> PriceSeries:
    """Parse `date,close` CSV into a weekly PriceSeries.

    fmt is "weekly_csv" (rows are already weekly bars) or "daily_csv"
    (rows are trading days, collapsed to the last close of each ISO week).
    Rows must be in strictly increasing date order either way.
    """
    if fmt not in ("weekly_csv", "daily_csv"):
        raise DataError(f"unknown price format {fmt!r}")
    rows: list[tuple[int, dt.date, float]] = []
    seen: set[dt.date] = set()
    for lineno, cells in _read_rows(_as_text(source), ("date", "close")):
        day = _parse_date(lineno, cells["date"])
        close = _parse_float(lineno, "close", cells["close"])
        if close <= 0.0:
            raise DataError(f"line {lineno}: non-positive close {close}")
        if day in seen:
            raise DataError(f"line {lineno}: duplicate date {day}")
        if rows and day <= rows[-1][1]:
            raise DataError(
                f"line {lineno}: date {day} not after {rows[-1][1]}"
            )
        seen.add(day)
        rows.append((lineno, day, close))
    if fmt == "daily_csv":
        rows = _resample_weekly(rows)
    points = tuple(PricePoint(week_end=d, close=c) for _, d, c in rows)
    return PriceSeries(asset_id=asset_id, points=points)


def to_displacements(series: PriceSeries) -> DisplacementSeries:
    """Weekly displacements x = close[i+1]/close[i] - 1, dated by the
    later week; each week opens at the prior week's close."""
    entries = []
    for prev, cur in zip(series.points, series.points[1:]):
        entries.append(DisplacementEntry(
            week_end=cur.week_end,
            value=displacement_ratio(prev.close, cur.close),
        ))
    return DisplacementSeries(asset_id=series.asset_id, entries=tuple(entries))


def window(series: DisplacementSeries, start_index: int,
           count: int) -> DisplacementSeries:
    """Contiguous sub-series of `count` entries starting at start_index."""
    n = len(series.entries)
    if start_index < 0 or count < 1 or start_index + count > n:
        raise DataError(
            f"window [{start_index}, {start_index + count}) out of range "
            f"for series of {n} entries"
        )
    return DisplacementSeries(
        asset_id=series.asset_id,
        entries=series.entries[start_index:start_index + count],
    )


def parse_displacements(source: TextSource,
                        asset_id: str = "asset") -> DisplacementSeries:
    """Parse `week_end,x_a,x_b,ratio` CSV into a DisplacementSeries."""
    entries = []
    cols = ("week_end", "x_a", "x_b", "ratio")
    for lineno, cells in _read_rows(_as_text(source), cols):
        day = _parse_date(lineno, cells["week_end"])
        x_a = _parse_float(lineno, "x_a", cells["x_a"])
        x_b = _parse_float(lineno, "x_b", cells["x_b"])
        ratio = _parse_float(lineno, "ratio", cells["ratio"])
        try:
            value = Displacement(x_a=x_a, x_b=x_b, ratio=ratio)
        except Exception as exc:
            raise DataError(f"line {lineno}: {exc}") from None
        entries.append(DisplacementEntry(week_end=day, value=value))
    return DisplacementSeries(asset_id=asset_id, entries=tuple(entries))


def write_prices(series: PriceSeries, fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["date", "close"])
    for p in series.points:
        writer.writerow([p.week_end.isoformat(), repr(p.close)])


def write_displacements(series: DisplacementSeries, fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["week_end", "x_a", "x_b", "ratio"])
    for e in series.entries:
        writer.writerow([e.week_end.isoformat(), repr(e.x_a), repr(e.x_b),
                         repr(e.ratio)])
