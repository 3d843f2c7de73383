"""Loading and validation of daily price series.

The data boundary of the package: CSV rows of (date, price) become a
validated :class:`PriceSeries` with strictly positive prices on a uniform
daily grid, from which log-prices and returns are derived.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .errors import (
    DuplicateDate,
    EmptyInput,
    MalformedRow,
    NonPositivePrice,
    NonUniformSpacing,
    SeriesTooShort,
)

ONE_DAY = timedelta(days=1)


def _as_date_array(dates) -> np.ndarray:
    arr = np.asarray(dates, dtype="datetime64[D]")
    if arr.ndim != 1:
        raise ValueError("dates must be one-dimensional")
    return arr


@dataclass
class PriceSeries:
    """Daily closing prices on a uniform one-day grid.

    Prices are strictly positive and dates strictly increasing with no
    gaps.  Two samples are the minimum (returns need a pair); analysis
    entry points enforce their own larger minima.
    """

    dates: np.ndarray
    prices: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.dates = _as_date_array(self.dates)
        self.prices = np.asarray(self.prices, dtype=float)
        if self.prices.ndim != 1 or len(self.prices) != len(self.dates):
            raise ValueError("dates and prices must be 1-d and equally long")
        if len(self.prices) < 2:
            raise SeriesTooShort("a price series needs at least 2 samples")
        if not np.all(np.isfinite(self.prices)):
            raise MalformedRow("non-finite price value")
        if np.any(self.prices <= 0):
            i = int(np.argmax(self.prices <= 0))
            raise NonPositivePrice(f"price {self.prices[i]} at {self.dates[i]}")
        steps = np.diff(self.dates).astype(int)
        if np.any(steps == 0):
            i = int(np.argmax(steps == 0))
            raise DuplicateDate(f"duplicate date {self.dates[i]}")
        if np.any(steps != 1):
            i = int(np.argmax(steps != 1))
            raise NonUniformSpacing(
                f"gap of {steps[i]} days after {self.dates[i]}"
            )

    @property
    def n(self) -> int:
        return len(self.prices)

    def start_date(self) -> date:
        return self.dates[0].astype(date)

    def end_date(self) -> date:
        return self.dates[-1].astype(date)


@dataclass
class LogPriceSeries:
    """Natural log of prices; inherits the date grid."""

    dates: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.dates = _as_date_array(self.dates)
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) != len(self.dates):
            raise ValueError("dates and values must be equally long")
        if not np.all(np.isfinite(self.values)):
            raise MalformedRow("non-finite log-price value")

    @property
    def n(self) -> int:
        return len(self.values)

    def start_date(self) -> date:
        return self.dates[0].astype(date)


@dataclass
class ReturnSeries:
    """Relative price changes; one fewer entry than the source series."""

    dates: np.ndarray
    values: np.ndarray
    label: str = ""

    @property
    def n(self) -> int:
        return len(self.values)


def to_log(p: PriceSeries) -> LogPriceSeries:
    """Elementwise natural log of the prices."""
    return LogPriceSeries(p.dates, np.log(p.prices), p.label)


def to_returns(p: PriceSeries) -> ReturnSeries:
    """Relative changes (P[n+1] - P[n]) / P[n]; dated by the later sample."""
    if p.n < 2:
        raise SeriesTooShort("returns need at least 2 prices")
    values = np.diff(p.prices) / p.prices[:-1]
    return ReturnSeries(p.dates[1:], values, p.label)


def _parse_price(text: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise MalformedRow(f"line {lineno}: cannot parse price {text!r}") from None
    if math.isnan(value) or math.isinf(value):
        raise MalformedRow(f"line {lineno}: non-finite price {text!r}")
    return value


def _parse_date(text: str, lineno: int) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError:
        raise MalformedRow(f"line {lineno}: cannot parse date {text!r}") from None


def _looks_like_data(row: list[str], date_idx: int, price_idx: int) -> bool:
    try:
        date.fromisoformat(row[date_idx].strip())
        float(row[price_idx])
    except (ValueError, IndexError):
        return False
    return True


def _resolve_column(spec, header: list[str] | None, default: int, name: str) -> int:
    if spec is None:
        if header is not None and name in header:
            return header.index(name)
        return default
    if isinstance(spec, int) or (isinstance(spec, str) and spec.isdigit()):
        return int(spec)
    if header is None:
        raise MalformedRow(f"column {spec!r} requested but file has no header")
    if spec not in header:
        raise MalformedRow(f"column {spec!r} not in header {header}")
    return header.index(spec)


def load_csv(
    path,
    date_col=None,
    price_col=None,
    fill_gaps: bool = False,
    max_gap: int = 3,
    label: str | None = None,
) -> PriceSeries:
    """Load a (date, price) CSV into a validated PriceSeries.

    Header is optional; with one present, columns named ``date`` and
    ``price`` are used unless ``date_col``/``price_col`` override them
    (by name or 0-based index).  Rows are sorted by date; duplicate dates
    are an error.  Calendar gaps are an error by default; with
    ``fill_gaps`` runs of at most ``max_gap`` missing days are
    forward-filled with the preceding close.
    """
    if hasattr(path, "read"):
        text = path.read()
        src_label = label if label is not None else "series"
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        src_label = label if label is not None else _stem(path)

    rows = [row for row in csv.reader(io.StringIO(text))]
    rows = [(i + 1, row) for i, row in enumerate(rows) if any(c.strip() for c in row)]
    if not rows:
        raise EmptyInput("no data rows")

    first = rows[0][1]
    probe_date = _resolve_column(date_col, None, 0, "date") if _is_index(date_col) else 0
    probe_price = _resolve_column(price_col, None, 1, "price") if _is_index(price_col) else 1
    has_header = not _looks_like_data(first, probe_date, probe_price)
    header = [c.strip().lower() for c in first] if has_header else None
    if has_header:
        rows = rows[1:]
        if not rows:
            raise EmptyInput("header only, no data rows")

    di = _resolve_column(date_col, header, 0, "date")
    pi = _resolve_column(price_col, header, 1, "price")

    parsed = []
    for lineno, row in rows:
        if max(di, pi) >= len(row):
            raise MalformedRow(f"line {lineno}: expected at least {max(di, pi) + 1} columns")
        d = _parse_date(row[di], lineno)
        v = _parse_price(row[pi], lineno)
        if v <= 0:
            raise NonPositivePrice(f"line {lineno}: price {v} on {d}")
        parsed.append((d, v))

    parsed.sort(key=lambda t: t[0])
    for (d1, _), (d2, _) in zip(parsed, parsed[1:]):
        if d1 == d2:
            raise DuplicateDate(f"duplicate date {d1}")

    if fill_gaps:
        filled = [parsed[0]]
        for d, v in parsed[1:]:
            missing = (d - filled[-1][0]).days - 1
            if missing > max_gap:
                raise NonUniformSpacing(
                    f"{missing} missing days before {d} exceed the fill limit {max_gap}"
                )
            while (d - filled[-1][0]).days > 1:
                filled.append((filled[-1][0] + ONE_DAY, filled[-1][1]))
            filled.append((d, v))
        parsed = filled

    dates = [d for d, _ in parsed]
    prices = [v for _, v in parsed]
    return PriceSeries(np.array(dates, dtype="datetime64[D]"), prices, src_label)


def _is_index(spec) -> bool:
    return spec is not None and (isinstance(spec, int) or str(spec).isdigit())


def _stem(path) -> str:
    name = str(path).replace("\\", "/").rsplit("/", 1)[-1]
    return name.rsplit(".", 1)[0] if "." in name else name


def write_csv(series: PriceSeries, out) -> None:
    """Emit the canonical ``date,price`` form (UTF-8, header included)."""
    own = not hasattr(out, "write")
    fh = open(out, "w", encoding="utf-8", newline="") if own else out
    try:
        fh.write("date,price\n")
        for d, v in zip(series.dates, series.prices):
            fh.write(f"{d},{float(v)!r}\n")
    finally:
        if own:
            fh.close()
