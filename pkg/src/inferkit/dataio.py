"""File formats: temperature CSV input and histogram CSV/JSON output.

The temperature input is monthly station data with the exact header
``date,avg_temp,ci95``: ISO dates, the month's average reading, and the
95% confidence interval width of that reading (always positive).  Rows
must be in strictly increasing date order.  The loader keeps the years
1756 through 2015 inclusive -- thirteen complete twenty-year blocks --
and drops everything outside that window with one warning naming the
count.

Histograms are written as CSV with columns ``value,log_weight,weight``:
``log_weight`` is the raw log weight exactly as held in memory (floats
are rendered with ``repr`` so they round-trip bit for bit), ``weight``
is the normalised probability of the entry.  Metadata (seed, algorithm,
parameters) rides in ``#``-prefixed comment lines above the header.  The
JSON format mirrors the same three fields per entry plus the metadata
mapping.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DataFormatError, DegenerateHistogram
from .inference import Histogram
from .logweight import LogWeight
from .models import MonthObservations

__all__ = [
    "WINDOW_START_YEAR",
    "WINDOW_END_YEAR",
    "N_BLOCKS",
    "BLOCK_YEARS",
    "MonthlyRecord",
    "BlockSeries",
    "load_temperature_csv",
    "ci95_to_std",
    "slice_blocks",
    "write_histogram",
    "read_histogram",
]

logger = logging.getLogger("inferkit.dataio")

WINDOW_START_YEAR = 1756
WINDOW_END_YEAR = 2016  # exclusive
BLOCK_YEARS = 20
N_BLOCKS = (WINDOW_END_YEAR - WINDOW_START_YEAR) // BLOCK_YEARS  # 13

_HEADER = "date,avg_temp,ci95"


@dataclass(frozen=True, slots=True)
class MonthlyRecord:
    """One monthly reading: year, month (1..12), average, CI95 width."""

    year: int
    month: int
    avg_temp: float
    ci95: float


@dataclass(frozen=True, slots=True)
class BlockSeries:
    """One calendar month's observations across all 13 blocks."""

    month: int
    blocks: tuple

    def __post_init__(self):
        if len(self.blocks) != N_BLOCKS:
            raise ValueError(f"expected {N_BLOCKS} blocks, got {len(self.blocks)}")


def _parse_date(text: str, lineno: int):
    parts = text.split("-")
    if len(parts) != 3:
        raise DataFormatError(f"line {lineno}: date {text!r} is not YYYY-MM-DD")
    try:
        year, month, day = (int(p) for p in parts)
    except ValueError:
        raise DataFormatError(f"line {lineno}: date {text!r} is not YYYY-MM-DD") from None
    if len(parts[0]) != 4 or len(parts[1]) != 2 or len(parts[2]) != 2:
        raise DataFormatError(f"line {lineno}: date {text!r} is not zero-padded YYYY-MM-DD")
    if not 1 <= month <= 12:
        raise DataFormatError(f"line {lineno}: month {month} out of range 1..12")
    if not 1 <= day <= 31:
        raise DataFormatError(f"line {lineno}: day {day} out of range 1..31")
    return year, month


def load_temperature_csv(path) -> list:
    """Parse a temperature CSV, keeping rows inside the 1756-2015 window.

    Raises :class:`DataFormatError` naming the offending line for any
    structural problem; rows outside the window are dropped and their
    count logged as one warning.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataFormatError("line 1: file is empty; expected header " + repr(_HEADER))
    if lines[0].strip() != _HEADER:
        raise DataFormatError(f"line 1: expected header {_HEADER!r}, got {lines[0]!r}")
    records = []
    dropped = 0
    prev_key = None
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            raise DataFormatError(f"line {lineno}: blank line inside data")
        fields = raw.split(",")
        if len(fields) != 3:
            raise DataFormatError(f"line {lineno}: expected 3 fields, got {len(fields)}")
        year, month = _parse_date(fields[0].strip(), lineno)
        try:
            avg_temp = float(fields[1])
            ci95 = float(fields[2])
        except ValueError:
            raise DataFormatError(f"line {lineno}: non-numeric reading {raw!r}") from None
        if math.isnan(avg_temp) or math.isinf(avg_temp):
            raise DataFormatError(f"line {lineno}: avg_temp must be finite, got {fields[1]}")
        if not ci95 > 0.0 or math.isinf(ci95):
            raise DataFormatError(f"line {lineno}: ci95 must be positive and finite, got {fields[2]}")
        key = (year, month)
        if prev_key is not None and key <= prev_key:
            raise DataFormatError(f"line {lineno}: rows out of order ({key} after {prev_key})")
        prev_key = key
        if not WINDOW_START_YEAR <= year < WINDOW_END_YEAR:
            dropped += 1
            continue
        records.append(MonthlyRecord(year, month, avg_temp, ci95))
    if dropped:
        logger.warning(
            "dropped %d rows outside %d-%d", dropped, WINDOW_START_YEAR, WINDOW_END_YEAR - 1
        )
    return records


def ci95_to_std(ci95: float) -> float:
    """Measurement standard deviation from a 95% CI width (two-sided z)."""
    if not ci95 > 0.0:
        raise ValueError(f"ci95 must be positive, got {ci95}")
    return ci95 / 3.92


def slice_blocks(records: Sequence[MonthlyRecord]) -> list:
    """Partition complete records into 12 month series of 13 blocks each.

    Requires every (year, month) of the 1756-2015 window exactly once;
    gaps and duplicates are reported by name.  In each returned
    :class:`BlockSeries`, block ``b`` covers years ``1756 + 20b``
    through ``1775 + 20b`` chronologically, so every input record lands
    in exactly one block of exactly one series.
    """
    seen = {}
    for rec in records:
        if not WINDOW_START_YEAR <= rec.year < WINDOW_END_YEAR:
            raise DataFormatError(
                f"record year {rec.year} outside {WINDOW_START_YEAR}-{WINDOW_END_YEAR - 1}"
            )
        key = (rec.year, rec.month)
        if key in seen:
            raise DataFormatError(f"duplicate record for {rec.year}-{rec.month:02d}")
        seen[key] = rec
    missing = [
        (y, m)
        for y in range(WINDOW_START_YEAR, WINDOW_END_YEAR)
        for m in range(1, 13)
        if (y, m) not in seen
    ]
    if missing:
        head = ", ".join(f"{y}-{m:02d}" for y, m in missing[:5])
        tail = ", ..." if len(missing) > 5 else ""
        raise DataFormatError(f"coverage gaps: {len(missing)} month(s) missing ({head}{tail})")
    series = []
    for month in range(1, 13):
        blocks = []
        for b in range(N_BLOCKS):
            first = WINDOW_START_YEAR + b * BLOCK_YEARS
            bucket = [seen[(y, month)] for y in range(first, first + BLOCK_YEARS)]
            blocks.append(
                MonthObservations(
                    ys=tuple(r.avg_temp for r in bucket),
                    vs=tuple(ci95_to_std(r.ci95) for r in bucket),
                )
            )
        series.append(BlockSeries(month=month, blocks=tuple(blocks)))
    return series


def _fmt_of(path, fmt: Optional[str]) -> str:
    if fmt is not None:
        if fmt not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
        return fmt
    return "json" if str(path).endswith(".json") else "csv"


def write_histogram(h: Histogram, path, metadata: Optional[dict] = None, fmt: Optional[str] = None):
    """Write a histogram with its normalised weights.

    ``log_weight`` columns carry the raw stored values; the ``weight``
    column is each entry's share of the total mass.  Values must be
    numeric.  Metadata values are stringified; insertion order is kept in
    CSV comments, keys are sorted in JSON.
    """
    total = h.total()
    if total.is_zero():
        raise DegenerateHistogram("refusing to write a histogram with zero total mass")
    metadata = metadata or {}
    fmt = _fmt_of(path, fmt)
    rows = [
        (float(v), w.log_value, math.exp(w.log_value - total.log_value)) for w, v in h.entries
    ]
    if fmt == "csv":
        out = []
        for key, value in metadata.items():
            key = str(key)
            if "=" in key or "\n" in key or "\n" in str(value):
                raise ValueError(f"metadata key/value may not contain '=' or newlines: {key!r}")
            out.append(f"# {key}={value}")
        out.append("value,log_weight,weight")
        for v, lw, w in rows:
            out.append(f"{v!r},{lw!r},{w!r}")
        text = "\n".join(out) + "\n"
    else:
        doc = {
            "metadata": {str(k): str(v) for k, v in metadata.items()},
            "entries": [{"value": v, "log_weight": lw, "weight": w} for v, lw, w in rows],
        }
        text = json.dumps(doc, sort_keys=True, indent=None, separators=(",", ":")) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_histogram(path, fmt: Optional[str] = None):
    """Read a histogram file back; returns ``(metadata, histogram, weights)``.

    ``histogram`` holds the raw log weights (bit-exact for files written
    by :func:`write_histogram`); ``weights`` is the normalised-weight
    column as written.
    """
    fmt = _fmt_of(path, fmt)
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"invalid histogram JSON: {exc}") from exc
        meta = dict(doc.get("metadata", {}))
        entries = []
        weights = []
        for e in doc.get("entries", []):
            entries.append((LogWeight(float(e["log_weight"])), float(e["value"])))
            weights.append(float(e["weight"]))
        return meta, Histogram(entries), weights
    lines = text.splitlines()
    meta = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        body = lines[i][1:].strip()
        key, sep, value = body.partition("=")
        if sep:
            meta[key.strip()] = value
        i += 1
    if i >= len(lines) or lines[i] != "value,log_weight,weight":
        raise DataFormatError(f"line {i + 1}: expected histogram header 'value,log_weight,weight'")
    entries = []
    weights = []
    for lineno, raw in enumerate(lines[i + 1 :], start=i + 2):
        if not raw.strip():
            continue
        fields = raw.split(",")
        if len(fields) != 3:
            raise DataFormatError(f"line {lineno}: expected 3 fields, got {len(fields)}")
        try:
            v, lw, w = (float(f) for f in fields)
        except ValueError:
            raise DataFormatError(f"line {lineno}: non-numeric histogram row {raw!r}") from None
        entries.append((LogWeight(lw), v))
        weights.append(w)
    return meta, Histogram(entries), weights
