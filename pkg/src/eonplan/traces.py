"""Traffic trace ingestion.

Parses traffic-matrix files (csv rows or SNDlib-style XML matrices), aggregates
demands per source node, and exposes uniform per-source bit-rate series at the
base sampling period (5 minutes for the Abilene data).
"""

from __future__ import annotations

import csv
import math
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .errors import ParseError, ValidationError

DEFAULT_BASE_PERIOD_MIN = 5.0

CSV_HEADER = ("timestamp", "src", "dst", "gbps")


@dataclass(frozen=True)
class TrafficTrace:
    """Per-source time series of aggregated bit-rates (Gbps) at a fixed period.

    ``samples[t]`` is the sum of demands from ``source_id`` to all other nodes
    at sampling step ``t``.  Samples are non-negative and finite; ordering is
    strictly time-increasing with constant ``base_period`` (minutes).
    """

    source_id: str
    samples: np.ndarray = field(repr=False)
    base_period: float = DEFAULT_BASE_PERIOD_MIN

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValidationError(f"trace {self.source_id}: samples must be 1-D")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"trace {self.source_id}: non-finite sample")
        if np.any(arr < 0):
            raise ValidationError(f"trace {self.source_id}: negative bit-rate")
        if self.base_period <= 0:
            raise ValidationError(f"trace {self.source_id}: base_period must be > 0")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    def slice(self, first: int, count: int) -> "TrafficTrace":
        """Contiguous sub-series of ``count`` samples starting at ``first``."""
        if first < 0 or count < 0 or first + count > len(self.samples):
            raise IndexError(
                f"slice [{first}, {first + count}) out of range for "
                f"{len(self.samples)} samples"
            )
        return TrafficTrace(self.source_id, self.samples[first : first + count].copy(), self.base_period)


def _parse_timestamp(raw: str, lineno: int) -> float:
    """Timestamp as minutes: numeric values verbatim, ISO datetimes converted."""
    text = raw.strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise ParseError(f"line {lineno}: unparseable timestamp {raw!r}") from None
    return dt.timestamp() / 60.0


def _uniform_period(timestamps: list[float]) -> float:
    if len(timestamps) < 2:
        return DEFAULT_BASE_PERIOD_MIN
    deltas = np.diff(np.asarray(timestamps, dtype=np.float64))
    if np.any(deltas <= 0):
        raise ValidationError("timestamps are not strictly increasing")
    if not np.allclose(deltas, deltas[0], rtol=0, atol=1e-9 * max(1.0, abs(deltas[0]))):
        raise ValidationError(
            f"non-uniform timestamps: spacing varies between {deltas.min()} and {deltas.max()} minutes"
        )
    return float(deltas[0])


def _parse_csv(path: str) -> dict[str, TrafficTrace]:
    records: list[tuple[float, str, str, float]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = None
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if row[0].lstrip().startswith("#"):
                continue
            if header is None:
                header = [c.strip().lower() for c in row]
                if header != list(CSV_HEADER):
                    raise ParseError(
                        f"line {lineno}: expected header {','.join(CSV_HEADER)!r}, got {','.join(row)!r}"
                    )
                continue
            if len(row) != 4:
                raise ParseError(f"line {lineno}: expected 4 fields, got {len(row)}")
            ts = _parse_timestamp(row[0], lineno)
            src, dst = row[1].strip(), row[2].strip()
            if not src or not dst:
                raise ParseError(f"line {lineno}: empty src/dst")
            try:
                gbps = float(row[3])
            except ValueError:
                raise ParseError(f"line {lineno}: unparseable bit-rate {row[3]!r}") from None
            if not math.isfinite(gbps):
                raise ValidationError(f"line {lineno}: non-finite bit-rate")
            if gbps < 0:
                raise ValidationError(f"line {lineno}: negative bit-rate {gbps}")
            records.append((ts, src, dst, gbps))
    if header is None:
        raise ParseError(f"{path}: empty file")
    if not records:
        raise ParseError(f"{path}: no demand rows")
    return _aggregate(records)


def _aggregate(records: list[tuple[float, str, str, float]]) -> dict[str, TrafficTrace]:
    """Sum demands per (source, timestamp); self-demands are skipped."""
    timestamps = sorted({ts for ts, _, _, _ in records})
    period = _uniform_period(timestamps)
    index = {ts: i for i, ts in enumerate(timestamps)}
    sums: dict[str, np.ndarray] = {}
    for ts, src, dst, gbps in records:
        if src == dst:
            continue
        if src not in sums:
            sums[src] = np.zeros(len(timestamps), dtype=np.float64)
        sums[src][index[ts]] += gbps
    return {
        src: TrafficTrace(src, series, period) for src, series in sorted(sums.items())
    }


def _demand_elements(root: ET.Element):
    # SNDlib files may carry a default namespace; match on local names.
    for elem in root.iter():
        if elem.tag.split("}")[-1] == "demand":
            yield elem


def _child_text(elem: ET.Element, name: str) -> str | None:
    for child in elem.iter():
        if child.tag.split("}")[-1] == name:
            return (child.text or "").strip()
    return None


def _parse_sndlib_xml(path: str, base_period: float) -> dict[str, TrafficTrace]:
    """One matrix per XML file; a directory is read as a chronological sequence
    of matrices in sorted filename order."""
    if os.path.isdir(path):
        files = sorted(
            os.path.join(path, f) for f in os.listdir(path) if f.endswith(".xml")
        )
        if not files:
            raise ParseError(f"{path}: no .xml matrix files")
    else:
        files = [path]

    records: list[tuple[float, str, str, float]] = []
    for step, fname in enumerate(files):
        try:
            root = ET.parse(fname).getroot()
        except ET.ParseError as exc:
            raise ParseError(f"{fname}: {exc}") from None
        found = False
        for demand in _demand_elements(root):
            src = _child_text(demand, "source")
            dst = _child_text(demand, "target")
            val = _child_text(demand, "demandValue")
            if src is None or dst is None or val is None:
                raise ParseError(f"{fname}: demand element missing source/target/demandValue")
            try:
                gbps = float(val)
            except ValueError:
                raise ParseError(f"{fname}: unparseable demandValue {val!r}") from None
            if gbps < 0:
                raise ValidationError(f"{fname}: negative bit-rate {gbps}")
            records.append((step * base_period, src, dst, gbps))
            found = True
        if not found:
            raise ParseError(f"{fname}: no demand elements")
    return _aggregate(records)


def parse_trace_file(path: str, format: str = "csv", base_period: float = DEFAULT_BASE_PERIOD_MIN) -> dict[str, TrafficTrace]:
    """Parse a traffic-matrix file into one aggregated TrafficTrace per source node.

    ``format`` is ``"csv"`` (rows ``timestamp,src,dst,gbps``, header required)
    or ``"sndlib-xml"`` (single matrix file, or a directory of per-timestamp
    matrices).  Missing (src, dst, t) entries count as 0 Gbps.
    """
    if not os.path.exists(path):
        raise ParseError(f"{path}: no such file")
    if format == "csv":
        return _parse_csv(path)
    if format == "sndlib-xml":
        return _parse_sndlib_xml(path, base_period)
    raise ParseError(f"unknown trace format {format!r}")


def export_trace_csv(trace: TrafficTrace, path: str) -> None:
    """Write an aggregated trace back out in the csv trace format.

    The destination column carries the pseudo-node ``_agg`` so re-parsing sums
    a single row per timestamp; float repr keeps the round trip bit-exact.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for i, value in enumerate(trace.samples):
            writer.writerow([repr(i * trace.base_period), trace.source_id, "_agg", repr(float(value))])
