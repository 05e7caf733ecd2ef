"""Abilene scenario: the 12-node / 15-fiber backbone and a trace synthesizer.

Link lengths are great-circle distances computed from the published SNDlib
node coordinates (longitude, latitude); fibers are modeled as two directed
links of equal length.

The synthesizer produces per-source bit-rate series with the texture of
backbone traffic (diurnal double-harmonic cycle, weekly drift, AR(1) noise),
deterministic in the seed, for runs where the original 6-month archive is not
on disk.  It can also emit the per-pair csv trace format so the ingest path is
exercised end to end.
"""

from __future__ import annotations

import csv

import numpy as np

from .topology import Topology, great_circle_km
from .traces import CSV_HEADER, TrafficTrace

SAMPLES_PER_DAY = 288  # 5-minute sampling

NODE_COORDS: dict[str, tuple[float, float]] = {
    # (longitude, latitude), SNDlib abilene network section
    "ATLAM5": (-84.3833, 33.75),
    "ATLAng": (-85.50, 34.50),
    "CHINng": (-87.6167, 41.8333),
    "DNVRng": (-105.00, 40.75),
    "HSTNng": (-95.517364, 29.770031),
    "IPLSng": (-86.159535, 39.780622),
    "KSCYng": (-96.596704, 38.961694),
    "LOSAng": (-118.25, 34.05),
    "NYCMng": (-73.9667, 40.7833),
    "SNVAng": (-122.02553, 37.38575),
    "STTLng": (-122.30, 47.60),
    "WASHng": (-77.026842, 38.897303),
}

FIBERS: list[tuple[str, str]] = [
    ("ATLAM5", "ATLAng"),
    ("ATLAng", "HSTNng"),
    ("ATLAng", "IPLSng"),
    ("ATLAng", "WASHng"),
    ("CHINng", "IPLSng"),
    ("CHINng", "NYCMng"),
    ("DNVRng", "KSCYng"),
    ("DNVRng", "SNVAng"),
    ("DNVRng", "STTLng"),
    ("HSTNng", "KSCYng"),
    ("HSTNng", "LOSAng"),
    ("IPLSng", "KSCYng"),
    ("LOSAng", "SNVAng"),
    ("NYCMng", "WASHng"),
    ("SNVAng", "STTLng"),
]


def topology() -> Topology:
    """The Abilene graph: 12 nodes, 15 fibers, 30 directed links."""
    edges = {
        (a, b): great_circle_km(NODE_COORDS[a], NODE_COORDS[b]) for a, b in FIBERS
    }
    return Topology.from_undirected(edges)


def synth_traces(seed: int = 0, days: int = 17,
                 base_gbps_range: tuple[float, float] = (2.6, 5.2)) -> dict[str, TrafficTrace]:
    """Deterministic Abilene-like per-source series, ``days * 288`` samples each.

    The texture mimics backbone aggregates: a weekly swing shared by all
    sources (weekend trough, weekday ramp), a diurnal double harmonic with
    busy hours staggered around the clock, day-to-day peak-height variation,
    and AR(1) multiplicative noise.  Everything is derived from the seed.
    """
    n = days * SAMPLES_PER_DAY
    t = np.arange(n, dtype=np.float64)
    day_phase = 2 * np.pi * t / SAMPLES_PER_DAY
    week_phase = 2 * np.pi * t / (7 * SAMPLES_PER_DAY)
    # shared weekly phase: trough near day 13.5, crest near day 17
    week_phi = -np.pi / 2 - 2 * np.pi * ((13.5 / 7) % 1.0)
    traces = {}
    n_nodes = len(NODE_COORDS)
    for i, node in enumerate(sorted(NODE_COORDS)):
        rng = np.random.default_rng([seed, i])
        base = rng.uniform(*base_gbps_range)
        # busy hours staggered around the clock so sources are anti-correlated
        phi1 = 2 * np.pi * i / n_nodes + rng.uniform(-0.4, 0.4)
        phi2 = rng.uniform(0, 2 * np.pi)
        amp1 = rng.uniform(0.32, 0.48)
        amp2 = rng.uniform(0.08, 0.18)
        week_amp = rng.uniform(0.18, 0.26)
        # busy-hour height differs day to day, like real backbone traffic
        day_factor = np.repeat(rng.uniform(0.80, 1.25, size=days), SAMPLES_PER_DAY)
        diurnal = 1.0 + day_factor * (
            amp1 * np.sin(day_phase + phi1) + amp2 * np.sin(2 * day_phase + phi2)
        )
        weekly = 1.0 + week_amp * np.sin(week_phase + week_phi)
        # AR(1) noise, stationary std ~5% of the base level
        rho, innov_std = 0.85, 0.05 * np.sqrt(1 - 0.85**2)
        eps = rng.standard_normal(n) * innov_std
        noise = np.empty(n)
        acc = 0.0
        for j in range(n):
            acc = rho * acc + eps[j]
            noise[j] = acc
        series = base * diurnal * weekly * (1.0 + noise)
        np.clip(series, 0.05, None, out=series)
        traces[node] = TrafficTrace(node, series, 5.0)
    return traces


def write_trace_csv(traces: dict[str, TrafficTrace], path: str, seed: int = 0) -> None:
    """Spread each source series over per-destination rows (seeded Dirichlet
    weights) in the ``timestamp,src,dst,gbps`` format, so parsing + aggregation
    reconstructs the per-source series."""
    nodes = sorted(traces)
    lengths = {len(tr) for tr in traces.values()}
    if len(lengths) != 1:
        raise ValueError("all traces must share one length")
    n = lengths.pop()
    period = next(iter(traces.values())).base_period
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for src_i, src in enumerate(nodes):
            rng = np.random.default_rng([seed, 1000 + src_i])
            dsts = [d for d in nodes if d != src]
            weights = rng.dirichlet(np.full(len(dsts), 4.0))
            for step in range(n):
                total = traces[src].samples[step]
                ts = repr(step * period)
                for dst, w in zip(dsts, weights):
                    writer.writerow([ts, src, dst, repr(float(total * w))])
