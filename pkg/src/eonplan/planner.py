"""Provisioning heuristics and the multi-period simulation loop.

Three spectrum-allocation schemes share one pipeline: predictions (Gbps) are
converted to slot demands with each connection's worst-case modulation, a plan
picks per-connection target widths, the grid is adjusted (reduce / expand /
re-allocate), and then every true 5-minute fluctuation of the planned horizon
is replayed against the allocation:

* ``mmd`` takes each connection's maximum predicted demand across the u future
  intervals,
* ``mad`` takes every connection's demand at the single interval whose
  aggregate predicted demand is largest (earliest wins ties),
* ``ssd`` takes the next interval's demand only and re-plans every interval.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import spectrum
from .errors import ConfigError, CoverageError
from .predictors import (
    FilePredictor,
    OraclePredictor,
    PersistencePredictor,
    PredictionMatrix,
    PredictorGateway,
)
from .spectrum import Lightpath, SpectrumGrid
from .topology import (
    DEFAULT_MODULATIONS,
    ModulationTable,
    Path,
    Topology,
    required_slots,
    select_modulation,
)
from .traces import TrafficTrace
from .windowing import build_dataset, samples_for_patterns, split

SCHEMES = ("mmd", "mad", "ssd")

PLAN = "plan"
FLUCT = "fluct"


@dataclass(frozen=True)
class Connection:
    """A provisioned source-destination pair with its fixed routing context.

    The modulation comes from the longest of the kappa candidate paths
    (worst-case rule shared by all schemes), so slot conversion never depends
    on which candidate the connection currently occupies.
    """

    connection_id: str
    source: str
    destination: str
    candidate_paths: tuple[Path, ...]
    bits_per_symbol: int
    out_of_reach: bool = False


@dataclass(frozen=True)
class PlanDecision:
    epoch: int
    scheme: str
    targets: dict[str, int] = field(repr=False)
    mad_selected_interval: int | None = None


@dataclass(frozen=True)
class AdjustmentEvent:
    phase: str  # "plan" | "fluct"
    epoch: int
    interval: int
    fluct_index: int | None
    connection_id: str
    action: str
    width_before: int
    width_after: int


@dataclass(frozen=True)
class Metrics:
    scheme: str
    predictor: str
    scale: float
    seed: int
    n_connections: int
    n_intervals: int
    k: int
    blocked_connections: int
    disruptions_total: int
    disruptions_avg: float
    unutilized_fs_avg: float
    action_counts: dict[str, int] = field(default_factory=dict, repr=False)

    def as_record(self) -> dict:
        return {
            "scheme": self.scheme,
            "blocked": self.blocked_connections,
            "disruptions_total": self.disruptions_total,
            "disruptions_avg": self.disruptions_avg,
            "unutilized_avg": self.unutilized_fs_avg,
            "seed": self.seed,
            "predictor": self.predictor,
        }


def slots_matrix(pred: PredictionMatrix, connections: list[Connection],
                 baud_gbaud: float = 10.5, guard_slots: int = 0) -> dict[str, tuple[int, ...]]:
    """Convert a Gbps prediction matrix to per-connection u-step slot demands."""
    by_id = {c.connection_id: c for c in connections}
    out = {}
    for cid, values in pred.rows.items():
        conn = by_id[cid]
        out[cid] = tuple(
            required_slots(v, conn.bits_per_symbol, baud_gbaud, guard_slots) for v in values
        )
    return out


def _matrix_u(matrix: dict[str, tuple[int, ...]]) -> int:
    widths = {len(v) for v in matrix.values()}
    if len(widths) != 1:
        raise ValueError("ragged slot matrix")
    (u,) = widths
    if u < 1:
        raise ValueError("slot matrix needs at least one step")
    return u


def plan_mmd(matrix: dict[str, tuple[int, ...]], epoch: int = 0) -> PlanDecision:
    """Each connection gets its maximum slot demand across all u intervals."""
    _matrix_u(matrix)
    return PlanDecision(epoch, "mmd", {cid: max(row) for cid, row in matrix.items()})


def plan_mad(matrix: dict[str, tuple[int, ...]], epoch: int = 0) -> PlanDecision:
    """Every connection gets its demand at the interval i* maximizing the
    aggregate demand over all connections (earliest interval on ties)."""
    u = _matrix_u(matrix)
    aggregates = [sum(row[i] for row in matrix.values()) for i in range(u)]
    i_star = int(np.argmax(aggregates))  # argmax picks the earliest on ties
    return PlanDecision(
        epoch, "mad", {cid: row[i_star] for cid, row in matrix.items()},
        mad_selected_interval=i_star + 1,
    )


def plan_ssd(matrix: dict[str, tuple[int, ...]], epoch: int = 0) -> PlanDecision:
    """Single-step baseline: the next interval's demand only."""
    _matrix_u(matrix)
    return PlanDecision(epoch, "ssd", {cid: row[0] for cid, row in matrix.items()})


PLANNERS = {"mmd": plan_mmd, "mad": plan_mad, "ssd": plan_ssd}


def _adjust(grid: SpectrumGrid, lp: Lightpath, conn: Connection, target: int) -> str:
    """Move one lightpath to ``target`` slots using the cheapest feasible step."""
    if target == lp.width:
        return spectrum.NOOP
    if target < lp.width:
        return spectrum.reduce(grid, lp, target)
    if lp.width == 0:
        return spectrum.place(grid, lp, list(conn.candidate_paths), target)
    outcome = spectrum.expand(grid, lp, target)
    if outcome == spectrum.INFEASIBLE:
        outcome = spectrum.reallocate(grid, lp, list(conn.candidate_paths), target)
    return outcome


def apply_plan(grid: SpectrumGrid, lightpaths: dict[str, Lightpath],
               connections: list[Connection], decision: PlanDecision) -> list[AdjustmentEvent]:
    """Adjust every connection to its planned width, ascending connection id."""
    events = []
    by_id = {c.connection_id: c for c in connections}
    for cid in sorted(decision.targets):
        conn = by_id[cid]
        if not conn.candidate_paths:
            continue
        lp = lightpaths[cid]
        before = lp.width
        action = _adjust(grid, lp, conn, decision.targets[cid])
        if action != spectrum.NOOP:
            events.append(
                AdjustmentEvent(PLAN, decision.epoch, decision.epoch, None, cid, action, before, lp.width)
            )
    return events


@dataclass(frozen=True)
class SimulationConfig:
    """Everything one run needs; paper defaults throughout."""

    topology: Topology
    traces: dict[str, TrafficTrace]
    scheme: str
    predictor: str = "oracle"  # oracle | persistence | file:PATH
    r: int = 3
    k: int = 6
    u: int = 4
    train_fraction: float = 0.8
    patterns: int | None = 800
    n_slots: int = 320
    baud_gbaud: float = 10.5
    guard_slots: int = 0
    kappa: int = 3
    scale: float = 50.0
    seed: int = 0
    replan_every: int | None = None  # None: every u intervals for mmd/mad, 1 for ssd
    modulations: ModulationTable = DEFAULT_MODULATIONS
    pairs: tuple[tuple[str, str], ...] | None = None  # explicit (src, dst) overrides
    collect_events: bool = False
    audit_every: int = 0  # >0: grid audit every N intervals (debug)


@dataclass
class SimulationResult:
    metrics: Metrics
    events: list[AdjustmentEvent]
    lightpaths: dict[str, Lightpath]
    test_epochs: list[int]
    wall_seconds: float


def build_connections(cfg: SimulationConfig) -> list[Connection]:
    """One connection per source; destinations are seeded-uniform unless pinned."""
    sources = sorted(cfg.traces)
    unknown = [s for s in sources if s not in cfg.topology.nodes]
    if unknown:
        raise ConfigError(f"trace sources missing from topology: {unknown}")
    if cfg.pairs is not None:
        pairs = list(cfg.pairs)
        bad = [p for p in pairs if p[0] not in cfg.traces or p[1] not in cfg.topology.nodes]
        if bad:
            raise ConfigError(f"pairs reference unknown sources/nodes: {bad}")
    else:
        rng = np.random.default_rng(cfg.seed)
        nodes = cfg.topology.nodes
        pairs = []
        for src in sources:
            others = [n for n in nodes if n != src]
            pairs.append((src, others[int(rng.integers(len(others)))]))
    connections = []
    for src, dst in pairs:
        paths = cfg.topology.k_shortest_paths(src, dst, cfg.kappa)
        if paths:
            longest = max(cfg.topology.path_length(p) for p in paths)
            mod = select_modulation(longest, cfg.modulations)
            connections.append(
                Connection(src, src, dst, tuple(paths), mod.bits_per_symbol, mod.out_of_reach)
            )
        else:
            connections.append(Connection(src, src, dst, (), 1, True))
    return connections


def _prepare_window(cfg: SimulationConfig) -> tuple[dict[str, TrafficTrace], list[int]]:
    """Slice traces to the study window and derive the shared test epochs."""
    lengths = {len(t) for t in cfg.traces.values()}
    if len(lengths) != 1:
        raise ConfigError(f"traces differ in length: {sorted(lengths)}")
    if cfg.patterns is not None:
        need = samples_for_patterns(cfg.patterns, cfg.r, cfg.k, cfg.u)
        if need > max(lengths):
            raise ConfigError(
                f"{cfg.patterns} patterns need {need} samples, traces have {max(lengths)}"
            )
        traces = {s: t.slice(0, need) for s, t in cfg.traces.items()}
    else:
        traces = dict(cfg.traces)
    epochs = None
    for source in sorted(traces):
        dataset = build_dataset(traces[source], cfg.r, cfg.k, cfg.u)
        _, test = split(dataset, cfg.train_fraction)
        source_epochs = [s.t_index for s in test]
        if epochs is None:
            epochs = source_epochs
        elif epochs != source_epochs:
            raise ConfigError(f"test epochs of {source} disagree with the other sources")
    if not epochs:
        raise ConfigError("empty test window")
    if epochs != list(range(epochs[0], epochs[0] + len(epochs))):
        raise ConfigError("test epochs are not consecutive intervals")
    return traces, epochs


def _build_backend(cfg: SimulationConfig, traces: dict[str, TrafficTrace]):
    spec = cfg.predictor
    if spec == "oracle":
        return OraclePredictor(traces, cfg.k, cfg.u)
    if spec == "persistence":
        return PersistencePredictor(traces, cfg.k, cfg.u)
    if spec.startswith("file:"):
        return FilePredictor(spec[len("file:"):], cfg.u)
    raise ConfigError(f"unknown predictor spec {spec!r}")


def simulate(cfg: SimulationConfig) -> SimulationResult:
    """Run one scheme over the test window and accumulate the paper's metrics.

    Planning happens at interval boundaries (every interval for ssd, every u
    intervals for mmd/mad unless ``replan_every`` overrides); between plans the
    k true fluctuations of each elapsed interval are replayed: a fluctuation
    needing more than the allocated width triggers expansion, then
    re-allocation (a disruption), then a blocked event.  Unutilized slots are
    sampled after each fluctuation's adjustment.
    """
    if cfg.scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {cfg.scheme!r} (expected one of {SCHEMES})")
    replan_every = cfg.replan_every or (1 if cfg.scheme == "ssd" else cfg.u)
    if replan_every < 1:
        raise ConfigError("replan_every must be >= 1")
    t0 = time.perf_counter()

    traces, test_epochs = _prepare_window(cfg)
    connections = build_connections(cfg)
    backend = _build_backend(cfg, traces)
    boundaries = [test_epochs[p] for p in range(len(test_epochs)) if p % replan_every == 0]
    if isinstance(backend, FilePredictor):
        try:
            backend.validate_coverage([c.source for c in connections], boundaries)
        except CoverageError as exc:
            raise ConfigError(str(exc)) from exc
    gateway = PredictorGateway(backend, cfg.scale)
    planner = PLANNERS[cfg.scheme]

    grid = SpectrumGrid(cfg.topology.links, cfg.n_slots)
    lightpaths = {
        c.connection_id: Lightpath(c.connection_id, c.candidate_paths[0] if c.candidate_paths else (c.source,))
        for c in connections
    }
    for c in connections:
        if not c.candidate_paths:
            lightpaths[c.connection_id].blocked_events += 1  # blocked at setup

    conn_pairs = [(c.connection_id, c.source) for c in connections]
    ordered = sorted(connections, key=lambda c: c.connection_id)
    events: list[AdjustmentEvent] = []
    counts: dict[str, int] = {}
    unutilized_sum = 0
    horizon = len(test_epochs)

    def bump(phase: str, action: str):
        counts[f"{phase}_{action}"] = counts.get(f"{phase}_{action}", 0) + 1

    for p in range(horizon):
        epoch = test_epochs[p]
        if p % replan_every == 0:
            pred = gateway.predict(epoch, conn_pairs)
            matrix = slots_matrix(pred, connections, cfg.baud_gbaud, cfg.guard_slots)
            decision = planner(matrix, epoch)
            for ev in apply_plan(grid, lightpaths, connections, decision):
                bump(PLAN, ev.action)
                if cfg.collect_events:
                    events.append(ev)
        interval = epoch + 1
        for f in range(cfg.k):
            for conn in ordered:
                lp = lightpaths[conn.connection_id]
                if not conn.candidate_paths:
                    continue
                fluct = float(traces[conn.source].samples[interval * cfg.k + f])
                required = required_slots(
                    cfg.scale * fluct, conn.bits_per_symbol, cfg.baud_gbaud, cfg.guard_slots
                )
                if required > lp.width:
                    before = lp.width
                    action = _adjust(grid, lp, conn, required)
                    bump(FLUCT, action)
                    if cfg.collect_events:
                        events.append(
                            AdjustmentEvent(FLUCT, epoch, interval, f, conn.connection_id,
                                            action, before, lp.width)
                        )
                unutilized_sum += max(0, lp.width - required)
        if cfg.audit_every and (p + 1) % cfg.audit_every == 0:
            spectrum.audit(grid, lightpaths.values())

    n_conn = len(connections)
    n_obs = n_conn * horizon * cfg.k
    metrics = Metrics(
        scheme=cfg.scheme,
        predictor=backend.name,
        scale=cfg.scale,
        seed=cfg.seed,
        n_connections=n_conn,
        n_intervals=horizon,
        k=cfg.k,
        blocked_connections=sum(lp.blocked_events for lp in lightpaths.values()),
        disruptions_total=sum(lp.disruptions for lp in lightpaths.values()),
        disruptions_avg=(
            sum(lp.disruptions for lp in lightpaths.values()) / n_conn if n_conn else 0.0
        ),
        unutilized_fs_avg=unutilized_sum / n_obs if n_obs else 0.0,
        action_counts=counts,
    )
    return SimulationResult(metrics, events, lightpaths, test_epochs, time.perf_counter() - t0)
