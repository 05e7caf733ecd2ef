"""Command-line front end: ingest, simulate, compare, paths.

Exit codes are a stable contract: 0 success, 2 configuration/input error,
3 internal invariant violation.  Every output file embeds the fully resolved
run configuration for reproducibility.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import abilene
from .errors import ConfigError, EonPlanError
from .planner import SCHEMES, SimulationConfig, simulate
from .topology import (
    DEFAULT_MODULATIONS,
    Topology,
    load_modulation_csv,
    load_topology_csv,
    load_topology_sndlib_xml,
    select_modulation,
)
from .traces import parse_trace_file
from .windowing import (
    build_dataset,
    export_dataset_csv,
    fit_normalizer,
    normalize_samples,
    samples_for_patterns,
    split,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3

PAPER_DEFAULTS = dict(
    r=3, k=6, u=4, train_fraction=0.8, patterns=800, slots=320,
    baud=10.5, guard_slots=0, kappa=3, scale=50.0, seed=0,
)


def _read_config_file(path: str) -> dict:
    """KEY = VALUE lines (#-comments allowed) mapping 1:1 to flag names."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path} line {lineno}: expected KEY = VALUE")
                key, _, value = line.partition("=")
                values[key.strip().replace("-", "_")] = value.strip()
        return values
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc


def _load_topology(spec: str) -> Topology:
    if spec == "abilene":
        return abilene.topology()
    if spec.endswith(".xml"):
        return load_topology_sndlib_xml(spec)
    return load_topology_csv(spec)


def _load_traces(args) -> dict:
    if args.trace == "synth":
        return abilene.synth_traces(seed=args.synth_seed, days=args.synth_days)
    return parse_trace_file(args.trace, args.trace_format)


def _resolved(args, skip=("func", "config")) -> dict:
    return {
        k: v for k, v in sorted(vars(args).items()) if k not in skip and not k.startswith("_")
    }


def _add_common_inputs(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value config file (flags override it)")
    p.add_argument("--trace", default="synth",
                   help="trace file path, or 'synth' for the seeded Abilene-like generator")
    p.add_argument("--trace-format", default="csv", choices=["csv", "sndlib-xml"])
    p.add_argument("--synth-seed", type=int, default=0)
    p.add_argument("--synth-days", type=int, default=17)
    p.add_argument("--r", type=int, default=PAPER_DEFAULTS["r"])
    p.add_argument("--k", type=int, default=PAPER_DEFAULTS["k"])
    p.add_argument("--u", type=int, default=PAPER_DEFAULTS["u"])
    p.add_argument("--train-fraction", type=float, default=PAPER_DEFAULTS["train_fraction"])
    p.add_argument("--patterns", type=int, default=PAPER_DEFAULTS["patterns"],
                   help="study-window size in sliding patterns (0 = use the whole trace)")


def cmd_ingest(args) -> int:
    traces = _load_traces(args)
    os.makedirs(args.out, exist_ok=True)
    config_note = _resolved(args)
    manifest = {
        "config": config_note,
        "r": args.r, "k": args.k, "u": args.u,
        "train_fraction": args.train_fraction,
        "sources": {},
    }
    for source in sorted(traces):
        trace = traces[source]
        if args.patterns:
            need = samples_for_patterns(args.patterns, args.r, args.k, args.u)
            if need > len(trace):
                raise ConfigError(
                    f"{source}: {args.patterns} patterns need {need} samples, trace has {len(trace)}"
                )
            trace = trace.slice(0, need)
        dataset = build_dataset(trace, args.r, args.k, args.u)
        train, test = split(dataset, args.train_fraction)
        norm = fit_normalizer(train)
        fname = f"dataset_{source}.csv"
        export_dataset_csv(
            normalize_samples(dataset, norm),
            os.path.join(args.out, fname),
            args.r, args.k, args.u,
            config_note=config_note,
        )
        manifest["sources"][source] = {
            "file": fname,
            "patterns": len(dataset),
            "train_patterns": len(train),
            "test_patterns": len(test),
            "first_t_index": dataset[0].t_index,
            "base_period": trace.base_period,
            "normalizer": {"min": norm.min, "max": norm.max},
        }
    with open(os.path.join(args.out, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    print(f"ingested {len(traces)} sources -> {args.out}")
    for source, info in manifest["sources"].items():
        print(f"  {source}: {info['patterns']} patterns "
              f"(train {info['train_patterns']} / test {info['test_patterns']})")
    return EXIT_OK


def _format_table(metrics_list) -> str:
    order = [m.scheme for m in metrics_list]
    head = "".join(f"{s.upper() + '-SA':>12}" for s in order)
    lines = [f"{'':24}{head}"]
    rows = [
        ("Blocked Connections", lambda m: f"{m.blocked_connections:d}"),
        ("Disruptions", lambda m: f"{m.disruptions_avg:.2f}"),
        ("Unutilized FSs", lambda m: f"{m.unutilized_fs_avg:.2f}"),
    ]
    for label, fmt in rows:
        lines.append(f"{label:24}" + "".join(f"{fmt(m):>12}" for m in metrics_list))
    return "\n".join(lines)


def cmd_simulate(args) -> int:
    schemes = [s.strip().lower() for s in args.scheme.split(",") if s.strip()]
    bad = [s for s in schemes if s not in SCHEMES]
    if bad:
        raise ConfigError(f"unknown scheme(s) {bad}; expected subset of {list(SCHEMES)}")
    topology = _load_topology(args.topology)
    traces = _load_traces(args)
    modulations = (
        load_modulation_csv(args.modulations) if args.modulations else DEFAULT_MODULATIONS
    )
    os.makedirs(args.out, exist_ok=True)
    config_note = _resolved(args)

    results = []
    for scheme in schemes:
        cfg = SimulationConfig(
            topology=topology,
            traces=traces,
            scheme=scheme,
            predictor=args.predictor,
            r=args.r, k=args.k, u=args.u,
            train_fraction=args.train_fraction,
            patterns=args.patterns or None,
            n_slots=args.slots,
            baud_gbaud=args.baud,
            guard_slots=args.guard_slots,
            kappa=args.kappa,
            scale=args.scale,
            seed=args.seed,
            replan_every=args.replan_every,
            modulations=modulations,
            collect_events=args.events,
            audit_every=args.audit_every,
        )
        result = simulate(cfg)
        results.append(result)
        record = result.metrics.as_record()
        with open(os.path.join(args.out, f"metrics_{scheme}.json"), "w", encoding="utf-8") as fh:
            json.dump({"config": config_note, "metrics": record,
                       "action_counts": result.metrics.action_counts}, fh, indent=2, sort_keys=True)
        if args.events:
            with open(os.path.join(args.out, f"events_{scheme}.csv"), "w", encoding="utf-8", newline="") as fh:
                fh.write("# eonplan-config: " + json.dumps(config_note, sort_keys=True) + "\n")
                writer = csv.writer(fh)
                writer.writerow(["phase", "epoch", "interval", "fluct_index",
                                 "connection_id", "action", "width_before", "width_after"])
                for ev in result.events:
                    writer.writerow([ev.phase, ev.epoch, ev.interval,
                                     "" if ev.fluct_index is None else ev.fluct_index,
                                     ev.connection_id, ev.action, ev.width_before, ev.width_after])

    with open(os.path.join(args.out, "metrics.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("# eonplan-config: " + json.dumps(config_note, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["scheme", "blocked", "disruptions_total", "disruptions_avg",
                         "unutilized_avg", "seed", "predictor"])
        for result in results:
            rec = result.metrics.as_record()
            writer.writerow([rec["scheme"], rec["blocked"], rec["disruptions_total"],
                             repr(rec["disruptions_avg"]), repr(rec["unutilized_avg"]),
                             rec["seed"], rec["predictor"]])

    for result in results:
        m = result.metrics
        print(f"{m.scheme}: blocked={m.blocked_connections} "
              f"disruptions_total={m.disruptions_total} disruptions_avg={m.disruptions_avg:.2f} "
              f"unutilized_avg={m.unutilized_fs_avg:.3f} ({result.wall_seconds:.2f}s)")
    if len(results) >= 2:
        table = _format_table([r.metrics for r in results])
        print(table)
        with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8") as fh:
            fh.write("# eonplan-config: " + json.dumps(config_note, sort_keys=True) + "\n")
            fh.write(table + "\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    loaded = []
    for path in (args.a, args.b):
        with open(path, "r", encoding="utf-8") as fh:
            loaded.append(json.load(fh)["metrics"])
    a, b = loaded
    keys = ["blocked", "disruptions_total", "disruptions_avg", "unutilized_avg"]
    print(f"{'metric':20}{'a':>14}{'b':>14}{'delta':>14}")
    for key in keys:
        delta = b[key] - a[key]
        print(f"{key:20}{a[key]:>14.4g}{b[key]:>14.4g}{delta:>+14.4g}")
    return EXIT_OK


def cmd_paths(args) -> int:
    topology = _load_topology(args.topology)
    modulations = (
        load_modulation_csv(args.modulations) if args.modulations else DEFAULT_MODULATIONS
    )
    if args.pairs:
        pairs = []
        for chunk in args.pairs.split(","):
            src, _, dst = chunk.partition("-")
            if not src or not dst:
                raise ConfigError(f"bad pair {chunk!r}; expected SRC-DST")
            pairs.append((src.strip(), dst.strip()))
    else:
        nodes = topology.nodes
        pairs = [(a, b) for a in nodes for b in nodes if a != b]
    for src, dst in pairs:
        paths = topology.k_shortest_paths(src, dst, args.kappa)
        if not paths:
            print(f"{src} -> {dst}: DISCONNECTED")
            continue
        longest = max(topology.path_length(p) for p in paths)
        mod = select_modulation(longest, modulations)
        flag = " (out of reach)" if mod.out_of_reach else ""
        print(f"{src} -> {dst}: modulation {mod.name} ({mod.bits_per_symbol} b/sym, "
              f"longest {longest:.0f} km){flag}")
        for path in paths:
            print(f"    {topology.path_length(path):7.0f} km  {'-'.join(path)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eonplan",
        description="Multi-period spectrum planning on elastic optical networks "
                    "driven by multi-step traffic predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="window + normalize traces into per-source dataset csvs")
    _add_common_inputs(p_ingest)
    p_ingest.add_argument("--out", default="data/datasets")
    p_ingest.set_defaults(func=cmd_ingest)

    p_sim = sub.add_parser("simulate", help="run provisioning schemes over the test window")
    _add_common_inputs(p_sim)
    p_sim.add_argument("--topology", default="abilene",
                       help="'abilene', a node_a,node_b,length_km csv, or an SNDlib xml")
    p_sim.add_argument("--scheme", default="mmd,mad,ssd", help="comma list from mmd,mad,ssd")
    p_sim.add_argument("--predictor", default="oracle",
                       help="oracle | persistence | file:PATH (predictions interchange csv)")
    p_sim.add_argument("--slots", type=int, default=PAPER_DEFAULTS["slots"])
    p_sim.add_argument("--baud", type=float, default=PAPER_DEFAULTS["baud"])
    p_sim.add_argument("--guard-slots", type=int, default=PAPER_DEFAULTS["guard_slots"])
    p_sim.add_argument("--kappa", type=int, default=PAPER_DEFAULTS["kappa"])
    p_sim.add_argument("--scale", type=float, default=PAPER_DEFAULTS["scale"])
    p_sim.add_argument("--seed", type=int, default=PAPER_DEFAULTS["seed"])
    p_sim.add_argument("--replan-every", type=int, default=None,
                       help="override the plan cadence (default: u for mmd/mad, 1 for ssd)")
    p_sim.add_argument("--modulations", help="name,bits_per_symbol,max_reach_km csv")
    p_sim.add_argument("--events", action="store_true", help="write the adjustment log csv")
    p_sim.add_argument("--audit-every", type=int, default=0,
                       help="audit grid invariants every N intervals (debug)")
    p_sim.add_argument("--out", default="data/runs")
    p_sim.set_defaults(func=cmd_simulate)

    p_cmp = sub.add_parser("compare", help="diff two metrics json files")
    p_cmp.add_argument("a")
    p_cmp.add_argument("b")
    p_cmp.set_defaults(func=cmd_compare)

    p_paths = sub.add_parser("paths", help="print kappa-shortest paths and modulation per pair")
    p_paths.add_argument("--topology", default="abilene")
    p_paths.add_argument("--kappa", type=int, default=PAPER_DEFAULTS["kappa"])
    p_paths.add_argument("--pairs", help="comma list of SRC-DST (default: all pairs)")
    p_paths.add_argument("--modulations")
    p_paths.set_defaults(func=cmd_paths)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # config-file values sit between built-in defaults and explicit flags
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        overrides = _read_config_file(cfg_path)
        probe = parser.parse_args(argv)
        known = set(vars(probe))
        unknown = [k for k in overrides if k not in known]
        if unknown:
            raise ConfigError(f"{cfg_path}: unknown config keys {unknown}")
        explicit = {a.lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
        for key, value in overrides.items():
            if key in explicit:
                continue
            current = getattr(probe, key)
            if isinstance(current, bool):
                setattr(probe, key, value.lower() in ("1", "true", "yes"))
            elif isinstance(current, int):
                setattr(probe, key, int(value))
            elif isinstance(current, float):
                setattr(probe, key, float(value))
            else:
                setattr(probe, key, value)
        args = probe
    else:
        args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EonPlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
