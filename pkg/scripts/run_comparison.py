#!/usr/bin/env python3
"""Full scheme comparison on the Abilene scenario, one table per predictor.

Runs mmd/mad/ssd with the oracle and with trained-style prediction files
(aggregating disruption counts over several jitter seeds), mirroring the
shape of the paper-style evaluation table.
"""

import argparse
import os
import tempfile

from eonplan import abilene
from eonplan.planner import SimulationConfig, simulate
from eonplan.predictors import make_noisy_prediction_rows, write_predictions_csv
from eonplan.windowing import build_dataset, samples_for_patterns, split

SCHEMES = ("mmd", "mad", "ssd")


def run(topo, traces, scheme, predictor, seed):
    cfg = SimulationConfig(topology=topo, traces=traces, scheme=scheme,
                           predictor=predictor, seed=seed)
    return simulate(cfg).metrics


def table(title, rows):
    print(f"\n{title}")
    print(f"{'':24}" + "".join(f"{s.upper() + '-SA':>12}" for s in SCHEMES))
    for label, values in rows:
        print(f"{label:24}" + "".join(f"{v:>12}" for v in values))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trace-seed", type=int, default=0)
    ap.add_argument("--dest-seed", type=int, default=360)
    ap.add_argument("--sigma", type=float, default=0.06)
    ap.add_argument("--shrink", type=float, default=0.90)
    ap.add_argument("--jitter-seeds", default="11,22,33,44,55,66,77,88")
    ap.add_argument("--predictions", help="use this interchange csv instead of generated jitter files")
    args = ap.parse_args()

    topo = abilene.topology()
    traces = abilene.synth_traces(seed=args.trace_seed, days=17)

    oracle = {s: run(topo, traces, s, "oracle", args.dest_seed) for s in SCHEMES}
    table("oracle predictions (perfect foresight)", [
        ("Blocked Connections", [oracle[s].blocked_connections for s in SCHEMES]),
        ("Disruptions", [f"{oracle[s].disruptions_avg:.2f}" for s in SCHEMES]),
        ("Unutilized FSs", [f"{oracle[s].unutilized_fs_avg:.2f}" for s in SCHEMES]),
    ])

    if args.predictions:
        files = [args.predictions]
    else:
        need = samples_for_patterns(800, 3, 6, 4)
        sliced = {s: t.slice(0, need) for s, t in traces.items()}
        dataset = build_dataset(next(iter(sliced.values())), 3, 6, 4)
        _, test = split(dataset, 0.8)
        epochs = [s.t_index for s in test]
        files = []
        for seed in (int(x) for x in args.jitter_seeds.split(",")):
            rows = make_noisy_prediction_rows(sliced, epochs, 6, 4,
                                              sigma=args.sigma, seed=seed, shrink=args.shrink)
            path = os.path.join(tempfile.mkdtemp(), f"pred_{seed}.csv")
            write_predictions_csv(path, rows)
            files.append(path)

    total_disr = {s: 0 for s in SCHEMES}
    blocked = {s: 0 for s in SCHEMES}
    unutil = {s: 0.0 for s in SCHEMES}
    for path in files:
        for s in SCHEMES:
            m = run(topo, traces, s, f"file:{path}", args.dest_seed)
            total_disr[s] += m.disruptions_total
            blocked[s] += m.blocked_connections
            unutil[s] += m.unutilized_fs_avg
    n = len(files)
    table(f"file predictions ({n} file(s))", [
        ("Blocked Connections", [blocked[s] for s in SCHEMES]),
        ("Disruptions (avg/conn)", [f"{total_disr[s] / (12 * n):.2f}" for s in SCHEMES]),
        ("Unutilized FSs", [f"{unutil[s] / n:.2f}" for s in SCHEMES]),
    ])
    reduction = 1 - total_disr["mmd"] / total_disr["ssd"] if total_disr["ssd"] else 0.0
    print(f"\nmmd vs ssd disruption reduction: {reduction:.0%}")


if __name__ == "__main__":
    main()
