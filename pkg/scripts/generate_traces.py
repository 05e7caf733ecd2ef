#!/usr/bin/env python3
"""Write the seeded Abilene-like trace set as a timestamp,src,dst,gbps csv.

The per-pair rows are a seeded Dirichlet split of each source's aggregate, so
`eonplan ingest` reconstructs the same per-source series the generator made.
"""

import argparse

from eonplan import abilene


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/abilene_traces.csv")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--days", type=int, default=17)
    args = ap.parse_args()

    traces = abilene.synth_traces(seed=args.seed, days=args.days)
    abilene.write_trace_csv(traces, args.out, seed=args.seed)
    n = len(next(iter(traces.values())))
    print(f"wrote {args.out}: {len(traces)} sources x {n} samples ({args.days} days)")


if __name__ == "__main__":
    main()
