#!/usr/bin/env python3
"""Generate a trained-style predictions interchange csv without the forecaster.

True future interval maxima get peak-shaving toward the training-window mean
plus relative Gaussian jitter; useful as the file-predictor input when the
external forecaster has not been trained.
"""

import argparse

from eonplan import abilene
from eonplan.predictors import make_noisy_prediction_rows, write_predictions_csv
from eonplan.windowing import build_dataset, samples_for_patterns, split


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/noisy_predictions.csv")
    ap.add_argument("--trace-seed", type=int, default=0)
    ap.add_argument("--days", type=int, default=17)
    ap.add_argument("--noise-seed", type=int, default=11)
    ap.add_argument("--sigma", type=float, default=0.06)
    ap.add_argument("--shrink", type=float, default=0.90)
    ap.add_argument("--patterns", type=int, default=800)
    ap.add_argument("--train-fraction", type=float, default=0.8)
    args = ap.parse_args()

    traces = abilene.synth_traces(seed=args.trace_seed, days=args.days)
    need = samples_for_patterns(args.patterns, 3, 6, 4)
    sliced = {s: t.slice(0, need) for s, t in traces.items()}
    dataset = build_dataset(next(iter(sliced.values())), 3, 6, 4)
    _, test = split(dataset, args.train_fraction)
    epochs = [s.t_index for s in test]
    rows = make_noisy_prediction_rows(
        sliced, epochs, 6, 4, sigma=args.sigma, seed=args.noise_seed, shrink=args.shrink
    )
    write_predictions_csv(args.out, rows, config_note=vars(args))
    print(f"wrote {args.out}: {len(rows)} rows over {len(epochs)} epochs")


if __name__ == "__main__":
    main()
