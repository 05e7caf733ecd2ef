#!/usr/bin/env python3
"""Train one model per source dataset and export a combined predictions file.

Jobs are independent per source; run with --jobs N to parallelize across
processes.  Outputs (under --out): models/<source>.pt, loss_<source>.csv,
predictions_all.csv, and training_summary.csv.
"""

import argparse
import csv
import glob
import os
from concurrent.futures import ProcessPoolExecutor

from edforecast.data import load_source, write_predictions
from edforecast.model import ForecasterConfig, save_model
from edforecast.train import predict_rows, train


def run_one(job):
    dataset_path, out_dir, seed, epochs = job
    dataset = load_source(dataset_path)
    config = ForecasterConfig(seed=seed, epochs=epochs)
    model, report = train(dataset, config)
    save_model(os.path.join(out_dir, "models", f"{dataset.source_id}.pt"), model)
    report.to_csv(os.path.join(out_dir, f"loss_{dataset.source_id}.csv"))
    rows = predict_rows(model, dataset)
    return dataset.source_id, report, rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--datasets", default="../data/datasets",
                    help="directory with dataset_<source>.csv + manifest.json")
    ap.add_argument("--out", default="../data/predictions")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs", type=int, default=500)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    paths = sorted(glob.glob(os.path.join(args.datasets, "dataset_*.csv")))
    if not paths:
        raise SystemExit(f"no dataset_*.csv under {args.datasets}")
    os.makedirs(os.path.join(args.out, "models"), exist_ok=True)
    jobs = [(p, args.out, args.seed, args.epochs) for p in paths]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_one, jobs))
    else:
        results = [run_one(j) for j in jobs]

    all_rows = []
    summary_path = os.path.join(args.out, "training_summary.csv")
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source_id", "epochs", "final_test_mse", "wall_seconds",
                         "first50_mean", "last50_mean"])
        for source_id, report, rows in results:
            losses = report.epoch_losses
            first50 = sum(losses[:50]) / max(1, len(losses[:50]))
            last50 = sum(losses[-50:]) / max(1, len(losses[-50:]))
            writer.writerow([source_id, len(losses), repr(report.final_test_mse),
                             f"{report.wall_seconds:.1f}", repr(first50), repr(last50)])
            print(f"{source_id}: test mse {report.final_test_mse:.5f} "
                  f"({report.wall_seconds:.0f}s, loss {first50:.4f} -> {last50:.4f})")
            all_rows.extend(rows)
    write_predictions(os.path.join(args.out, "predictions_all.csv"), all_rows)
    print(f"wrote {os.path.join(args.out, 'predictions_all.csv')} ({len(all_rows)} rows)")


if __name__ == "__main__":
    main()
