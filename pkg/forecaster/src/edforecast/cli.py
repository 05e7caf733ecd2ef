"""CLI: ``train`` a per-source model, ``export`` its test-split predictions."""

from __future__ import annotations

import argparse
import sys

from .data import load_source, write_predictions
from .model import ForecasterConfig, load_model, save_model
from .train import predict_rows, train


def cmd_train(args) -> int:
    dataset = load_source(args.dataset, args.manifest, args.source)
    config = ForecasterConfig(
        hidden_units=args.hidden_units,
        dense_units=args.dense_units,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        epochs=args.epochs,
        r=args.r, k=args.k, u=args.u,
        seed=args.seed,
    )
    model, report = train(dataset, config)
    save_model(args.out_model, model)
    if args.loss_curve:
        report.to_csv(args.loss_curve)
    print(
        f"{dataset.source_id}: {config.epochs} epochs in {report.wall_seconds:.1f}s, "
        f"test mse {report.final_test_mse:.5f}"
    )
    return 0


def cmd_export(args) -> int:
    model = load_model(args.model)
    dataset = load_source(args.test, args.manifest, args.source)
    rows = predict_rows(model, dataset)
    write_predictions(args.out, rows, append=args.append)
    print(f"{dataset.source_id}: wrote {len(rows)} prediction rows -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edforecast",
        description="Encoder-decoder LSTM training/export on windowed trace datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train")
    p_train.add_argument("--dataset", required=True, help="per-source dataset csv")
    p_train.add_argument("--manifest", help="manifest.json (default: sibling of dataset)")
    p_train.add_argument("--source", help="source id (default: from filename)")
    p_train.add_argument("--out-model", required=True)
    p_train.add_argument("--loss-curve", help="write per-epoch loss csv here")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--hidden-units", type=int, default=30)
    p_train.add_argument("--dense-units", type=int, default=20)
    p_train.add_argument("--learning-rate", type=float, default=0.001)
    p_train.add_argument("--batch-size", type=int, default=16)
    p_train.add_argument("--epochs", type=int, default=500)
    p_train.add_argument("--r", type=int, default=3)
    p_train.add_argument("--k", type=int, default=6)
    p_train.add_argument("--u", type=int, default=4)
    p_train.set_defaults(func=cmd_train)

    p_export = sub.add_parser("export")
    p_export.add_argument("--model", required=True)
    p_export.add_argument("--test", required=True, help="dataset csv (test split is used)")
    p_export.add_argument("--manifest")
    p_export.add_argument("--source")
    p_export.add_argument("--out", required=True)
    p_export.add_argument("--append", action="store_true",
                          help="append to an existing interchange file")
    p_export.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
