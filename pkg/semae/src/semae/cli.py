"""Command line for the autoencoder experiment.

    semae train-classifier --out classifier.pt
    semae run   --classifier classifier.pt --levels 2 --dims 4 --gamma 0.1 --out run.csv
    semae sweep --classifier classifier.pt --config configs.json --out table.csv \
                [--rd-out joint.csv] [--grid-out grid.png]
"""

from __future__ import annotations

import argparse
import sys

from .classifier import load_classifier, save_classifier
from .sweep import export_rd_schema, run_configs, save_image_grid, write_table
from .train import ExperimentConfig, load_config_file


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="semae")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cls = sub.add_parser("train-classifier", help="train and save the frozen semantic probe")
    p_cls.add_argument("--out", required=True)
    p_cls.add_argument("--epochs", type=int, default=80)
    p_cls.add_argument("--seed", type=int, default=0)

    p_run = sub.add_parser("run", help="train one configuration and append a table row")
    p_run.add_argument("--classifier", required=True)
    p_run.add_argument("--levels", type=int, required=True)
    p_run.add_argument("--dims", type=int, required=True)
    p_run.add_argument("--gamma", type=float, required=True)
    p_run.add_argument("--epochs", type=int, default=150)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--out", required=True)

    p_sweep = sub.add_parser("sweep", help="run a JSON list of configurations")
    p_sweep.add_argument("--classifier", required=True)
    p_sweep.add_argument("--config", required=True, help="JSON file with one config or a list")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--rd-out", help="also export rows in the semrd CSV schema")
    p_sweep.add_argument("--grid-out", help="also save a qualitative PNG grid")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "train-classifier":
            accuracy = save_classifier(args.out, epochs=args.epochs, seed=args.seed)
            print(f"classifier saved to {args.out} (clean test accuracy {accuracy:.4f})")
            return 0
        classifier, _ = load_classifier(args.classifier)
        if args.command == "run":
            configs = [
                ExperimentConfig(levels=args.levels, dims=args.dims, gamma=args.gamma, epochs=args.epochs, seed=args.seed)
            ]
        else:
            configs = load_config_file(args.config)
        results = run_configs(configs, classifier)
        write_table(args.out, results)
        if args.command == "sweep" and args.rd_out:
            export_rd_schema(args.rd_out, results)
        if args.command == "sweep" and args.grid_out:
            save_image_grid(args.grid_out, results)
        return 0
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"semae: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
