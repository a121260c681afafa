"""``graphon-spectra <experiment>`` command line."""

from __future__ import annotations

import argparse
import sys

from .experiments import EXPERIMENTS, ExperimentConfig, run


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="graphon-spectra",
        description="Run a graphon spectral experiment and write CSV tables (and PNG figures).")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", help="JSON config file")
    ap.add_argument("--out", default="out", help="output directory (default: ./out)")
    ap.add_argument("--profile", choices=("desk", "paper"), default=None,
                    help="size/seed defaults when the config leaves them out")
    ap.add_argument("--seed", type=int, default=None,
                    help="base seed; per-run seeds are base XOR run index")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = ExperimentConfig.from_file(args.config, experiment=args.experiment,
                                             profile=args.profile, seed=args.seed)
        else:
            cfg = ExperimentConfig.from_dict({"experiment": args.experiment},
                                             profile=args.profile, seed=args.seed)
        result = run(cfg, threads=max(1, args.threads))
        paths = result.write(args.out, figures=not args.no_figures)
    except (ValueError, OSError, KeyError) as exc:
        print(f"graphon-spectra: error: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
