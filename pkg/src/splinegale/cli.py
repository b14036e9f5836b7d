"""Command line entry point: gen | check | sweep | report.

Exit status is 0 iff every hard-bound check row passed; empirical-constant
rows never affect the exit code.
"""

import argparse
import json
import os
import sys

from .checks import SEED_SCHEME, run_check, sweep
from .config import ExperimentConfig
from .errors import SplinegaleError
from .generators import gen_filtration, observed_gamma, trial_seed
from .bsplines import regularity
from .reports import hard_failures, write_csv, write_json


def _load(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        cfg = cfg.replace(master_seed=args.seed)
    if args.out is not None:
        cfg = cfg.replace(output=args.out)
    return cfg


def _outdir(cfg) -> str:
    os.makedirs(cfg.output, exist_ok=True)
    return cfg.output


def cmd_gen(args) -> int:
    cfg = _load(args)
    outdir = _outdir(cfg)
    filt = gen_filtration(cfg, trial_seed(cfg.master_seed, 0))
    payload = {
        "schema": cfg.schema,
        "config": cfg.to_dict(),
        "levels": [list(p.breakpoints) for p in filt.levels],
        "gamma_per_level": [regularity(p, cfg.k) for p in filt.levels],
        "gamma": observed_gamma(filt, cfg.k),
    }
    path = os.path.join(outdir, "filtration.json")
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")
    print(f"wrote {path} ({len(filt)} levels, gamma={payload['gamma']:.4f})")
    return 0


def _emit(cfg, reports, with_axis: bool) -> int:
    outdir = _outdir(cfg)
    csv_path = os.path.join(outdir, "results.csv")
    json_path = os.path.join(outdir, "report.json")
    write_csv(csv_path, reports, with_axis=with_axis)
    write_json(json_path, cfg.to_dict(), reports, SEED_SCHEME)
    failures = hard_failures(reports)
    hard = sum(1 for r in reports if r.passed is not None)
    print(f"wrote {csv_path} and {json_path}")
    print(f"{len(reports)} rows, {hard} hard-bound rows, {failures} failed")
    return 0 if failures == 0 else 1


def cmd_check(args) -> int:
    cfg = _load(args)
    return _emit(cfg, run_check(cfg), with_axis=False)


def cmd_sweep(args) -> int:
    cfg = _load(args)
    return _emit(cfg, sweep(cfg), with_axis=True)


def cmd_report(args) -> int:
    from .figures import render_figures, write_summary_csv

    cfg = _load(args)
    outdir = _outdir(cfg)
    csv_path = os.path.join(outdir, "results.csv")
    if not os.path.exists(csv_path):
        print(f"no results at {csv_path}; run `splinegale check` or `sweep` first",
              file=sys.stderr)
        return 2
    figures = render_figures(csv_path, os.path.join(outdir, "figures"))
    summary = write_summary_csv(csv_path, os.path.join(outdir, "summary.csv"))
    for path in figures:
        print(f"wrote {path}")
    print(f"wrote {summary}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splinegale",
        description="Inequality checks for spline projections on interval "
                    "filtrations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("gen", cmd_gen), ("check", cmd_check),
                     ("sweep", cmd_sweep), ("report", cmd_report)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override master_seed")
        p.add_argument("--out", default=None, help="override output directory")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SplinegaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
