"""Command-line sweep runner.

Every dataset subcommand reads a flat config (``--config`` takes a file
path or the name of a bundled config such as ``effective_grid``) and writes a CSV.
Exit codes: 0 success, 1 config error, 2 partial failure, 3 total failure.
"""

import argparse
import os
import sys

from .config import default_config, load_config
from .errors import ColumnError, ConfigError
from .sweeps import run_sweep, run_trajectories, write_csv
from .svgplot import emit_plot

__all__ = ["main", "build_parser", "DEFAULT_CONFIGS"]

DEFAULT_CONFIGS = {
    "effective-grid": "effective_grid",
    "cavity-kappa-scan": "kappa_scan",
    "cavity-grid": "cavity_grid_gamma1e-3",
    "robustness": "robustness",
    "trajectories": "trajectories",
}

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL, EXIT_TOTAL = 0, 1, 2, 3


def build_parser():
    parser = argparse.ArgumentParser(prog="steadyent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for mode, cfg in DEFAULT_CONFIGS.items():
        p = sub.add_parser(mode, help=f"run a {mode} sweep (default config: {cfg})")
        p.add_argument("--config", help="config file path or bundled config name")
        p.add_argument("--out", help="output CSV path (overrides the config)")
        p.add_argument("--seed", type=int, help="base seed (overrides the config)")
        p.add_argument("--workers", type=int, help="worker processes (overrides the config)")
        p.add_argument("--no-timestamp", action="store_true", help="omit the provenance line and wall_time column")
        if mode == "trajectories":
            p.add_argument("--dump", help="also write per-trajectory events to this CSV")
    p = sub.add_parser("plot", help="render a sweep CSV as SVG")
    p.add_argument("dataset", help="CSV written by a sweep subcommand")
    p.add_argument("--kind", choices=("heatmap", "line"), required=True)
    p.add_argument("--axes", required=True, help="comma-separated columns: x,y,z (heatmap) or x,y1,y2,... (line)")
    p.add_argument("--out", required=True, help="output SVG path")
    p.add_argument("--contour", type=float, help="heatmap contour level")
    p.add_argument("--logx", action="store_true")
    p.add_argument("--logy", action="store_true")
    p.add_argument("--where", help="row filter 'column=value'")
    p.add_argument("--title", default="")
    return parser


def _load(spec, mode):
    if spec is None:
        spec = DEFAULT_CONFIGS[mode]
    if os.path.exists(spec):
        cfg = load_config(spec)
    else:
        try:
            cfg = default_config(spec)
        except FileNotFoundError:
            raise ConfigError(f"no config file or bundled config named {spec!r}") from None
    if cfg.mode != mode:
        raise ConfigError(f"{spec}: mode is {cfg.mode!r} but subcommand is {mode!r}")
    return cfg


def _run(args):
    try:
        cfg = _load(args.config, args.command)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError("--workers must be >= 1")
            cfg.workers = args.workers
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.out or f"{args.command}.csv"
    if args.command == "trajectories":
        result = run_trajectories(cfg, dump=args.dump)
    else:
        result = run_sweep(cfg)
    write_csv(result, out, timestamp=not args.no_timestamp)
    if result.summary:
        lines = [f"{k} = {v!r}" for k, v in result.summary.items()]
        if args.command == "cavity-grid":
            with open(f"{out}.summary", "w", encoding="utf-8", newline="\n") as fh:
                fh.write("\n".join(lines) + "\n")
        print("\n".join(lines))
    if args.command == "trajectories":
        for row in result.rows:
            if row.get("pass") is not None:
                status = "PASS" if row["pass"] else "FAIL"
                print(f"{status} {row['quantity']}: {row['value']!r} +/- {row['stderr']!r} ({row['check']})")
    if result.n_failed:
        print(f"{result.n_failed} of {len(result.rows)} records failed", file=sys.stderr)
    print(f"wrote {out}", file=sys.stderr)
    return result.exit_code


def _plot(args):
    where = None
    if args.where:
        if "=" not in args.where:
            print("config error: --where must be 'column=value'", file=sys.stderr)
            return EXIT_CONFIG
        where = tuple(s.strip() for s in args.where.split("=", 1))
    try:
        emit_plot(args.dataset, args.kind, [a.strip() for a in args.axes.split(",")], args.out,
                  contour=args.contour, logx=args.logx, logy=args.logy, title=args.title, where=where)
    except (ColumnError, ValueError, OSError) as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "plot":
        return _plot(args)
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
