"""Command line entry point: ``fracgl {run,sweep,diag,plot}``.

Exit codes: 0 success, 1 configuration error, 2 every cell failed,
3 some cells failed.
"""

import argparse
import logging
from pathlib import Path
import sys

from ..exceptions import ConfigError
from .config import load_config, preset_config
from .diagnostics import run_config
from .plots import emit_plots
from .sweep import run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_ALL_FAILED, EXIT_PARTIAL = 0, 1, 2, 3

log = logging.getLogger("fracgl")


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML experiment file")
    common.add_argument("--preset", choices=["example1", "example2"])
    common.add_argument("--mode", choices=["temporal", "spatial", "single"],
                        help="preset mode when no --config is given")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--threads", type=int, help="concurrent sweep cells")
    common.add_argument("--seed", type=int, help="seed for random initial data")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fracgl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="single runs, summary in run.csv")
    sub.add_parser("sweep", parents=[common], help="temporal or spatial convergence table")
    sub.add_parser("diag", parents=[common], help="single runs with diagnostic dumps")
    sub.add_parser("plot", parents=[common], help="gnuplot scripts for CSVs in --out")
    return parser


def _config(args, default_mode):
    overrides = {k: getattr(args, k) for k in ("seed", "out", "threads")}
    overrides = {k: (str(v) if k == "out" else v) for k, v in overrides.items() if v is not None}
    if args.config is not None:
        return load_config(args.config, preset=args.preset, **overrides)
    return preset_config(args.preset or "example1", args.mode or default_mode, **overrides)


def _failure_code(n_failed, n_total):
    if n_failed == 0:
        return EXIT_OK
    return EXIT_ALL_FAILED if n_failed == n_total else EXIT_PARTIAL


def main(argv=None):
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "plot":
        out = args.out or Path("results")
        inputs = sorted(out.glob("*.csv"))
        scripts = emit_plots(inputs)
        for s in scripts:
            print(s)
        return EXIT_OK

    default_mode = "temporal" if args.command == "sweep" else "single"
    try:
        cfg = _config(args, default_mode)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.out)

    if args.command == "sweep":
        if cfg.mode == "single":
            print("config error: sweep needs mode temporal or spatial", file=sys.stderr)
            return EXIT_CONFIG
        table, paths = run_sweep(cfg, out)
        for p in paths:
            print(p)
        return table.status()

    if cfg.mode != "single":
        print(f"config error: {args.command} needs mode single", file=sys.stderr)
        return EXIT_CONFIG
    rows, paths = run_config(cfg, out, diagnostics=args.command == "diag")
    for p in paths:
        print(p)
    return _failure_code(sum("error" in r for r in rows), len(rows))


if __name__ == "__main__":
    sys.exit(main())
