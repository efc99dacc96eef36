"""Command-line front end.

Subcommands:
  run    --config FILE [--seeds a,b,...] [--out DIR] [--workers N]
  grid   --config FILE --lr-grid 0.001,0.002,... [--seeds a,b,...]
  verify [pytest args...]   run the property/acceptance test suites

Exit codes: 0 success; 2 configuration error; 3 data/I-O error; 4 numeric
failure (divergence, decomposition failure); 1 anything else.
"""

from __future__ import annotations

import argparse
import dataclasses
import subprocess
import sys
from pathlib import Path

from .gradients import NumericOverflowError
from .harness import (
    ConfigError,
    GridSearchError,
    aggregate,
    emit_outputs,
    grid_search,
    load_config,
    parse_config_text,
    run_many,
)
from .linalg import SvdConvergenceError
from .tasks import CsvFormatError


def _parse_seed_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"bad seed list {text!r}") from None


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seeds:
        cfg = dataclasses.replace(cfg, seeds=_parse_seed_list(args.seeds))
    out_dir = args.out or cfg.out_dir
    results = run_many(cfg, workers=args.workers)
    summary = aggregate(results)
    raw = parse_config_text(Path(args.config).read_text(encoding="utf-8"))
    files = emit_outputs(summary, out_dir, config_mapping=raw)
    for row in summary.rows:
        print(
            f"{row.label}: runs={row.n_runs} mse_mean={row.mse_mean:.6g} "
            f"mean_runtime={row.runtime_mean_s:.3f}s"
        )
    print(f"wrote {', '.join(files)} to {out_dir}")
    return 0


def _cmd_grid(args) -> int:
    cfg = load_config(args.config)
    try:
        grid = tuple(float(v) for v in args.lr_grid.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"bad grid {args.lr_grid!r}") from None
    seeds = _parse_seed_list(args.seeds) if args.seeds else None
    best, rows = grid_search(cfg, grid, tuning_seeds=seeds)
    for rate, mse, note in rows:
        status = f"mse={mse:.6g}" if mse is not None else f"excluded ({note})"
        print(f"rate={rate:g}: {status}")
    print(f"best={best:g}")
    return 0


def _cmd_verify(args) -> int:
    extra = list(args.pytest_args)
    if not extra:
        tests = Path("tests")
        if not tests.is_dir():
            print(
                "error[config]: no tests/ directory here; run from the project root",
                file=sys.stderr,
            )
            return 2
        extra = [str(tests), "-v"]
    cmd = [sys.executable, "-m", "pytest", *extra]
    return subprocess.run(cmd, check=False).returncode


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wogd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a config across its seeds")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seeds", default="", help="comma-separated override")
    p_run.add_argument("--out", default="", help="output directory override")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.set_defaults(func=_cmd_run)

    p_grid = sub.add_parser("grid", help="learning-rate grid search")
    p_grid.add_argument("--config", required=True)
    p_grid.add_argument("--lr-grid", required=True)
    p_grid.add_argument("--seeds", default="")
    p_grid.set_defaults(func=_cmd_grid)

    p_verify = sub.add_parser("verify", help="run the test suites")
    p_verify.add_argument("pytest_args", nargs=argparse.REMAINDER,
                          help="extra arguments passed straight to pytest")
    p_verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return 2
    except (CsvFormatError, FileNotFoundError, OSError) as exc:
        print(f"error[data]: {exc}", file=sys.stderr)
        return 3
    except (NumericOverflowError, SvdConvergenceError, GridSearchError) as exc:
        print(f"error[numeric]: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # pragma: no cover - last resort
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
