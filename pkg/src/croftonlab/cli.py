"""Command-line front end: one process, one command, one report.

Flags may be preloaded from a key=value config file via --config; explicit
flags override file values. --threads 1 is the bitwise-reference mode.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, CroftonLabError
from .reports import COMMANDS, RunConfig, emit, load_config_file, run


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="croftonlab",
        description="Monte Carlo integral geometry experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} experiment")
        cmd.add_argument("--config", help="key=value file of defaults (flags override)")
        cmd.add_argument("--seed", type=int, help="decimal 64-bit seed (default 0)")
        cmd.add_argument("--samples", type=int, help="sample count (per evaluation for scans)")
        cmd.add_argument("--restarts", type=int, help="scan restarts (default 8)")
        cmd.add_argument("--threads", type=int, help="parallel batches; 1 = bitwise reference")
        for flag in ("n", "k", "l", "m", "p", "q"):
            cmd.add_argument(f"--{flag}", type=int, help=f"geometry parameter {flag}")
        cmd.add_argument("--tau-grid", type=int, dest="tau_grid", help="grid size (default 9)")
        cmd.add_argument("--kind", help="scan family kind (default interleaved)")
        cmd.add_argument("--tol", type=float, help="structure-test tolerance (default 0.05)")
        cmd.add_argument("--input", dest="input_path", help="polyline or curve input file")
        cmd.add_argument("--out", dest="output_path", help="report file (default stdout)")
        cmd.add_argument("--format", choices=("csv", "json"), help="report format (default csv)")
        cmd.add_argument("--plot", action="store_true", default=None,
                         help="also render matplotlib figure(s) next to the report")
        cmd.add_argument("--plot-dir", dest="plot_dir", help="figure directory")
    return parser


_TYPED = {
    "seed": int, "samples": int, "restarts": int, "threads": int,
    "n": int, "k": int, "l": int, "m": int, "p": int, "q": int,
    "tau_grid": int, "tol": float, "random_planes": int,
    "plot": lambda v: v.lower() in ("1", "true", "yes"),
}


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        for key, raw in load_config_file(args.config).items():
            if key == "command":
                continue
            caster = _TYPED.get(key, str)
            try:
                values[key] = caster(raw)
            except ValueError as exc:
                raise ConfigError(f"bad config value {key}={raw!r}") from exc
    for key, value in vars(args).items():
        if key in ("config",) or value is None:
            continue
        values[key] = value
    known = {f.name for f in RunConfig.__dataclass_fields__.values()}  # type: ignore[attr-defined]
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    return RunConfig(**values)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = build_config(args)
        report = run(config)
        payload = emit(report, report.config["format"])
        if report.config["output_path"]:
            Path(report.config["output_path"]).write_bytes(payload)
        else:
            sys.stdout.write(payload.decode())
        if report.config["plot"]:
            from . import figures

            plot_dir = report.config["plot_dir"]
            if not plot_dir:
                out = report.config["output_path"]
                plot_dir = str(Path(out).parent) if out else "."
            for path in figures.render_report(report, plot_dir):
                print(f"figure: {path}", file=sys.stderr)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CroftonLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    if report.diagnostics.get("best_converged") is False:
        print("warning: winning restart did not reach the step floor", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
