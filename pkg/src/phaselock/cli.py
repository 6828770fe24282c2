"""Command-line entry point: ``phaselock run|builtin|list-builtins|batch``."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .channel import ResourceLimitError
from .config import ConfigError, ScenarioConfig, parse_config
from .output import emit_csv, emit_svg_lineplot
from .scenarios import BUILTINS, DEFAULT_PLOT, builtin_config, run_scenario

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_RESOURCE = 3


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, help="CSV destination (default: stdout)")
    p.add_argument("--svg", action="store_true", help="also write an SVG line plot next to the CSV")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--steps", type=int, help="override the number of steps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phaselock", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("config", type=Path)
    _add_run_flags(p)

    p = sub.add_parser("builtin", help="run a built-in scenario")
    p.add_argument("name", choices=sorted(BUILTINS))
    _add_run_flags(p)

    sub.add_parser("list-builtins", help="list built-in scenarios")

    p = sub.add_parser("batch", help="run every *.ini scenario in a directory")
    p.add_argument("directory", type=Path)
    _add_run_flags(p)
    p.add_argument("--jobs", type=int, default=4, help="concurrent scenarios (default: 4)")
    return parser


def _plot_columns(config: ScenarioConfig, available: Sequence[str]) -> list[str]:
    cols = [c for c in DEFAULT_PLOT[config.model] if c in available]
    return cols or [c for c in available if c != "t"]


def _execute(config: ScenarioConfig, out: Optional[Path], svg: bool) -> dict:
    traj = run_scenario(config)
    if out is None:
        emit_csv(traj, sys.stdout)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        emit_csv(traj, out)
    if svg:
        target = out.with_suffix(".svg") if out is not None else Path(f"{config.name}.svg")
        emit_svg_lineplot(traj, _plot_columns(config, traj.names), target, title=config.name)
    return traj.summary


def _report(name: str, summary: dict) -> None:
    if summary:
        items = ", ".join(f"{k}={v}" for k, v in summary.items())
        print(f"{name}: {items}", file=sys.stderr)


def _load(path: Path) -> ScenarioConfig:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror}"]) from None
    return parse_config(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "list-builtins":
        for name, (desc, _) in BUILTINS.items():
            print(f"{name:22s} {desc}")
        return EXIT_OK

    try:
        if args.command == "batch":
            return _batch(args)
        config = _load(args.config) if args.command == "run" else builtin_config(args.name)
        config = config.with_overrides(seed=args.seed, steps=args.steps)
        _report(config.name, _execute(config, args.out, args.svg))
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"error: {msg}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def _batch(args: argparse.Namespace) -> int:
    files = sorted(args.directory.glob("*.ini"))
    if not files:
        print(f"error: no *.ini scenarios in {args.directory}", file=sys.stderr)
        return EXIT_INVALID
    out_dir = args.out if args.out is not None else args.directory
    # parse everything first so one bad file fails the batch before any work
    configs = {}
    failed = False
    for f in files:
        try:
            configs[f] = _load(f).with_overrides(seed=args.seed, steps=args.steps)
        except ConfigError as exc:
            failed = True
            for msg in exc.errors:
                print(f"error: {f.name}: {msg}", file=sys.stderr)
    if failed:
        return EXIT_INVALID

    def job(item):
        f, cfg = item
        return f, _execute(cfg, out_dir / f"{f.stem}.csv", args.svg)

    status = EXIT_OK
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        futures = [pool.submit(job, item) for item in configs.items()]
        for fut in futures:
            try:
                f, summary = fut.result()
            except ResourceLimitError as exc:
                print(f"error: {exc}", file=sys.stderr)
                status = EXIT_RESOURCE
                continue
            _report(f.stem, summary)
    return status


if __name__ == "__main__":
    sys.exit(main())
