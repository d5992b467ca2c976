"""Command line: ``dephasim run | list-presets | emit``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .experiment import ConfigError, ExperimentConfig, emit_plotdata, get_preset, list_presets, run

log = logging.getLogger("dephasim")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dephasim", description="Phase-noise qubit fidelity simulator")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment from a preset or a JSON config")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="JSON config file")
    src.add_argument("--preset", help="preset name (see list-presets)")
    r.add_argument("--seeds", type=int, help="number of seeds (overrides the config)")
    r.add_argument("--base-seed", type=int, help="first seed (overrides the config)")
    r.add_argument("--workers", type=int, help="worker processes (default: $DEPHASIM_WORKERS or all cores)")
    r.add_argument("--out", type=Path, help="output directory (default: runs/<name>)")

    sub.add_parser("list-presets", help="list the built-in presets")

    e = sub.add_parser("emit", help="convert result CSVs to plot data (and a PNG)")
    e.add_argument("--kind", choices=["heatmap", "lines"], required=True)
    e.add_argument("--in", dest="inputs", type=Path, nargs="+", required=True, help="results.csv file(s)")
    e.add_argument("--out", type=Path, required=True)
    return ap


def _cmd_run(args) -> int:
    seeds = {}
    if args.seeds is not None:
        seeds["count"] = args.seeds
    if args.base_seed is not None:
        seeds["base_seed"] = args.base_seed
    if args.preset:
        cfg = get_preset(args.preset, seeds=seeds) if seeds else get_preset(args.preset)
    else:
        cfg = ExperimentConfig.from_json(args.config)
        if seeds:
            cfg = cfg.with_overrides(seeds=seeds)
    out = args.out or Path(cfg.data["output"] or Path("runs") / cfg.name)

    def progress(done, total):
        log.info("%s: sweep point %d/%d done", cfg.name, done, total)

    table = run(cfg, workers=args.workers, out_dir=out, progress=progress)
    print(f"{cfg.name}: {len(table.rows)} rows -> {out / 'results.csv'} ({table.metadata['wall_time_s']:.1f} s)")
    return 0


def _cmd_list() -> int:
    cat = list_presets()
    width = max(len(k) for k in cat)
    for name, info in cat.items():
        print(f"{name:<{width}}  {info['figure']:<16} {info['description']}")
    return 0


def _cmd_emit(args) -> int:
    labels = [p.parent.name if p.name == "results.csv" else p.stem for p in args.inputs]
    path = emit_plotdata(list(args.inputs), args.kind, args.out, labels=labels)
    print(f"wrote {path} and {path.with_suffix('.png')}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list-presets":
            return _cmd_list()
        return _cmd_emit(args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
