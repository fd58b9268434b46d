"""Command-line front end.

Exit codes: 0 success, 1 domain/config/IO error, 2 numerical failure.
"""

import argparse
from dataclasses import replace
import json
import logging
from pathlib import Path
import sys

from .decoherence import catalog
from .ensemble import run_ensemble
from .exceptions import DomainError, NumericalError
from .output import config_to_dict, emit_plotdata, parse_config, write_config
from .presets import PRESET_NAMES, get_preset

log = logging.getLogger("nanofall")

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC = 0, 1, 2


def _build_parser():
    p = argparse.ArgumentParser(prog="nanofall", description="Ensemble simulator for a free-falling nanosphere.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a preset or a JSON scenario")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESET_NAMES)
    src.add_argument("--config", type=Path)
    run.add_argument("--seed", type=int, default=None, help="master seed (default: preset 0 / config value)")
    run.add_argument("--trajectories", type=int, default=None)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", type=Path, default=Path("nanofall_out"))
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--filter-gas-collisions", action="store_true",
                     help="drop trajectories in which a channel labelled 'gas' fired")

    tab = sub.add_parser("tables", help="dump the decoherence catalog as JSON")
    tab.add_argument("--out", type=Path, default=None, help="file to write (default: stdout)")

    sub.add_parser("presets", help="list preset names")
    return p


def _write_tables(out):
    doc = json.dumps(catalog(), indent=1) + "\n"
    if out is None:
        sys.stdout.write(doc)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(doc)


def _curves_from_args(args):
    if args.preset is not None:
        preset = get_preset(args.preset, seed=args.seed or 0, trajectories=args.trajectories)
        return preset.curves, preset.gaps
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.trajectories is not None:
        cfg = replace(cfg, trajectory_count=args.trajectories)
    print(json.dumps({"resolved_config": config_to_dict(cfg)}, indent=1))
    return {"scenario": cfg}, ()


def run(args) -> int:
    if args.preset == "tables":
        args.out.mkdir(parents=True, exist_ok=True)
        _write_tables(args.out / "tables.json")
        return EXIT_OK
    if args.workers < 1:
        raise DomainError("--workers must be >= 1")
    curves, gaps = _curves_from_args(args)
    args.out.mkdir(parents=True, exist_ok=True)
    results = {}
    for name, cfg in curves.items():
        log.info("running %s (%d trajectories)", name, cfg.trajectory_count)
        stats = run_ensemble(cfg, workers=args.workers, filter_gas=args.filter_gas_collisions)
        results[name] = stats
        emit_plotdata(stats, args.out / f"{name}.{args.format}", args.format)
        write_config(cfg, args.out / f"{name}.config.json")
    print("curve, t_final, total_spread, stderr, analytic_eq8")
    for name, st in results.items():
        print(f"{name}, {st.times[-1]:.6g}, {st.total_spread[-1]:.6e}, {st.standard_error[-1]:.2e}, "
              f"{st.analytic_eq8[-1]:.6e}")
    for label, a, b, t in gaps:
        sa, sb = results[a], results[b]
        ia, ib = sa.at(t), sb.at(t)
        gap = sa.total_spread[ia] - sb.total_spread[ib]
        err = (sa.standard_error[ia] ** 2 + sb.standard_error[ib] ** 2) ** 0.5
        print(f"gap {label} at t={t:g} s: {gap:.4e} m (+/- {err:.1e})")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "presets":
            print("\n".join(PRESET_NAMES))
            return EXIT_OK
        if args.command == "tables":
            _write_tables(args.out)
            return EXIT_OK
        return run(args)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
