"""Command line entry point.

Subcommands map one-to-one onto the pipelines in runner: sweep, rmap, fit,
dos, finite-size, evolve, print-config. All take an optional JSON config
plus flag overrides; output root precedence is --out, then MBLLAB_OUT_ROOT,
then the config's out_dir.
"""

import argparse
import json
import os
import sys

from .errors import LabError
from .runner import (
    RunConfig,
    cmd_dos,
    cmd_evolve,
    cmd_finite_size,
    cmd_fit,
    cmd_rmap,
    cmd_sweep,
)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; omitted keys use defaults")
    p.add_argument("--out", help="output root directory (overrides env and config)")
    p.add_argument("--seed", type=int, help="master seed override")
    p.add_argument("--workers", type=int, help="worker process count (0 = cpu count)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=JSON",
                   help="override any config key, value parsed as JSON; repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbllab",
        description="Disordered XY dynamics in a fixed-excitation sector: "
                    "sweeps, spectral statistics, and scaling analyses.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run or resume the (eps, V, k) dynamics sweep")
    _add_common(p)
    p.add_argument("--k", type=int, help="realizations per grid point")
    p.add_argument("--eps-grid", help="JSON list of energy-density targets")
    p.add_argument("--v-grid", help="JSON list of disorder amplitudes (MHz)")

    p = sub.add_parser("rmap", help="energy-resolved gap-ratio map")
    _add_common(p)
    p.add_argument("--n-sites", type=int, dest="rmap_n_sites",
                   help="chain length for exact spectra")
    p.add_argument("--k", type=int, dest="rmap_k", help="realizations per amplitude")

    p = sub.add_parser("fit", help="power-law exponents and V_c from sweep output")
    _add_common(p)

    p = sub.add_parser("dos", help="Fock-state vs eigenvalue density histograms")
    _add_common(p)

    p = sub.add_parser("finite-size", help="imbalance vs chain length scan")
    _add_common(p)
    p.add_argument("--sizes", help="JSON list of chain lengths")

    p = sub.add_parser("evolve", help="single-instance trajectory")
    _add_common(p)
    p.add_argument("--eps", type=float, help="energy-density target")
    p.add_argument("--v", type=float, help="disorder amplitude (MHz)")
    p.add_argument("--k-index", type=int, help="realization index")

    p = sub.add_parser("print-config", help="dump the resolved config as JSON")
    _add_common(p)

    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
    if getattr(args, "seed", None) is not None:
        data["master_seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        data["workers"] = args.workers
    for item in getattr(args, "set", []):
        if "=" not in item:
            raise ValueError(f"--set expects KEY=JSON, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            data[key] = json.loads(raw)
        except json.JSONDecodeError:
            data[key] = raw
    direct = {
        "k": "k", "eps_grid": "eps_grid", "v_grid": "v_grid",
        "rmap_n_sites": "rmap_n_sites", "rmap_k": "rmap_k",
        "sizes": "fs_sizes", "eps": "evolve_eps", "v": "evolve_v",
        "k_index": "evolve_k_index",
    }
    for attr, key in direct.items():
        val = getattr(args, attr, None)
        if val is None:
            continue
        if key in ("eps_grid", "v_grid", "fs_sizes") and isinstance(val, str):
            val = json.loads(val)
        data[key] = val
    return RunConfig.from_dict(data)


def _print_out(text: str):
    # tolerate a closed downstream pipe (e.g. piping into head)
    try:
        print(text)
        sys.stdout.flush()
    except BrokenPipeError:
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (ValueError, json.JSONDecodeError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "print-config":
        out = cfg.to_dict()
        out["run_id"] = cfg.run_id()
        _print_out(json.dumps(out, indent=2, sort_keys=True))
        return 0

    dispatch = {
        "sweep": cmd_sweep,
        "rmap": cmd_rmap,
        "fit": cmd_fit,
        "dos": cmd_dos,
        "finite-size": cmd_finite_size,
        "evolve": cmd_evolve,
    }
    try:
        base = dispatch[args.command](cfg, out_root=args.out)
    except LabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _print_out(base)
    return 0


if __name__ == "__main__":
    sys.exit(main())
