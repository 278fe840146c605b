"""Shared fixtures for the acceptance suite.

The heavy acceptance checks consume a persistent cache directory populated
through the same checkpoint/resume pipelines the CLI uses. A cold cache makes
the first run compute everything (hours); a warm cache verifies in seconds.
Run this module directly to pre-warm every cache:

    python3 tests/acceptance_configs.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from mbllab.runner import (  # noqa: E402
    RMAP_SALT,
    RunConfig,
    cmd_dos,
    cmd_finite_size,
    cmd_fit,
    cmd_sweep,
    run_base_dir,
)

CACHE_ROOT = os.environ.get(
    "MBLLAB_ACCEPT_CACHE",
    os.path.join(os.path.dirname(__file__), "..", ".acceptance_cache"))

MASTER_SEED = 12903

# contrast + conservation + the V/2pi = 16 MHz exponent
SWEEP_A = dict(
    eps_grid=[0.15, 0.5], v_grid=[16.0], k=20,
    master_seed=MASTER_SEED, workers=1)

# exponent ladder at eps = 0.5 plus the large-V baseline band
SWEEP_B = dict(
    eps_grid=[0.5], v_grid=[4.0, 38.0, 50.0], k=20,
    master_seed=MASTER_SEED, workers=1)

DOS_CFG = dict(
    rmap_n_sites=14, dos_v_grid=[4.0, 50.0], dos_bins=25,
    dos_realizations=10, master_seed=MASTER_SEED, workers=1)

FS_CFG = dict(
    fs_sizes=[14, 15, 16], fs_eps=[0.2, 0.5], fs_k=3, fs_v=16.0,
    master_seed=MASTER_SEED, workers=1)

LEVELSTATS_N_SITES = 14
LEVELSTATS_K = 50
LEVELSTATS_V = [4.0, 50.0]


def sweep_a_dir() -> str:
    cfg = RunConfig.from_dict(SWEEP_A)
    base = run_base_dir(cfg, CACHE_ROOT)
    cmd_sweep(cfg, out_root=CACHE_ROOT)
    cmd_fit(cfg, out_root=CACHE_ROOT)
    return base


def sweep_b_dir() -> str:
    cfg = RunConfig.from_dict(SWEEP_B)
    base = run_base_dir(cfg, CACHE_ROOT)
    cmd_sweep(cfg, out_root=CACHE_ROOT)
    cmd_fit(cfg, out_root=CACHE_ROOT)
    return base


def dos_dir() -> str:
    cfg = RunConfig.from_dict(DOS_CFG)
    base = run_base_dir(cfg, CACHE_ROOT)
    want = [os.path.join(base, "summary", f"dos_v{v:g}.csv")
            for v in cfg.dos_v_grid]
    if not all(os.path.exists(p) for p in want):
        cmd_dos(cfg, out_root=CACHE_ROOT)
    return base


def finite_size_dir() -> str:
    cfg = RunConfig.from_dict(FS_CFG)
    base = run_base_dir(cfg, CACHE_ROOT)
    if not os.path.exists(os.path.join(base, "summary", "finite_size.csv")):
        cmd_finite_size(cfg, out_root=CACHE_ROOT)
    return base


def levelstats_path() -> str:
    """Middle-half mean gap ratios per realization, cached as JSON."""
    path = os.path.join(CACHE_ROOT, "levelstats.json")
    if os.path.exists(path):
        return path
    import numpy as np

    from mbllab import (
        build_hamiltonian,
        default_device_couplings,
        enumerate_sector,
        full_spectrum,
        sample_disorder,
    )
    from mbllab.prepare import realization_seed
    from mbllab.spectrum import MIDDLE_HALF, mean_r_in_window

    n = LEVELSTATS_N_SITES
    basis = enumerate_sector(n, n // 2)
    J = default_device_couplings(n)
    out = {}
    for vi, V in enumerate(LEVELSTATS_V):
        rs = []
        for kk in range(LEVELSTATS_K):
            seed = realization_seed(MASTER_SEED, RMAP_SALT, vi, kk)
            disorder = sample_disorder(V, seed, n)
            H = build_hamiltonian(basis, J, disorder)
            eigs = full_spectrum(H, want_vectors=False, cap=6500)
            mean_r, count = mean_r_in_window(eigs, MIDDLE_HALF)
            rs.append({"seed": seed, "mean_r": mean_r, "count": count})
            print(f"  levelstats V={V} k={kk}: r={mean_r:.4f}", flush=True)
        out[f"{V:g}"] = rs
    os.makedirs(CACHE_ROOT, exist_ok=True)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w") as fh:
        json.dump({"n_sites": n, "k": LEVELSTATS_K, "values": out}, fh)
    os.replace(tmp, path)
    return path


if __name__ == "__main__":
    print("pre-warming acceptance caches under", CACHE_ROOT, flush=True)
    print("== sweep A ==", flush=True)
    sweep_a_dir()
    print("== level statistics ==", flush=True)
    levelstats_path()
    print("== dos ==", flush=True)
    dos_dir()
    print("== finite size ==", flush=True)
    finite_size_dir()
    print("== sweep B ==", flush=True)
    sweep_b_dir()
    print("all caches warm", flush=True)
