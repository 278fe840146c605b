"""Sweep orchestration: configuration, seeding, checkpointing, worker pool,
and the output file layout shared by every subcommand.

Layout per run: <out_root>/<run-id>/cells/eps.._v.._k...csv plus
summary/*.csv, with run-id a hash of the physics-relevant config fields.
Cell files and the checkpoint ledger are written to a temp name and renamed,
so interrupting and resuming never leaves corrupt or duplicate cells.
"""

import dataclasses
import hashlib
import json
import multiprocessing
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .analysis import (
    AveragedSeries,
    Series,
    default_fit_window,
    disorder_average,
    estimate_vc,
    finite_size_series,
    fit_power_law,
)
from .basis import SectorBasis, enumerate_sector
from .errors import (
    DimensionTooLarge,
    EmptyInput,
    InsufficientStatistics,
    IoError,
    LogDomainError,
    NoCrossing,
    TargetEnergyUnreachable,
)
from .evolve import evolve_krylov
from .model import (
    CouplingMatrix,
    all_diagonal_energies,
    build_hamiltonian,
    coupling_from_device,
    default_device_couplings,
    load_device_parameters,
    sample_disorder,
)
from .observables import ImbalancePattern
from .prepare import realization_seed, select_initial_state
from .spectrum import (
    GOE_MEAN_R,
    POISSON_MEAN_R,
    SpectralWindow,
    extremal_eigenvalues,
    full_spectrum,
    mean_r_in_window,
)

# spawn-key salts keeping the derived seed streams of the non-sweep
# pipelines disjoint from sweep cells and from each other
RMAP_SALT = 901
DOS_SALT = 902
FS_SALT = 903
EVOLVE_SALT = 904

FLOAT_FMT = "%.12e"

DEFAULT_EPS_GRID = [round(0.05 * i, 2) for i in range(1, 20)]
DEFAULT_V_GRID = [2.0, 4.0, 8.0, 12.0, 16.0, 20.0, 26.0, 32.0, 40.0, 50.0]
DEFAULT_SCHEDULE_LIST = [float(t) for t in np.arange(0.0, 1520.0, 20.0)]


@dataclass
class RunConfig:
    """Everything a run depends on; the run-id hashes the physics fields."""

    n_sites: int = 19
    n_excitations: int = 9
    coupling_source: str = "default"  # default | device | matrix
    coupling_path: Optional[str] = None
    eps_grid: List[float] = field(default_factory=lambda: list(DEFAULT_EPS_GRID))
    v_grid: List[float] = field(default_factory=lambda: list(DEFAULT_V_GRID))
    k: int = 20
    schedule: List[float] = field(default_factory=lambda: list(DEFAULT_SCHEDULE_LIST))
    snapshot_times: List[float] = field(default_factory=lambda: [1000.0])
    observables: List[str] = field(default_factory=lambda: ["i_gen", "pr", "f_q"])
    master_seed: int = 12903
    select_tol: float = 0.025
    krylov_dim: int = 30
    krylov_tol: float = 1e-10
    extremes_tol: float = 1e-10
    full_spectrum_cap: int = 5000
    fit_window: Optional[List[float]] = None  # null picks the per-V default
    baseline_band: List[float] = field(default_factory=lambda: [38.0, 50.0])
    rmap_n_sites: int = 14
    rmap_k: int = 50
    rmap_v_grid: List[float] = field(default_factory=lambda: [4.0, 16.0, 50.0])
    dos_v_grid: List[float] = field(default_factory=lambda: [4.0, 16.0, 50.0])
    dos_bins: int = 25
    dos_realizations: int = 10
    fs_sizes: List[int] = field(default_factory=lambda: [14, 15, 16])
    fs_eps: List[float] = field(default_factory=lambda: [0.2, 0.5])
    fs_k: int = 3
    fs_v: float = 16.0
    fs_full_cap: int = 13000
    fs_t_final: float = 1500.0
    evolve_eps: float = 0.15
    evolve_v: float = 16.0
    evolve_k_index: int = 0
    out_dir: str = "out"
    workers: int = 0  # 0 means cpu count

    # fields that do not define the ensemble, excluded from the run-id:
    # evolve_* only select which single trajectory to dump and the output
    # filename already carries them
    _NON_PHYSICS = ("out_dir", "workers", "evolve_eps", "evolve_v",
                    "evolve_k_index")

    def __post_init__(self):
        if not self.eps_grid or not self.v_grid:
            raise ValueError("grids must be non-empty")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.schedule or self.schedule[0] != 0.0:
            raise ValueError("schedule must start at 0")
        for t in self.snapshot_times:
            if not any(abs(t - s) < 1e-9 for s in self.schedule):
                raise ValueError(f"snapshot time {t} not on the schedule")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def canonical_json(self) -> str:
        d = {k: v for k, v in self.to_dict().items() if k not in self._NON_PHYSICS}
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    def run_id(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:12]


def resolve_couplings(cfg: RunConfig, n_sites: Optional[int] = None) -> CouplingMatrix:
    n = n_sites if n_sites is not None else cfg.n_sites
    if cfg.coupling_source == "default":
        return default_device_couplings(n)
    if cfg.coupling_source == "device":
        params = load_device_parameters(cfg.coupling_path)
        J = coupling_from_device(params)
        if J.n_sites < n:
            raise ValueError(f"device file has {J.n_sites} sites, need {n}")
        return CouplingMatrix(n, J.J[:n, :n])
    if cfg.coupling_source == "matrix":
        if not cfg.coupling_path:
            raise ValueError("coupling_source 'matrix' needs coupling_path")
        with open(cfg.coupling_path) as fh:
            J = CouplingMatrix.from_json_dict(json.load(fh))
        if J.n_sites < n:
            raise ValueError(f"matrix file has {J.n_sites} sites, need {n}")
        return CouplingMatrix(n, J.J[:n, :n])
    raise ValueError(f"unknown coupling_source {cfg.coupling_source!r}")


# ---------------------------------------------------------------------------
# file helpers

def _ensure_dir(path: str):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {path}: {exc}") from exc


def write_csv(path: str, columns: Sequence[str], rows: Sequence[Sequence],
              comments: Sequence[str] = ()):
    """Write a CSV atomically: comment lines, header row, data rows."""
    _ensure_dir(os.path.dirname(path))
    tmp = f"{path}.tmp{os.getpid()}"
    try:
        with open(tmp, "w") as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_format_field(x) for x in row) + "\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _format_field(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return FLOAT_FMT % x
    return str(x)


def read_csv(path: str) -> Tuple[List[str], Dict[str, List[str]], List[str]]:
    """Read back a CSV written by write_csv: (comments, columns dict, header)."""
    comments = []
    header: List[str] = []
    cols: Dict[str, List[str]] = {}
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line[1:].strip())
                continue
            parts = line.split(",")
            if not header:
                header = parts
                cols = {h: [] for h in header}
                continue
            for h, v in zip(header, parts):
                cols[h].append(v)
    return comments, cols, header


def file_sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class CheckpointLedger:
    """Per-cell status keyed by (eps_index, v_index, realization), persisted
    as JSON after every update via an atomic replace."""

    def __init__(self, path: str, config_hash: str):
        self.path = path
        self.config_hash = config_hash
        self.cells: Dict[str, dict] = {}
        if os.path.exists(path):
            with open(path) as fh:
                data = json.load(fh)
            if data.get("config_hash") == config_hash:
                self.cells = data.get("cells", {})

    @staticmethod
    def key(ei: int, vi: int, kk: int) -> str:
        return f"{ei},{vi},{kk}"

    def status(self, ei: int, vi: int, kk: int, base_dir: str) -> Optional[str]:
        """'done'/'gap' when the recorded state is still valid, else None."""
        entry = self.cells.get(self.key(ei, vi, kk))
        if entry is None:
            return None
        if entry["status"] == "gap":
            return "gap"
        path = os.path.join(base_dir, entry["file"])
        if not os.path.exists(path) or file_sha256(path) != entry["sha256"]:
            return None
        return "done"

    def record(self, ei: int, vi: int, kk: int, entry: dict):
        self.cells[self.key(ei, vi, kk)] = entry
        self.flush()

    def flush(self):
        tmp = f"{self.path}.tmp{os.getpid()}"
        with open(tmp, "w") as fh:
            json.dump({"config_hash": self.config_hash, "cells": self.cells}, fh,
                      indent=0, sort_keys=True)
        os.replace(tmp, self.path)


# ---------------------------------------------------------------------------
# sweep cells

_WORKER: dict = {}


def _init_sweep_worker(cfg_dict: dict):
    cfg = RunConfig.from_dict(cfg_dict)
    _WORKER["cfg"] = cfg
    _WORKER["basis"] = enumerate_sector(cfg.n_sites, cfg.n_excitations)
    _WORKER["J"] = resolve_couplings(cfg)


def cell_filename(ei: int, vi: int, kk: int) -> str:
    return f"cells/eps{ei:02d}_v{vi:02d}_k{kk:02d}.csv"


def _run_sweep_cell(task: Tuple[int, int, int, str]) -> dict:
    """Compute one (eps, V, realization) cell and write its CSV."""
    ei, vi, kk, base_dir = task
    cfg: RunConfig = _WORKER["cfg"]
    basis: SectorBasis = _WORKER["basis"]
    J: CouplingMatrix = _WORKER["J"]
    eps_target = cfg.eps_grid[ei]
    V = cfg.v_grid[vi]
    seed = realization_seed(cfg.master_seed, ei, vi, kk)
    disorder = sample_disorder(V, seed, cfg.n_sites)
    H = build_hamiltonian(basis, J, disorder)
    E_min, E_max = extremal_eigenvalues(H, tol=cfg.extremes_tol)
    try:
        inst = select_initial_state(basis, disorder, E_min, E_max, eps_target,
                                    cfg.select_tol)
    except TargetEnergyUnreachable as exc:
        return {"ei": ei, "vi": vi, "kk": kk, "status": "gap", "seed": seed,
                "best_gap": exc.best_gap}

    psi0 = np.zeros(basis.dim, dtype=np.complex128)
    psi0[basis.index_of(inst.initial_state)] = 1.0
    pattern = ImbalancePattern.from_fock(inst.initial_state)
    ivals = pattern.eigenvalues(basis)
    want = set(cfg.observables)

    def observer(u):
        p = np.abs(u) ** 2
        row = {}
        if "i_gen" in want:
            row["i_gen"] = float(ivals @ p)
        if "pr" in want:
            row["pr"] = 1.0 / float(p @ p)
        if "f_q" in want:
            m1 = float(ivals @ p)
            row["f_q"] = float((ivals * ivals) @ p) - m1 * m1
        return row

    traj = evolve_krylov(H, psi0, np.asarray(cfg.schedule), cfg.krylov_dim,
                         cfg.krylov_tol, observer=observer)
    rel = cell_filename(ei, vi, kk)
    path = os.path.join(base_dir, rel)
    obs = traj.observables
    rows = []
    for i, t in enumerate(traj.times):
        rows.append([
            float(t),
            float(obs["i_gen"][i]) if "i_gen" in obs else None,
            float(obs["pr"][i]) if "pr" in obs else None,
            float(obs["f_q"][i]) if "f_q" in obs else None,
            float(traj.norm[i]),
            float(traj.energy_mhz[i]),
        ])
    write_csv(path, ["t_ns", "i_gen", "pr", "f_q", "norm", "energy_mhz"], rows, comments=[
        f"config-hash: {cfg.run_id()}",
        f"seed: {seed}",
        f"eps_target: {eps_target}",
        f"eps_achieved: {inst.eps_achieved:.6f}",
        f"v_mhz: {V}",
        f"initial_state: {inst.initial_state.to_bitstring()}",
        f"e_mhz: {inst.E:.9e}",
        f"e_min_mhz: {E_min:.9e}",
        f"e_max_mhz: {E_max:.9e}",
    ])
    return {"ei": ei, "vi": vi, "kk": kk, "status": "done", "seed": seed,
            "file": rel, "sha256": file_sha256(path),
            "eps_achieved": inst.eps_achieved}


def _log(msg: str):
    print(msg, file=sys.stderr, flush=True)


def run_base_dir(cfg: RunConfig, out_root: Optional[str] = None) -> str:
    root = out_root or os.environ.get("MBLLAB_OUT_ROOT") or cfg.out_dir
    return os.path.join(root, cfg.run_id())


def cmd_sweep(cfg: RunConfig, out_root: Optional[str] = None) -> str:
    """Run (or resume) the full (eps, V, k) sweep and write summaries."""
    base = run_base_dir(cfg, out_root)
    _ensure_dir(os.path.join(base, "cells"))
    _ensure_dir(os.path.join(base, "summary"))
    with open(os.path.join(base, "config.json"), "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
    ledger = CheckpointLedger(os.path.join(base, "ledger.json"), cfg.run_id())

    tasks = []
    for ei in range(len(cfg.eps_grid)):
        for vi in range(len(cfg.v_grid)):
            for kk in range(cfg.k):
                if ledger.status(ei, vi, kk, base) is None:
                    tasks.append((ei, vi, kk, base))
    total = len(cfg.eps_grid) * len(cfg.v_grid) * cfg.k
    _log(f"sweep {cfg.run_id()}: {total} cells, {len(tasks)} to run")

    workers = cfg.workers if cfg.workers > 0 else (os.cpu_count() or 1)
    t0 = time.time()
    done_count = 0

    def handle(result: dict):
        nonlocal done_count
        done_count += 1
        ei, vi, kk = result["ei"], result["vi"], result["kk"]
        entry = {k: v for k, v in result.items() if k not in ("ei", "vi", "kk")}
        ledger.record(ei, vi, kk, entry)
        if done_count % 1 == 0:
            _log(f"  [{done_count}/{len(tasks)}] eps={cfg.eps_grid[ei]} "
                 f"V={cfg.v_grid[vi]} k={kk}: {result['status']} "
                 f"({time.time()-t0:.0f} s elapsed)")

    if workers <= 1 or len(tasks) <= 1:
        _init_sweep_worker(cfg.to_dict())
        for task in tasks:
            handle(_run_sweep_cell(task))
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers, initializer=_init_sweep_worker,
                      initargs=(cfg.to_dict(),)) as pool:
            for result in pool.imap_unordered(_run_sweep_cell, tasks):
                handle(result)

    write_sweep_summaries(cfg, base, ledger)
    return base


def write_sweep_summaries(cfg: RunConfig, base: str, ledger: CheckpointLedger):
    """Disorder-averaged series and snapshot heatmap from the cell files."""
    comments = [f"config-hash: {cfg.run_id()}"]
    avg_rows = []
    heat_rows = []
    for ei, eps in enumerate(cfg.eps_grid):
        for vi, V in enumerate(cfg.v_grid):
            series = {name: [] for name in ("i_gen", "pr", "f_q")}
            times = None
            n_gap = 0
            for kk in range(cfg.k):
                entry = ledger.cells.get(ledger.key(ei, vi, kk))
                if entry is None:
                    continue
                if entry["status"] == "gap":
                    n_gap += 1
                    continue
                _, cols, _ = read_csv(os.path.join(base, entry["file"]))
                t = np.array([float(x) for x in cols["t_ns"]])
                times = t
                for name in series:
                    if cols.get(name) and cols[name][0] != "":
                        series[name].append(
                            Series(t, np.array([float(x) for x in cols[name]])))
            k_done = len(series["i_gen"])
            if k_done:
                avg = {name: disorder_average(s) for name, s in series.items() if s}
                for i, t in enumerate(times):
                    row = [eps, V, float(t)]
                    for name in ("i_gen", "pr", "f_q"):
                        a = avg.get(name)
                        row += [a.mean[i], a.sem[i]] if a is not None else [None, None]
                    row.append(k_done)
                    avg_rows.append(row)
            for t_snap in cfg.snapshot_times:
                if k_done:
                    i_snap = int(np.argmin(np.abs(times - t_snap)))
                    a = avg["i_gen"]
                    heat_rows.append([eps, V, float(t_snap), a.mean[i_snap],
                                      a.sem[i_snap], k_done, n_gap])
                else:
                    heat_rows.append([eps, V, float(t_snap), None, None, 0, n_gap])
    write_csv(os.path.join(base, "summary", "avg_series.csv"),
              ["eps", "v_mhz", "t_ns", "i_gen_mean", "i_gen_sem", "pr_mean",
               "pr_sem", "f_q_mean", "f_q_sem", "k"],
              avg_rows, comments)
    write_csv(os.path.join(base, "summary", "heatmap.csv"),
              ["eps", "v_mhz", "t_ns", "i_gen_mean", "i_gen_sem", "n_done", "n_gap"],
              heat_rows, comments)


def cmd_fit(cfg: RunConfig, out_root: Optional[str] = None) -> str:
    """Power-law exponents per (eps, V) from the averaged series, then V_c."""
    base = run_base_dir(cfg, out_root)
    avg_path = os.path.join(base, "summary", "avg_series.csv")
    if not os.path.exists(avg_path):
        raise IoError(f"{avg_path} missing; run sweep first")
    _, cols, _ = read_csv(avg_path)
    eps_v = np.array([float(x) for x in cols["eps"]])
    v_v = np.array([float(x) for x in cols["v_mhz"]])
    t_v = np.array([float(x) for x in cols["t_ns"]])
    mean_v = np.array([float(x) if x != "" else np.nan for x in cols["i_gen_mean"]])

    comments = [f"config-hash: {cfg.run_id()}"]
    fit_rows = []
    fits: Dict[float, List[Tuple[float, float, float]]] = {}
    for eps in sorted(set(eps_v)):
        for V in sorted(set(v_v)):
            sel = (eps_v == eps) & (v_v == V)
            if not sel.any():
                continue
            series = AveragedSeries(times=t_v[sel], mean=mean_v[sel],
                                    sem=np.zeros(sel.sum()), k=0)
            window = tuple(cfg.fit_window) if cfg.fit_window else default_fit_window(V)
            try:
                fit = fit_power_law(series, window)
            except LogDomainError as exc:
                _log(f"  fit eps={eps} V={V}: {exc}")
                fit_rows.append([eps, V, None, None, None, window[0], window[1],
                                 exc.n_nonpositive])
                continue
            fit_rows.append([eps, V, fit.xi, fit.xi_err, fit.r_squared,
                             window[0], window[1], fit.n_dropped])
            fits.setdefault(eps, []).append((V, fit.xi, fit.xi_err))
    write_csv(os.path.join(base, "summary", "fits.csv"),
              ["eps", "v_mhz", "xi", "xi_err", "r2", "window_lo", "window_hi",
               "n_dropped"], fit_rows, comments)

    vc_rows = []
    for eps, pts in sorted(fits.items()):
        try:
            est = estimate_vc(pts, tuple(cfg.baseline_band))
            vc_rows.append([eps, est.vc_mhz, est.vc_err, est.baseline,
                            est.baseline_err])
        except (NoCrossing, EmptyInput) as exc:
            _log(f"  vc eps={eps}: {exc}")
            vc_rows.append([eps, None, None, None, None])
    write_csv(os.path.join(base, "summary", "vc.csv"),
              ["eps", "vc_mhz", "vc_err", "baseline", "baseline_err"],
              vc_rows, comments)
    return base


def cmd_rmap(cfg: RunConfig, out_root: Optional[str] = None) -> str:
    """Energy-resolved gap-ratio map over (eps bin, V) with per-realization rows."""
    base = run_base_dir(cfg, out_root)
    _ensure_dir(os.path.join(base, "summary"))
    n = cfg.rmap_n_sites
    basis = enumerate_sector(n, n // 2)
    if basis.dim > cfg.full_spectrum_cap:
        raise DimensionTooLarge(
            f"rmap sector dim {basis.dim} exceeds cap {cfg.full_spectrum_cap}; "
            f"reduce rmap_n_sites")
    J = resolve_couplings(cfg, n)
    centers = [round(0.05 * i, 2) for i in range(1, 20)]
    comments = [
        f"config-hash: {cfg.run_id()}",
        f"n_sites: {n}",
        f"goe-mean-r: {GOE_MEAN_R}",
        f"poisson-mean-r: {POISSON_MEAN_R}",
    ]
    rows = []
    agg: Dict[Tuple[float, float], List[Tuple[float, int]]] = {}
    for vi, V in enumerate(cfg.rmap_v_grid):
        for kk in range(cfg.rmap_k):
            seed = realization_seed(cfg.master_seed, RMAP_SALT, vi, kk)
            disorder = sample_disorder(V, seed, n)
            H = build_hamiltonian(basis, J, disorder)
            eigs = full_spectrum(H, want_vectors=False, cap=cfg.full_spectrum_cap)
            for c in centers:
                window = SpectralWindow(max(c - 0.025, 0.0), min(c + 0.025, 1.0))
                try:
                    mean_r, count = mean_r_in_window(eigs, window)
                except InsufficientStatistics as exc:
                    rows.append([seed, V, c, None, exc.count])
                    continue
                rows.append([seed, V, c, mean_r, count])
                agg.setdefault((c, V), []).append((mean_r, count))
            _log(f"  rmap V={V} k={kk} done")
    write_csv(os.path.join(base, "summary", "rmap.csv"),
              ["realization_seed", "v_mhz", "eps_bin_center", "mean_r", "count"],
              rows, comments)
    grid_rows = []
    for (c, V), vals in sorted(agg.items()):
        wsum = sum(cnt for _, cnt in vals)
        wmean = sum(r * cnt for r, cnt in vals) / wsum
        grid_rows.append([c, V, wmean, wsum])
    write_csv(os.path.join(base, "summary", "rmap_grid.csv"),
              ["eps_bin_center", "v_mhz", "mean_r", "total_count"],
              grid_rows, comments)
    return base


def cmd_dos(cfg: RunConfig, out_root: Optional[str] = None) -> str:
    """Paired Fock-energy and eigenvalue DOS histograms per disorder amplitude."""
    from .spectrum import dos_histogram

    base = run_base_dir(cfg, out_root)
    _ensure_dir(os.path.join(base, "summary"))
    n = cfg.rmap_n_sites
    basis = enumerate_sector(n, n // 2)
    if basis.dim > cfg.full_spectrum_cap:
        raise DimensionTooLarge(f"dos sector dim {basis.dim} exceeds cap")
    J = resolve_couplings(cfg, n)
    for vi, V in enumerate(cfg.dos_v_grid):
        fock_all = []
        eig_all = []
        for r in range(cfg.dos_realizations):
            seed = realization_seed(cfg.master_seed, DOS_SALT, vi, r)
            disorder = sample_disorder(V, seed, n)
            H = build_hamiltonian(basis, J, disorder)
            fock_all.append(all_diagonal_energies(basis, disorder))
            eig_all.append(full_spectrum(H, want_vectors=False,
                                         cap=cfg.full_spectrum_cap).energies)
        fock = np.concatenate(fock_all)
        eigv = np.concatenate(eig_all)
        lo = min(fock.min(), eigv.min())
        hi = max(fock.max(), eigv.max())
        hf = dos_histogram(fock, cfg.dos_bins, (lo, hi))
        he = dos_histogram(eigv, cfg.dos_bins, (lo, hi))
        rows = [[c, f, e] for c, f, e in zip(hf.centers, hf.masses, he.masses)]
        write_csv(os.path.join(base, "summary", f"dos_v{V:g}.csv"),
                  ["bin_center_mhz", "fock_density", "eigen_density"], rows,
                  comments=[f"config-hash: {cfg.run_id()}",
                            f"v_mhz: {V}", f"n_sites: {n}",
                            f"realizations: {cfg.dos_realizations}"])
        _log(f"  dos V={V} done")
    return base


def cmd_finite_size(cfg: RunConfig, out_root: Optional[str] = None) -> str:
    """Finite-size imbalance scan by removing the highest-index sites."""
    base = run_base_dir(cfg, out_root)
    _ensure_dir(os.path.join(base, "summary"))
    J = resolve_couplings(cfg, max(cfg.fs_sizes))
    rows_out = []
    for size in cfg.fs_sizes:
        rows = finite_size_series(
            J, cfg.fs_v, [size], cfg.fs_eps, cfg.fs_k, cfg.master_seed,
            t_final=cfg.fs_t_final, full_cap=cfg.fs_full_cap,
            select_tol=cfg.select_tol, krylov_dim=cfg.krylov_dim,
            krylov_tol=cfg.krylov_tol)
        for r in rows:
            rows_out.append([r.n_sites, r.dim, r.eps_target, r.v_mhz,
                             r.i_gen_final, r.i_gen_final_sem, r.i_gen_de,
                             r.i_gen_de_sem, r.k_used, r.n_gaps])
        _log(f"  finite-size n={size} done")
    write_csv(os.path.join(base, "summary", "finite_size.csv"),
              ["n_sites", "dim", "eps", "v_mhz", "i_gen_final", "i_gen_final_sem",
               "i_gen_de", "i_gen_de_sem", "k", "n_gaps"],
              rows_out, comments=[f"config-hash: {cfg.run_id()}"])
    return base


def cmd_evolve(cfg: RunConfig, out_root: Optional[str] = None) -> str:
    """Single-instance trajectory at (evolve_eps, evolve_v, evolve_k_index).

    When the point lies on the sweep grids the sweep cell's seed is reused,
    so the output matches that cell exactly; otherwise a dedicated stream.
    """
    base = run_base_dir(cfg, out_root)
    _ensure_dir(os.path.join(base, "summary"))
    basis = enumerate_sector(cfg.n_sites, cfg.n_excitations)
    J = resolve_couplings(cfg)
    eps, V, kk = cfg.evolve_eps, cfg.evolve_v, cfg.evolve_k_index
    ei = next((i for i, e in enumerate(cfg.eps_grid) if abs(e - eps) < 1e-9), None)
    vi = next((i for i, v in enumerate(cfg.v_grid) if abs(v - V) < 1e-9), None)
    if ei is not None and vi is not None:
        seed = realization_seed(cfg.master_seed, ei, vi, kk)
    else:
        seed = realization_seed(cfg.master_seed, EVOLVE_SALT, 0, kk)
    disorder = sample_disorder(V, seed, cfg.n_sites)
    H = build_hamiltonian(basis, J, disorder)
    E_min, E_max = extremal_eigenvalues(H, tol=cfg.extremes_tol)
    inst = select_initial_state(basis, disorder, E_min, E_max, eps, cfg.select_tol)
    psi0 = np.zeros(basis.dim, dtype=np.complex128)
    psi0[basis.index_of(inst.initial_state)] = 1.0
    ivals = ImbalancePattern.from_fock(inst.initial_state).eigenvalues(basis)

    def observer(u):
        p = np.abs(u) ** 2
        m1 = float(ivals @ p)
        return {"i_gen": m1, "pr": 1.0 / float(p @ p),
                "f_q": float((ivals * ivals) @ p) - m1 * m1}

    traj = evolve_krylov(H, psi0, np.asarray(cfg.schedule), cfg.krylov_dim,
                         cfg.krylov_tol, observer=observer)
    rows = [[float(t), float(traj.observables["i_gen"][i]),
             float(traj.observables["pr"][i]), float(traj.observables["f_q"][i]),
             float(traj.norm[i]), float(traj.energy_mhz[i])]
            for i, t in enumerate(traj.times)]
    path = os.path.join(base, "summary", f"evolve_eps{eps:g}_v{V:g}_k{kk}.csv")
    write_csv(path, ["t_ns", "i_gen", "pr", "f_q", "norm", "energy_mhz"], rows,
              comments=[f"config-hash: {cfg.run_id()}", f"seed: {seed}",
                        f"eps_target: {eps}", f"eps_achieved: {inst.eps_achieved:.6f}",
                        f"v_mhz: {V}",
                        f"initial_state: {inst.initial_state.to_bitstring()}"])
    _log(f"  evolve eps={eps} V={V} -> {path}")
    return base
