"""Post-processing: disorder averages, power-law exponent fits, critical
disorder estimates, diagonal-ensemble averages, and finite-size scans."""

from collections import namedtuple
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .basis import SectorBasis, enumerate_sector
from .errors import (
    EmptyInput,
    GridMismatch,
    LogDomainError,
    NoCrossing,
    SubsetTooSmall,
    TargetEnergyUnreachable,
    VectorsRequired,
)
from .evolve import PHASE_PER_MHZ_NS, evolve_krylov
from .model import CouplingMatrix, build_hamiltonian, sample_disorder
from .observables import ImbalancePattern
from .prepare import DEFAULT_SELECT_TOL, select_initial_state
from .spectrum import EigenSystem, extremal_eigenvalues, full_spectrum

Series = namedtuple("Series", ["times", "values"])


@dataclass
class AveragedSeries:
    """Pointwise disorder average with standard errors of the mean."""

    times: np.ndarray
    mean: np.ndarray
    sem: np.ndarray
    k: int


@dataclass
class PowerLawFit:
    """Log-log least-squares fit I(t) ~ t^(-xi) over a time window."""

    xi: float
    xi_err: float
    window: Tuple[float, float]
    r_squared: float
    n_used: int
    n_dropped: int


@dataclass
class VcEstimate:
    """Crossing of the exponent curve into the large-V baseline."""

    vc_mhz: float
    vc_err: float
    baseline: float
    baseline_err: float


def disorder_average(series: Sequence[Series]) -> AveragedSeries:
    """Pointwise mean and SEM over realizations sharing one time grid."""
    if len(series) == 0:
        raise EmptyInput("no series to average")
    t0 = np.asarray(series[0].times, dtype=np.float64)
    rows = []
    for s in series:
        t = np.asarray(s.times, dtype=np.float64)
        if t.shape != t0.shape or not np.array_equal(t, t0):
            raise GridMismatch("series do not share the time grid")
        rows.append(np.asarray(s.values, dtype=np.float64))
    data = np.vstack(rows)
    k = data.shape[0]
    mean = data.mean(axis=0)
    sem = data.std(axis=0, ddof=1) / np.sqrt(k) if k > 1 else np.zeros_like(mean)
    return AveragedSeries(times=t0, mean=mean, sem=sem, k=k)


def default_fit_window(V_mhz: float) -> Tuple[float, float]:
    """Fit window in ns: [100, 1000] at the weakest disorder, else [100, 1500]."""
    return (100.0, 1000.0) if V_mhz <= 4.0 else (100.0, 1500.0)


def fit_power_law(series: AveragedSeries, window: Tuple[float, float]) -> PowerLawFit:
    """Least squares on log I vs log t; xi is minus the slope.

    Nonpositive in-window means cannot enter the log and are dropped with a
    count; fewer than 5 surviving points is an error.
    """
    t_lo, t_hi = window
    if not t_lo < t_hi:
        raise ValueError(f"bad window {window}")
    t = series.times
    y = series.mean
    sel = (t >= t_lo) & (t <= t_hi) & (t > 0)
    t_in, y_in = t[sel], y[sel]
    pos = y_in > 0
    n_dropped = int((~pos).sum())
    t_fit, y_fit = t_in[pos], y_in[pos]
    n = len(t_fit)
    if n < 5:
        raise LogDomainError(n_dropped, n)
    x = np.log(t_fit)
    z = np.log(y_fit)
    xm, zm = x.mean(), z.mean()
    sxx = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (z - zm)).sum()) / sxx
    intercept = zm - slope * xm
    resid = z - (slope * x + intercept)
    ssr = float((resid ** 2).sum())
    sst = float(((z - zm) ** 2).sum())
    var_slope = ssr / (n - 2) / sxx if n > 2 else 0.0
    r2 = 1.0 - ssr / sst if sst > 0 else 1.0
    return PowerLawFit(
        xi=-slope,
        xi_err=float(np.sqrt(max(var_slope, 0.0))),
        window=(float(t_lo), float(t_hi)),
        r_squared=r2,
        n_used=n,
        n_dropped=n_dropped,
    )


DEFAULT_BASELINE_BAND = (38.0, 50.0)


def estimate_vc(xi_vs_V: Sequence, baseline_band: Tuple[float, float] = DEFAULT_BASELINE_BAND
                ) -> VcEstimate:
    """Estimate the critical disorder as the first entry into the large-V
    baseline, linearly interpolated between grid points.

    Points are (V, xi) or (V, xi, xi_err) tuples; the baseline is the mean
    exponent over the band.
    """
    pts = sorted((tuple(map(float, p)) for p in xi_vs_V), key=lambda p: p[0])
    if len(pts) < 2:
        raise EmptyInput("need at least two (V, xi) points")
    V = np.array([p[0] for p in pts])
    xi = np.array([p[1] for p in pts])
    errs = np.array([p[2] if len(p) > 2 else 0.0 for p in pts])
    lo, hi = baseline_band
    band = (V >= lo) & (V <= hi)
    if not band.any():
        raise EmptyInput("no exponent points inside the baseline band")
    baseline = float(xi[band].mean())
    nb = int(band.sum())
    baseline_err = float(xi[band].std(ddof=1) / np.sqrt(nb)) if nb > 1 else float(errs[band][0])

    if xi[0] <= baseline:
        return VcEstimate(vc_mhz=float(V[0]), vc_err=float(errs[0]),
                          baseline=baseline, baseline_err=baseline_err)
    for i in range(1, len(pts)):
        if xi[i] <= baseline:
            dv = V[i] - V[i - 1]
            dxi = xi[i - 1] - xi[i]
            vc = V[i - 1] + (xi[i - 1] - baseline) * dv / dxi
            local_err = 0.5 * (errs[i - 1] + errs[i])
            vc_err = dv / dxi * float(np.hypot(baseline_err, local_err))
            return VcEstimate(vc_mhz=float(vc), vc_err=float(abs(vc_err)),
                              baseline=baseline, baseline_err=baseline_err)
    raise NoCrossing(f"exponent never reaches baseline {baseline:.3f}")


def diagonal_ensemble_values(eigs: EigenSystem, psi0: np.ndarray,
                             values: np.ndarray) -> float:
    """DE = sum_a |c_a|^2 O_aa for a Fock-diagonal observable given by its
    per-basis-state values."""
    if eigs.vectors is None:
        raise VectorsRequired("diagonal ensemble needs eigenvectors")
    Q = eigs.vectors
    c = Q.T @ psi0
    w = np.abs(c) ** 2
    # O_aa in column chunks to bound the Q**2 transient
    dim = Q.shape[1]
    Oaa = np.empty(dim)
    step = max(1, min(dim, 64_000_000 // max(Q.shape[0], 1)))
    for a0 in range(0, dim, step):
        block = Q[:, a0:a0 + step]
        Oaa[a0:a0 + step] = (block * block).T @ values
    return float(w @ Oaa)


def diagonal_ensemble(eigs: EigenSystem, psi0: np.ndarray, pattern: ImbalancePattern,
                      basis: SectorBasis) -> float:
    """Infinite-time average of the generalized imbalance after a quench."""
    return diagonal_ensemble_values(eigs, psi0, pattern.eigenvalues(basis))


@dataclass
class FiniteSizeRow:
    n_sites: int
    dim: int
    eps_target: float
    v_mhz: float
    i_gen_final: Optional[float]
    i_gen_final_sem: float
    i_gen_de: Optional[float]
    i_gen_de_sem: float
    k_used: int
    n_gaps: int


def _subset_seed(master_seed: int, n_sites: int, k: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(n_sites, k))
    return int(ss.generate_state(1, np.uint64)[0])


def finite_size_series(J_full: CouplingMatrix, V: float,
                       subsets: Sequence[Union[int, Sequence[int]]],
                       eps_targets: Sequence[float], k: int, master_seed: int,
                       t_final: float = 1500.0, full_cap: int = 13000,
                       select_tol: float = DEFAULT_SELECT_TOL,
                       krylov_dim: int = 30, krylov_tol: float = 1e-10
                       ) -> List[FiniteSizeRow]:
    """Imbalance pipeline per site subset: I_gen at t_final and, where the
    dimension permits full diagonalization, the diagonal ensemble.

    An integer subset entry keeps the first N sites. Excitation count is
    floor(N/2) per the balanced-sector convention. One disorder draw per
    (size, realization) serves every energy-density target, so the two
    targets probe the same spectrum.
    """
    norm_subsets = []
    for s in subsets:
        sites = tuple(range(s)) if isinstance(s, (int, np.integer)) else tuple(s)
        if len(sites) < 4:
            raise SubsetTooSmall(f"subset {sites} has fewer than 4 sites")
        if max(sites) >= J_full.n_sites:
            raise ValueError(f"subset {sites} outside the full model")
        norm_subsets.append(sites)

    rows: List[FiniteSizeRow] = []
    for sites in norm_subsets:
        n = len(sites)
        n_exc = n // 2
        basis = enumerate_sector(n, n_exc)
        J_sub = CouplingMatrix(n, J_full.J[np.ix_(sites, sites)])
        finals = {eps: [] for eps in eps_targets}
        des = {eps: [] for eps in eps_targets}
        gaps = {eps: 0 for eps in eps_targets}
        for kk in range(k):
            seed = _subset_seed(master_seed, n, kk)
            disorder = sample_disorder(V, seed, n)
            H = build_hamiltonian(basis, J_sub, disorder)
            E_min, E_max = extremal_eigenvalues(H)
            eigs = full_spectrum(H, want_vectors=True, cap=full_cap) \
                if basis.dim <= full_cap else None
            for eps in eps_targets:
                try:
                    inst = select_initial_state(basis, disorder, E_min, E_max,
                                                eps, select_tol)
                except TargetEnergyUnreachable:
                    gaps[eps] += 1
                    continue
                k0 = basis.index_of(inst.initial_state)
                psi0 = np.zeros(basis.dim, dtype=np.complex128)
                psi0[k0] = 1.0
                pattern = ImbalancePattern.from_fock(inst.initial_state)
                ivals = pattern.eigenvalues(basis)
                if eigs is not None:
                    c = eigs.vectors.T @ psi0
                    phase = np.exp(-1j * PHASE_PER_MHZ_NS * eigs.energies * t_final)
                    psi_t = eigs.vectors @ (phase * c)
                    finals[eps].append(float(ivals @ np.abs(psi_t) ** 2))
                    des[eps].append(diagonal_ensemble_values(eigs, psi0, ivals))
                else:
                    traj = evolve_krylov(
                        H, psi0, np.array([0.0, t_final]), krylov_dim, krylov_tol,
                        observer=lambda u, iv=ivals: {"i_gen": float(iv @ np.abs(u) ** 2)})
                    finals[eps].append(float(traj.observables["i_gen"][-1]))
            del eigs
        for eps in eps_targets:
            fvals = np.array(finals[eps])
            dvals = np.array(des[eps])
            kc = len(fvals)
            rows.append(FiniteSizeRow(
                n_sites=n,
                dim=basis.dim,
                eps_target=float(eps),
                v_mhz=float(V),
                i_gen_final=float(fvals.mean()) if kc else None,
                i_gen_final_sem=float(fvals.std(ddof=1) / np.sqrt(kc)) if kc > 1 else 0.0,
                i_gen_de=float(dvals.mean()) if len(dvals) else None,
                i_gen_de_sem=float(dvals.std(ddof=1) / np.sqrt(len(dvals))) if len(dvals) > 1 else 0.0,
                k_used=kc,
                n_gaps=gaps[eps],
            ))
    return rows
