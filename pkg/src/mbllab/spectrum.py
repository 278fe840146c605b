"""Eigenvalue machinery: extremal eigenvalues, dense spectra, gap-ratio
statistics, energy densities, and density-of-states histograms."""

from collections import namedtuple
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    DegenerateSpectrum,
    DimensionTooLarge,
    EmptyInput,
    InsufficientStatistics,
    ShapeMismatch,
)
from .model import HamiltonianOperator

POISSON_MEAN_R = 2.0 * np.log(2.0) - 1.0  # ~0.3863
GOE_MEAN_R = 0.5307  # numerical random-matrix value

FULL_SPECTRUM_CAP = 5000
DENSE_EXTREMES_DIM = 256
LANCZOS_MAX_ITER = 400
DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralWindow:
    """Energy-density window [eps_lo, eps_hi] within [0, 1]."""

    eps_lo: float
    eps_hi: float

    def __post_init__(self):
        if not 0.0 <= self.eps_lo < self.eps_hi <= 1.0:
            raise ShapeMismatch(f"bad window [{self.eps_lo}, {self.eps_hi}]")


MIDDLE_HALF = SpectralWindow(0.25, 0.75)


@dataclass
class EigenSystem:
    """Ascending eigenvalues in MHz, optionally with orthonormal vectors."""

    energies: np.ndarray
    vectors: Optional[np.ndarray] = None

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=np.float64)
        if np.any(np.diff(self.energies) < 0):
            raise ShapeMismatch("energies must be ascending")

    @property
    def dim(self) -> int:
        return len(self.energies)


def energy_density(E, E_min: float, E_max: float):
    """Normalized position of E within the spectrum, (E - E_min)/(E_max - E_min)."""
    width = E_max - E_min
    if width <= 0:
        raise DegenerateSpectrum(f"zero spectral width at E_min={E_min}")
    return (E - E_min) / width


def _lanczos_extremes(H: HamiltonianOperator, tol: float, max_iter: int,
                      rng_seed: int = 0xED19) -> Tuple[float, float]:
    dim = H.dim
    m_cap = min(max_iter, dim)
    rng = np.random.default_rng(rng_seed)
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    V = np.empty((dim, m_cap), dtype=np.float64, order="F")
    alpha = np.zeros(m_cap)
    beta = np.zeros(m_cap)  # beta[j] couples v_j to v_{j+1}
    V[:, 0] = v
    w = np.empty(dim)
    last_resid = np.inf
    for j in range(m_cap):
        H.apply(V[:, j], w)
        alpha[j] = V[:, j] @ w
        w -= alpha[j] * V[:, j]
        if j > 0:
            w -= beta[j - 1] * V[:, j - 1]
        # full reorthogonalization, one classical pass plus a conditional second
        h = V[:, : j + 1].T @ w
        w -= V[:, : j + 1] @ h
        nw = np.linalg.norm(w)
        if nw < 0.5 * np.linalg.norm(h):
            h2 = V[:, : j + 1].T @ w
            w -= V[:, : j + 1] @ h2
            nw = np.linalg.norm(w)
        beta[j] = nw
        n_ritz = j + 1
        if n_ritz >= 2:
            d, e = alpha[:n_ritz], beta[: n_ritz - 1]
            w_lo, s_lo = scipy.linalg.eigh_tridiagonal(d, e, select="i", select_range=(0, 0))
            w_hi, s_hi = scipy.linalg.eigh_tridiagonal(
                d, e, select="i", select_range=(n_ritz - 1, n_ritz - 1))
            width = float(w_hi[0] - w_lo[0])
            scale = max(width, 1e-300)
            resid = beta[j] * max(abs(s_lo[-1, 0]), abs(s_hi[-1, 0]))
            last_resid = resid / scale
            if n_ritz == dim or beta[j] < 1e-14 * max(1.0, np.max(np.abs(alpha[:n_ritz]))):
                return float(w_lo[0]), float(w_hi[0])
            if last_resid <= tol and n_ritz >= 8:
                return float(w_lo[0]), float(w_hi[0])
        if j + 1 < m_cap:
            V[:, j + 1] = w / beta[j]
    raise ConvergenceFailure(last_resid)


def extremal_eigenvalues(H: HamiltonianOperator, tol: float = 1e-10,
                         max_iter: int = LANCZOS_MAX_ITER) -> Tuple[float, float]:
    """Smallest and largest eigenvalue via Lanczos with full reorthogonalization.

    Residuals are controlled relative to the current spectral-width estimate.
    Small sectors fall back to exact dense diagonalization.
    """
    if H.dim < 2:
        raise ShapeMismatch("extremal eigenvalues need sector dimension >= 2")
    if H.dim <= DENSE_EXTREMES_DIM:
        w = np.linalg.eigvalsh(H.to_dense())
        return float(w[0]), float(w[-1])
    return _lanczos_extremes(H, tol, max_iter)


def full_spectrum(H: HamiltonianOperator, want_vectors: bool = False,
                  cap: int = FULL_SPECTRUM_CAP) -> EigenSystem:
    """Dense diagonalization of the sector Hamiltonian, capped by dimension."""
    if H.dim > cap:
        raise DimensionTooLarge(f"dim {H.dim} exceeds cap {cap}")
    A = H.to_dense()
    if not want_vectors:
        w = scipy.linalg.eigvalsh(A, overwrite_a=True, check_finite=False)
        return EigenSystem(w)
    # evd is faster up to mid sizes; evr needs far less workspace above that
    driver = "evd" if H.dim <= 8000 else "evr"
    w, Q = scipy.linalg.eigh(A, driver=driver, overwrite_a=True, check_finite=False)
    return EigenSystem(w, Q)


GapRatioResult = namedtuple("GapRatioResult", ["values", "n_skipped"])


def gap_ratios(energies) -> GapRatioResult:
    """Adjacent-gap ratios r = min(d, d')/max(d, d') over an ascending spectrum.

    Pairs where both gaps fall below 1e-12 of the spectral width (exact
    degeneracies, 0/0) are excluded and counted.
    """
    E = np.asarray(energies, dtype=np.float64)
    if len(E) < 3:
        raise EmptyInput("need at least 3 energies for gap ratios")
    gaps = np.diff(E)
    width = float(E[-1] - E[0])
    thr = DEGENERACY_RTOL * width
    a, b = gaps[:-1], gaps[1:]
    degenerate = (a < thr) & (b < thr)
    keep = ~degenerate
    hi = np.maximum(a[keep], b[keep])
    lo = np.minimum(a[keep], b[keep])
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(hi > 0, lo / hi, 0.0)
    return GapRatioResult(values=r, n_skipped=int(degenerate.sum()))


def mean_r_in_window(eigs: EigenSystem, window: SpectralWindow) -> Tuple[float, int]:
    """Mean gap ratio over levels whose energy density lies in the window."""
    E = eigs.energies
    eps = energy_density(E, float(E[0]), float(E[-1]))
    sel = np.nonzero((eps >= window.eps_lo) & (eps <= window.eps_hi))[0]
    n_levels = len(sel)
    if n_levels < 10:
        raise InsufficientStatistics(n_levels)
    result = gap_ratios(E[sel[0]: sel[-1] + 1])
    if len(result.values) == 0:
        raise InsufficientStatistics(0)
    return float(np.mean(result.values)), len(result.values)


DosHistogram = namedtuple("DosHistogram", ["centers", "masses", "edges"])


def dos_histogram(values, n_bins: int, range: Optional[Tuple[float, float]] = None) -> DosHistogram:
    """Probability-mass histogram of energies; masses sum to 1."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise EmptyInput("no values to histogram")
    if n_bins < 1:
        raise EmptyInput("n_bins must be >= 1")
    counts, edges = np.histogram(v, bins=n_bins, range=range)
    masses = counts / counts.sum()
    centers = 0.5 * (edges[:-1] + edges[1:])
    return DosHistogram(centers=centers, masses=masses, edges=edges)
