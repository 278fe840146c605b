"""Diagnostics on states and probability vectors: generalized imbalance,
occupations, participation ratio, Fisher information, and the shot-sampling
plus post-selection readout model."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .basis import FockState, SectorBasis
from .errors import (
    AllShotsRejected,
    DimensionTooLarge,
    EmptyInput,
    ShapeMismatch,
)

SHOT_MODEL_MAX_SITES = 24  # full 2^N correction vector must stay in memory


@dataclass(frozen=True)
class ImbalancePattern:
    """Per-site weights beta_m = 1/N1 on initially occupied sites, -1/N0 on
    initially empty ones; scores its defining Fock state exactly 1."""

    beta: np.ndarray
    n_sites: int
    source_occupation: int

    @classmethod
    def from_fock(cls, state: FockState) -> "ImbalancePattern":
        n1 = state.n_excitations
        n0 = state.n_sites - n1
        if n1 == 0 or n0 == 0:
            raise ShapeMismatch("pattern needs both occupied and empty sites")
        beta = np.empty(state.n_sites)
        for m in range(state.n_sites):
            beta[m] = 1.0 / n1 if (state.occupation >> m) & 1 else -1.0 / n0
        beta.setflags(write=False)
        return cls(beta=beta, n_sites=state.n_sites, source_occupation=state.occupation)

    def eigenvalues(self, basis: SectorBasis) -> np.ndarray:
        """Value of the imbalance on every basis state (diagonal operator)."""
        if basis.n_sites != self.n_sites:
            raise ShapeMismatch("pattern and basis site counts differ")
        vals = np.zeros(basis.dim)
        for m in range(self.n_sites):
            vals += self.beta[m] * basis.occupation_column(m)
        return vals


def occupations(psi: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """Per-site occupation probabilities <n_m> of a sector state."""
    if psi.shape != (basis.dim,):
        raise ShapeMismatch(f"psi shape {psi.shape} vs dim {basis.dim}")
    p = np.abs(psi) ** 2
    out = np.empty(basis.n_sites)
    for m in range(basis.n_sites):
        out[m] = basis.occupation_column(m) @ p
    return out


def generalized_imbalance(psi: np.ndarray, pattern: ImbalancePattern,
                          basis: SectorBasis) -> float:
    """I_gen = sum_m beta_m <n_m>."""
    if pattern.n_sites != basis.n_sites:
        raise ShapeMismatch("pattern and basis site counts differ")
    return float(pattern.beta @ occupations(psi, basis))


def fock_probabilities(psi: np.ndarray) -> np.ndarray:
    """p_n = |<n|psi>|^2."""
    return np.abs(psi) ** 2


def participation_ratio(p: np.ndarray) -> float:
    """PR = 1 / sum p_n^2; counts effectively occupied basis states."""
    p = np.asarray(p, dtype=np.float64)
    s = float(p @ p)
    if s == 0.0:
        raise EmptyInput("all-zero probability vector")
    return 1.0 / s


def fisher_information(p: np.ndarray, pattern: ImbalancePattern, basis: SectorBasis,
                       factor4: bool = False) -> float:
    """Variance of the imbalance operator under p (diagonal in the Fock basis).

    The factor4 flag switches to the conventional pure-state metrological
    normalization, 4 x variance.
    """
    vals = pattern.eigenvalues(basis)
    if p.shape != vals.shape:
        raise ShapeMismatch(f"p shape {p.shape} vs dim {basis.dim}")
    m1 = float(vals @ p)
    m2 = float((vals * vals) @ p)
    var = max(m2 - m1 * m1, 0.0)
    return 4.0 * var if factor4 else var


@dataclass
class ShotModel:
    """Finite sampling with optional per-site readout errors.

    F0[m] (F1[m]) is the probability of reading 0 (1) when site m holds
    0 (1). When fidelities are present, raw counts are corrected by the
    inverse tensor-product confusion matrix before any post-selection.
    """

    n_shots: int
    f0: Optional[np.ndarray] = None
    f1: Optional[np.ndarray] = None
    post_select: bool = True

    def __post_init__(self):
        if self.n_shots < 1:
            raise EmptyInput("n_shots must be >= 1")
        if (self.f0 is None) != (self.f1 is None):
            raise ShapeMismatch("give both fidelity arrays or neither")
        for f in (self.f0, self.f1):
            if f is not None:
                f = np.asarray(f, dtype=np.float64)
                if np.any(f <= 0.5) or np.any(f > 1.0):
                    raise ShapeMismatch("fidelities must lie in (0.5, 1]")

    @property
    def has_readout_errors(self) -> bool:
        return self.f0 is not None


def _apply_inverse_confusion(q: np.ndarray, n_sites: int, f0: np.ndarray,
                             f1: np.ndarray) -> np.ndarray:
    """Invert the per-site 2x2 confusion matrix along each bit axis."""
    for m in range(n_sites):
        d = f0[m] + f1[m] - 1.0
        block = q.reshape(-1, 2, 1 << m)
        q0 = block[:, 0, :].copy()
        q1 = block[:, 1, :].copy()
        block[:, 0, :] = (f1[m] * q0 - (1.0 - f1[m]) * q1) / d
        block[:, 1, :] = (f0[m] * q1 - (1.0 - f0[m]) * q0) / d
    return q


def sample_and_postselect(p: np.ndarray, model: ShotModel, seed: int,
                          basis: SectorBasis) -> np.ndarray:
    """Simulate finite-shot readout of a sector distribution.

    Draws n_shots bitstrings, flips each bit with its error probability when
    fidelities are given, applies the inverse confusion-matrix correction
    (clipping negatives and renormalizing), and either post-selects back
    onto the sector (returning a sector-length vector) or returns the full
    2^N distribution including leakage.
    """
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (basis.dim,):
        raise ShapeMismatch(f"p shape {p.shape} vs dim {basis.dim}")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(model.n_shots, p / p.sum())

    if not model.has_readout_errors:
        # ideal channel: every shot stays in the sector
        return counts / counts.sum()

    if basis.n_sites > SHOT_MODEL_MAX_SITES:
        raise DimensionTooLarge(
            f"readout correction needs a 2^{basis.n_sites} vector; cap is "
            f"2^{SHOT_MODEL_MAX_SITES}")
    f0 = np.asarray(model.f0, dtype=np.float64)
    f1 = np.asarray(model.f1, dtype=np.float64)
    if len(f0) != basis.n_sites or len(f1) != basis.n_sites:
        raise ShapeMismatch("fidelity arrays must match n_sites")

    shots = np.repeat(basis.patterns, counts)
    for m in range(basis.n_sites):
        bit = (shots >> np.uint64(m)) & np.uint64(1)
        err = np.where(bit == 1, 1.0 - f1[m], 1.0 - f0[m])
        flip = rng.random(len(shots)) < err
        shots = shots ^ (flip.astype(np.uint64) << np.uint64(m))

    q = np.zeros(1 << basis.n_sites)
    observed, obs_counts = np.unique(shots, return_counts=True)
    q[observed.astype(np.int64)] = obs_counts / model.n_shots

    q = _apply_inverse_confusion(q.reshape(-1), basis.n_sites, f0, f1)
    np.clip(q, 0.0, None, out=q)
    total = q.sum()
    if total <= 0.0:
        raise AllShotsRejected("corrected distribution has no mass")
    q /= total

    if not model.post_select:
        return q
    sector = q[basis.patterns.astype(np.int64)]
    mass = sector.sum()
    if mass <= 0.0:
        raise AllShotsRejected("no corrected mass inside the sector")
    return sector / mass
