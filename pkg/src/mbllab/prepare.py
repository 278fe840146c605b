"""Initial-state selection: pick the Fock state whose diagonal energy hits a
target energy density for a given disorder realization."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .basis import FockState, SectorBasis
from .errors import DegenerateSpectrum, TargetEnergyUnreachable
from .model import (
    CouplingMatrix,
    DisorderRealization,
    all_diagonal_energies,
    build_hamiltonian,
    sample_disorder,
)
from .spectrum import extremal_eigenvalues

DEFAULT_SELECT_TOL = 0.025  # half the eps mesh spacing


@dataclass(frozen=True)
class QuenchInstance:
    """A prepared quench: disorder draw, initial Fock state, and its position
    in the energy spectrum."""

    disorder: DisorderRealization
    initial_state: FockState
    E: float
    eps_target: float
    eps_achieved: float
    E_min: float
    E_max: float
    tol: float

    def to_json_dict(self) -> dict:
        return {
            "seed": int(self.disorder.seed),
            "V_mhz": self.disorder.amplitude,
            "eps_target": self.eps_target,
            "eps_achieved": self.eps_achieved,
            "initial_state": self.initial_state.to_bitstring(),
            "E_mhz": self.E,
            "E_min_mhz": self.E_min,
            "E_max_mhz": self.E_max,
        }


def realization_seed(master_seed: int, eps_index: int, v_index: int, k: int) -> int:
    """Derived 64-bit seed for one sweep cell; any cell reproducible alone."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(eps_index, v_index, k))
    return int(ss.generate_state(1, np.uint64)[0])


def select_initial_state(basis: SectorBasis, disorder: DisorderRealization,
                         E_min: float, E_max: float, eps_target: float,
                         tol: float = DEFAULT_SELECT_TOL) -> QuenchInstance:
    """Exhaustive scan of all sector diagonal energies for the best match.

    Returns the Fock state whose achieved energy density is closest to the
    target; ties break to the lowest basis index. Raises when nothing lands
    within the tolerance, which is expected near spectrum edges at small V.
    """
    if not 0.0 <= eps_target <= 1.0:
        raise ValueError(f"eps_target {eps_target} outside [0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    width = E_max - E_min
    if width <= 0:
        raise DegenerateSpectrum("E_max must exceed E_min")
    energies = all_diagonal_energies(basis, disorder)
    eps = (energies - E_min) / width
    gaps = np.abs(eps - eps_target)
    best = int(np.argmin(gaps))
    best_gap = float(gaps[best])
    if best_gap > tol:
        raise TargetEnergyUnreachable(best_gap)
    return QuenchInstance(
        disorder=disorder,
        initial_state=basis.state_at(best),
        E=float(energies[best]),
        eps_target=float(eps_target),
        eps_achieved=float(eps[best]),
        E_min=float(E_min),
        E_max=float(E_max),
        tol=float(tol),
    )


@dataclass
class EnsembleGap:
    """Marker for an (eps, V, k) cell with no reachable initial state."""

    eps_index: int
    v_index: int
    k: int
    seed: int
    best_gap: float


@dataclass
class Ensemble:
    instances: List[QuenchInstance]
    gaps: List[EnsembleGap]


def build_ensemble(basis: SectorBasis, J: CouplingMatrix, eps_grid: Sequence[float],
                   V_grid: Sequence[float], k: int, master_seed: int,
                   tol: float = DEFAULT_SELECT_TOL,
                   extremes_tol: float = 1e-10) -> Ensemble:
    """Prepare up to k quench instances per (eps, V) cell with fresh seeds.

    Unreachable cells become gap records, never errors.
    """
    if len(eps_grid) == 0 or len(V_grid) == 0:
        raise ValueError("grids must be non-empty")
    if k < 1:
        raise ValueError("k must be >= 1")
    instances: List[QuenchInstance] = []
    gaps: List[EnsembleGap] = []
    for vi, V in enumerate(V_grid):
        for ei, eps_target in enumerate(eps_grid):
            for kk in range(k):
                seed = realization_seed(master_seed, ei, vi, kk)
                disorder = sample_disorder(V, seed, basis.n_sites)
                H = build_hamiltonian(basis, J, disorder)
                E_min, E_max = extremal_eigenvalues(H, tol=extremes_tol)
                try:
                    inst = select_initial_state(basis, disorder, E_min, E_max,
                                                eps_target, tol)
                except TargetEnergyUnreachable as exc:
                    gaps.append(EnsembleGap(ei, vi, kk, seed, exc.best_gap))
                    continue
                instances.append(inst)
    return Ensemble(instances=instances, gaps=gaps)
