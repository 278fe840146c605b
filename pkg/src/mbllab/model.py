"""Coupling matrices, disorder realizations, and the sector Hamiltonian.

Units convention: every Hamiltonian parameter is an ordinary frequency
f = omega/2pi in MHz. The propagator turns that into phase at
2pi x 10^-3 rad per (MHz ns); see evolve.PHASE_PER_MHZ_NS.
"""

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np
import scipy.sparse

from . import _kernels
from .basis import FockState, SectorBasis
from .errors import (
    DivisionByZeroDetuning,
    NegativeAmplitude,
    ShapeMismatch,
)

DEFAULT_N_SITES = 19
DEFAULT_NN_COUPLING_MHZ = 2.65
DEFAULT_LONG_RANGE_MHZ = -0.5


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric coupling-frequency matrix J/2pi in MHz, zero diagonal."""

    n_sites: int
    J: np.ndarray

    def __post_init__(self):
        J = np.asarray(self.J, dtype=np.float64)
        if J.shape != (self.n_sites, self.n_sites):
            raise ShapeMismatch(f"J shape {J.shape} vs n_sites {self.n_sites}")
        if not np.allclose(J, J.T, atol=1e-12):
            raise ShapeMismatch("J must be symmetric")
        object.__setattr__(self, "J", J.copy())
        np.fill_diagonal(self.J, 0.0)
        self.J.setflags(write=False)

    def to_json_dict(self) -> dict:
        tri = [float(self.J[m, n]) for m in range(self.n_sites) for n in range(m)]
        return {"n_sites": self.n_sites, "J_mhz": tri}

    @classmethod
    def from_json_dict(cls, d: dict) -> "CouplingMatrix":
        n = int(d["n_sites"])
        J = np.zeros((n, n))
        it = iter(d["J_mhz"])
        for m in range(n):
            for k in range(m):
                J[m, k] = J[k, m] = next(it)
        return cls(n, J)

    def content_key(self) -> str:
        return hashlib.sha1(np.ascontiguousarray(self.J).tobytes()).hexdigest()


@dataclass
class DeviceParameters:
    """Per-site resonator couplings g/2pi and common detuning delta/2pi, MHz."""

    g: np.ndarray
    delta: float
    lam: Optional[np.ndarray] = None
    f0: Optional[np.ndarray] = None
    f1: Optional[np.ndarray] = None

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=np.float64)
        if self.delta != 0 and abs(self.delta) < 10 * np.max(np.abs(self.g)):
            warnings.warn("detuning is not large compared to g; dispersive model suspect")


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of per-site detunings V_m, uniform on [-V, V]."""

    amplitude: float
    values: np.ndarray
    seed: int

    @property
    def n_sites(self) -> int:
        return len(self.values)

    def to_json_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "V_mhz": [float(v) for v in self.values],
            "amplitude_mhz": self.amplitude,
            "seed": int(self.seed),
        }


def load_device_parameters(path=None) -> DeviceParameters:
    """Load the shipped (or a user-supplied) device-parameter JSON file."""
    if path is None:
        text = resources.files("mbllab").joinpath("data/device_params.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    d = json.loads(text)
    return DeviceParameters(
        g=np.asarray(d["g_mhz"], dtype=np.float64),
        delta=float(d["delta_mhz"]),
        f0=np.asarray(d["f0"], dtype=np.float64) if "f0" in d else None,
        f1=np.asarray(d["f1"], dtype=np.float64) if "f1" in d else None,
    )


def coupling_from_device(params: DeviceParameters) -> CouplingMatrix:
    """J[m][n] = lambda[m][n] + g[m] g[n] / delta for m != n."""
    if params.delta == 0:
        raise DivisionByZeroDetuning("delta must be nonzero")
    n = len(params.g)
    J = np.outer(params.g, params.g) / params.delta
    if params.lam is not None:
        lam = np.asarray(params.lam, dtype=np.float64)
        if lam.shape != (n, n):
            raise ShapeMismatch(f"lambda shape {lam.shape} vs n_sites {n}")
        J = J + lam
    np.fill_diagonal(J, 0.0)
    return CouplingMatrix(n, J)


def default_device_couplings(n_sites: int = DEFAULT_N_SITES) -> CouplingMatrix:
    """Stand-in coupling matrix: nearest-neighbor 2.65 MHz, longer range -0.5 MHz."""
    J = np.full((n_sites, n_sites), DEFAULT_LONG_RANGE_MHZ)
    for m in range(n_sites - 1):
        J[m, m + 1] = J[m + 1, m] = DEFAULT_NN_COUPLING_MHZ
    np.fill_diagonal(J, 0.0)
    return CouplingMatrix(n_sites, J)


def sample_disorder(V: float, seed: int, n_sites: int = DEFAULT_N_SITES) -> DisorderRealization:
    """Draw per-site detunings independently uniform on [-V, V]."""
    if V < 0:
        raise NegativeAmplitude(f"V = {V} MHz")
    rng = np.random.default_rng(seed)
    values = rng.uniform(-V, V, n_sites) if V > 0 else np.zeros(n_sites)
    values.setflags(write=False)
    return DisorderRealization(amplitude=float(V), values=values, seed=int(seed))


def _hop_structure(basis: SectorBasis):
    """Target-index and pair-code tables for the basis, built once and cached."""
    cached = basis.__dict__.get("_hop_structure")
    if cached is not None:
        return cached
    n1 = basis.n_excitations
    n0 = basis.n_sites - n1
    conn = n1 * n0
    nbr_idx = np.empty((basis.dim, conn), dtype=np.int32)
    nbr_pair = np.empty((basis.dim, conn), dtype=np.uint16)
    if conn:
        _kernels.build_hop_structure(
            basis.patterns,
            basis.n_sites,
            np.uint64(basis.n_low),
            np.uint64(basis.low_mask),
            basis.low_rank,
            basis.high_offset,
            nbr_idx,
            nbr_pair,
        )
    basis.__dict__["_hop_structure"] = (nbr_idx, nbr_pair)
    return nbr_idx, nbr_pair


def _hop_values(basis: SectorBasis, couplings: CouplingMatrix) -> np.ndarray:
    """Coupling value per hop-table column, cached per coupling content."""
    key = couplings.content_key()
    cache = basis.__dict__.setdefault("_hop_values", {})
    if key not in cache:
        _, nbr_pair = _hop_structure(basis)
        cache.clear()  # one coupling matrix at a time is the realistic pattern
        cache[key] = couplings.J.ravel()[nbr_pair]
    return cache[key]


class HamiltonianOperator:
    """Sector-restricted Hamiltonian, applied matrix-free.

    Immutable after construction; `apply` is reentrant and writes only to
    the output buffer, so distinct workers may share one instance.
    """

    def __init__(self, basis: SectorBasis, couplings: CouplingMatrix,
                 disorder: DisorderRealization):
        if couplings.n_sites != basis.n_sites:
            raise ShapeMismatch("couplings built for a different site count")
        if disorder.n_sites != basis.n_sites:
            raise ShapeMismatch("disorder built for a different site count")
        self.basis = basis
        self.couplings = couplings
        self.disorder = disorder
        diag = np.zeros(basis.dim)
        for m in range(basis.n_sites):
            if disorder.values[m] != 0.0:
                diag += disorder.values[m] * basis.occupation_column(m)
        self.diagonal = diag
        self.diagonal.setflags(write=False)
        self._nbr_idx, _ = _hop_structure(basis)
        self._vals = _hop_values(basis, couplings)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def apply(self, psi: np.ndarray, out: Optional[np.ndarray] = None) -> np.ndarray:
        if psi.shape != (self.dim,):
            raise ShapeMismatch(f"psi shape {psi.shape} vs dim {self.dim}")
        if out is None:
            out = np.empty(self.dim, dtype=np.complex128 if np.iscomplexobj(psi) else np.float64)
        if np.iscomplexobj(psi):
            _kernels.matvec(self.diagonal, self._vals, self._nbr_idx,
                            np.ascontiguousarray(psi, dtype=np.complex128), out)
        else:
            _kernels.matvec_real(self.diagonal, self._vals, self._nbr_idx,
                                 np.ascontiguousarray(psi, dtype=np.float64), out)
        return out

    def expectation(self, psi: np.ndarray) -> float:
        return float(np.real(np.vdot(psi, self.apply(psi))))

    def to_sparse(self) -> scipy.sparse.csr_matrix:
        """Materialized sparse matrix, assembled by an independent route.

        Built from per-pair masks and binary search on the pattern array,
        sharing no code with the hop-table kernel; serves as the oracle in
        equivalence tests.
        """
        basis = self.basis
        patterns = basis.patterns
        rows, cols, data = [], [], []
        one = np.uint64(1)
        for m in range(basis.n_sites):
            bm = one << np.uint64(m)
            occ_m = (patterns & bm) != 0
            for n in range(basis.n_sites):
                if n == m or self.couplings.J[m, n] == 0.0:
                    continue
                bn = one << np.uint64(n)
                mask = occ_m & ((patterns & bn) == 0)
                if not mask.any():
                    continue
                targets = (patterns[mask] ^ bm) | bn
                r = np.nonzero(mask)[0]
                c = np.searchsorted(patterns, targets)
                rows.append(r)
                cols.append(c)
                data.append(np.full(len(r), self.couplings.J[m, n]))
        if rows:
            rows = np.concatenate(rows)
            cols = np.concatenate(cols)
            data = np.concatenate(data)
        mat = scipy.sparse.coo_matrix((data, (rows, cols)), shape=(self.dim, self.dim))
        mat = mat.tocsr()
        mat += scipy.sparse.diags(self.diagonal)
        return mat.tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def __repr__(self):
        return (f"HamiltonianOperator(dim={self.dim}, V={self.disorder.amplitude} MHz, "
                f"seed={self.disorder.seed})")


def build_hamiltonian(basis: SectorBasis, J: CouplingMatrix,
                      disorder: DisorderRealization) -> HamiltonianOperator:
    """Assemble the sector Hamiltonian: hop couplings plus diagonal disorder."""
    return HamiltonianOperator(basis, J, disorder)


def apply(H: HamiltonianOperator, psi: np.ndarray) -> np.ndarray:
    return H.apply(psi)


def diagonal_energy(state: FockState, disorder: DisorderRealization) -> float:
    """Sum of V_m over occupied sites."""
    if state.n_sites != disorder.n_sites:
        raise ShapeMismatch("state and disorder site counts differ")
    return float(sum(disorder.values[m] for m in state.occupied_sites()))


def all_diagonal_energies(basis: SectorBasis, disorder: DisorderRealization) -> np.ndarray:
    """Diagonal energies of every basis state, vectorized per site."""
    if disorder.n_sites != basis.n_sites:
        raise ShapeMismatch("disorder built for a different site count")
    diag = np.zeros(basis.dim)
    for m in range(basis.n_sites):
        if disorder.values[m] != 0.0:
            diag += disorder.values[m] * basis.occupation_column(m)
    return diag
