"""Fixed-excitation-number sector enumeration and Fock-state encoding.

States are bit-patterns in a single machine word: bit m holds the occupation
of site m (0-indexed). A sector basis enumerates all patterns with a given
population in ascending integer order, so golden files are stable and index
lookup works by combinatorial ranking.
"""

from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np

from .errors import IndexOutOfRange, InvalidSector, NotInSector

MAX_SITES = 32


def popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class FockState:
    """Occupation bit-pattern over n_sites with a definite excitation count."""

    occupation: int
    n_sites: int
    n_excitations: int

    def __post_init__(self):
        if not 0 <= self.n_excitations <= self.n_sites <= MAX_SITES:
            raise InvalidSector(f"bad counts ({self.n_sites}, {self.n_excitations})")
        if self.occupation >> self.n_sites:
            raise InvalidSector("occupation sets bits above n_sites")
        if popcount(self.occupation) != self.n_excitations:
            raise InvalidSector("popcount does not match n_excitations")

    def occupied_sites(self) -> tuple:
        return tuple(m for m in range(self.n_sites) if (self.occupation >> m) & 1)

    def to_bitstring(self) -> str:
        """Binary string of length n_sites, most-significant site first."""
        return format(self.occupation, f"0{self.n_sites}b")

    @classmethod
    def from_bitstring(cls, s: str) -> "FockState":
        occ = int(s, 2)
        return cls(occ, len(s), popcount(occ))

    @classmethod
    def from_occupied(cls, sites, n_sites: int) -> "FockState":
        occ = 0
        for m in sites:
            occ |= 1 << m
        return cls(occ, n_sites, popcount(occ))


def _snoob(x: int) -> int:
    """Next larger integer with the same number of set bits."""
    lowest = x & -x
    ripple = x + lowest
    ones = x ^ ripple
    ones = (ones >> 2) // lowest
    return ripple | ones


def _enumerate_patterns(n_sites: int, n_excitations: int) -> np.ndarray:
    dim = comb(n_sites, n_excitations)
    out = np.empty(dim, dtype=np.uint64)
    if n_excitations == 0:
        out[0] = 0
        return out
    v = (1 << n_excitations) - 1
    for k in range(dim):
        out[k] = v
        v = _snoob(v)
    return out


class SectorBasis:
    """Ordered basis of all Fock states with fixed excitation count.

    Bidirectional lookup: `state_at` is an array read, `index_of` an O(1)
    two-table combinatorial rank. The split-word rank tables are also what
    the matvec kernel uses to locate hop targets.
    """

    def __init__(self, n_sites: int, n_excitations: int):
        if not 0 <= n_excitations <= n_sites <= MAX_SITES:
            raise InvalidSector(f"bad counts ({n_sites}, {n_excitations})")
        self.n_sites = n_sites
        self.n_excitations = n_excitations
        self.dim = comb(n_sites, n_excitations)
        self.patterns = _enumerate_patterns(n_sites, n_excitations)
        # split-word rank tables: index = high_offset[high] + low_rank[low]
        self.n_low = (n_sites + 1) // 2
        self._build_rank_tables()

    def _build_rank_tables(self):
        n_low = self.n_low
        n_high = self.n_sites - n_low
        low_rank = np.zeros(1 << n_low, dtype=np.int64)
        counters = [0] * (n_low + 1)
        for pattern in range(1 << n_low):
            pc = popcount(pattern)
            low_rank[pattern] = counters[pc]
            counters[pc] += 1
        high_offset = np.full(1 << n_high, -1, dtype=np.int64)
        start = 0
        for pattern in range(1 << n_high):
            need = self.n_excitations - popcount(pattern)
            if 0 <= need <= n_low:
                high_offset[pattern] = start
                start += comb(n_low, need)
        self.low_rank = low_rank
        self.high_offset = high_offset
        self.low_mask = (1 << n_low) - 1

    def __len__(self) -> int:
        return self.dim

    def __iter__(self):
        for p in self.patterns:
            yield FockState(int(p), self.n_sites, self.n_excitations)

    @cached_property
    def states(self) -> tuple:
        return tuple(self)

    def index_of_pattern(self, pattern: int) -> int:
        if pattern >> self.n_sites or popcount(pattern) != self.n_excitations:
            raise NotInSector(f"pattern {pattern:#x} not in sector")
        return int(
            self.high_offset[pattern >> self.n_low] + self.low_rank[pattern & self.low_mask]
        )

    def index_of(self, state: FockState) -> int:
        if state.n_sites != self.n_sites or state.n_excitations != self.n_excitations:
            raise NotInSector("state belongs to a different sector")
        return self.index_of_pattern(state.occupation)

    def state_at(self, k: int) -> FockState:
        if not 0 <= k < self.dim:
            raise IndexOutOfRange(f"index {k} outside [0, {self.dim})")
        return FockState(int(self.patterns[k]), self.n_sites, self.n_excitations)

    def occupation_column(self, m: int) -> np.ndarray:
        """0/1 occupation of site m across the whole basis."""
        return ((self.patterns >> np.uint64(m)) & np.uint64(1)).astype(np.float64)

    def __repr__(self):
        return f"SectorBasis(n_sites={self.n_sites}, n_excitations={self.n_excitations}, dim={self.dim})"


def enumerate_sector(n_sites: int, n_excitations: int) -> SectorBasis:
    """Enumerate the fixed-excitation sector in ascending bit-pattern order."""
    return SectorBasis(n_sites, n_excitations)


def index_of(basis: SectorBasis, state: FockState) -> int:
    return basis.index_of(state)


def state_at(basis: SectorBasis, k: int) -> FockState:
    return basis.state_at(k)
