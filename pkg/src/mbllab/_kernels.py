"""Numba kernels for the sector-restricted matvec.

The hop structure of a fixed-excitation sector is dense in a useful sense:
every basis state has exactly n1*n0 occupied-empty site pairs, so targets
and coupling values live in rectangular (dim, n1*n0) arrays and the matvec
is a pure gather with unit-stride streaming over the precomputed tables.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def build_hop_structure(patterns, n_sites, n_low, low_mask, low_rank, high_offset,
                        nbr_idx, nbr_pair):
    """Fill target indices and (m, n) pair codes for every basis state.

    Pair code is m * n_sites + n, an index into the flattened coupling
    matrix. Column order is fixed by the (m ascending, n ascending) scan,
    the same for every row.
    """
    dim = patterns.shape[0]
    for k in range(dim):
        p = patterns[k]
        c = 0
        for m in range(n_sites):
            if (p >> m) & np.uint64(1):
                pm = p ^ (np.uint64(1) << np.uint64(m))
                for n in range(n_sites):
                    if not (p >> n) & np.uint64(1):
                        t = pm | (np.uint64(1) << np.uint64(n))
                        j = high_offset[t >> n_low] + low_rank[t & low_mask]
                        nbr_idx[k, c] = j
                        nbr_pair[k, c] = m * n_sites + n
                        c += 1


@njit(cache=True, fastmath=True)
def matvec(diag, vals, nbr_idx, psi, out):
    """out = H psi with H = diag + hop table (gather form)."""
    dim, conn = nbr_idx.shape
    for k in range(dim):
        acc = diag[k] * psi[k]
        for c in range(conn):
            acc = acc + vals[k, c] * psi[nbr_idx[k, c]]
        out[k] = acc


@njit(cache=True, fastmath=True)
def matvec_real(diag, vals, nbr_idx, psi, out):
    """Real-vector variant, used by the eigensolver iteration."""
    dim, conn = nbr_idx.shape
    for k in range(dim):
        acc = diag[k] * psi[k]
        for c in range(conn):
            acc = acc + vals[k, c] * psi[nbr_idx[k, c]]
        out[k] = acc
