"""Unitary propagation |psi_t> = exp(-iHt)|psi_0> by Krylov projection.

Frequencies are ordinary (MHz), times are ns, so one (MHz ns) unit advances
the phase by 2pi x 10^-3 rad. A dense eigendecomposition propagator serves
as the oracle at small dimensions.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np
import scipy.linalg

from .errors import DimensionTooLarge, PropagationFailure, ShapeMismatch
from .model import HamiltonianOperator

PHASE_PER_MHZ_NS = 2.0 * np.pi * 1e-3

DEFAULT_KRYLOV_DIM = 30
DEFAULT_TOL = 1e-10
DENSE_CAP = 2000

# t in {0, 20, ..., 1500} ns: sub-samples the shortest tunneling time about 3x
DEFAULT_SCHEDULE = np.arange(0.0, 1520.0, 20.0)


@dataclass
class Trajectory:
    """Sampled time evolution: norms, energies, and on-the-fly observables."""

    times: np.ndarray
    norm: np.ndarray
    energy_mhz: np.ndarray
    observables: Dict[str, np.ndarray] = field(default_factory=dict)
    states: Optional[np.ndarray] = None
    renorm_drift: float = 0.0
    n_steps: int = 0

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energy_mhz - self.energy_mhz[0])))


def _check_schedule(schedule: np.ndarray):
    if len(schedule) == 0 or schedule[0] != 0.0:
        raise ShapeMismatch("schedule must start at t = 0")
    if np.any(np.diff(schedule) <= 0):
        raise ShapeMismatch("schedule times must be strictly ascending")


def _lanczos_factorization(H: HamiltonianOperator, psi: np.ndarray, m: int,
                           V: np.ndarray, w: np.ndarray):
    """m-step Lanczos of the real symmetric H from complex start vector psi.

    V and w are caller-owned workspaces reused across steps. Returns
    (V, alpha, beta, m_used, invariant) with beta[j] the coupling from v_j
    to v_{j+1}; invariant means the Krylov space closed early and the small
    problem is exact.
    """
    m = min(m, len(psi))
    alpha = np.zeros(m)
    beta = np.zeros(m)
    V[:, 0] = psi
    for j in range(m):
        H.apply(V[:, j], w)
        a = np.real(np.vdot(V[:, j], w))
        alpha[j] = a
        w -= a * V[:, j]
        if j > 0:
            w -= beta[j - 1] * V[:, j - 1]
        h = V[:, : j + 1].conj().T @ w
        w -= V[:, : j + 1] @ h
        nw = np.linalg.norm(w)
        if nw < 0.5 * np.linalg.norm(h):
            h2 = V[:, : j + 1].conj().T @ w
            w -= V[:, : j + 1] @ h2
            nw = np.linalg.norm(w)
        beta[j] = nw
        if nw < 1e-13 * max(1.0, np.max(np.abs(alpha[: j + 1]))):
            return V[:, : j + 1], alpha[: j + 1], beta[: j + 1], j + 1, True
        if j + 1 < m:
            V[:, j + 1] = w / nw
    return V[:, :m], alpha, beta, m, False


def _small_propagator(alpha: np.ndarray, beta: np.ndarray):
    """Eigendecomposition of the tridiagonal projection; returns y(tau) closure."""
    m = len(alpha)
    if m == 1:
        theta = alpha.copy()
        Q = np.ones((1, 1))
    else:
        theta, Q = scipy.linalg.eigh_tridiagonal(alpha, beta[: m - 1])
    qe1 = Q[0, :]

    def y_of(tau: float) -> np.ndarray:
        phases = np.exp(-1j * PHASE_PER_MHZ_NS * theta * tau)
        return Q @ (phases * qe1)

    return y_of


def evolve_krylov(H: HamiltonianOperator, psi0: np.ndarray, schedule=DEFAULT_SCHEDULE,
                  krylov_dim: int = DEFAULT_KRYLOV_DIM, tol: float = DEFAULT_TOL,
                  observer: Optional[Callable[[np.ndarray], Dict[str, float]]] = None,
                  store_states: bool = False) -> Trajectory:
    """Propagate psi0 over the schedule with adaptive Krylov sub-stepping.

    A sub-step is accepted when the standard residual estimate (next
    off-diagonal coupling times the last component of the small-matrix
    exponential) stays within the share of `tol` proportional to the step
    length, so the whole trajectory meets `tol`. Sample times falling inside
    an accepted step are evaluated from the same factorization. The marching
    state is renormalized each step and the total drift is recorded.
    """
    schedule = np.asarray(schedule, dtype=np.float64)
    _check_schedule(schedule)
    if psi0.shape != (H.dim,):
        raise ShapeMismatch(f"psi0 shape {psi0.shape} vs dim {H.dim}")
    if krylov_dim < 2:
        raise ShapeMismatch("krylov_dim must be >= 2")
    nrm0 = np.linalg.norm(psi0)
    if abs(nrm0 - 1.0) > 1e-9:
        raise ShapeMismatch(f"psi0 not normalized, |psi0| = {nrm0}")

    n_samples = len(schedule)
    norms = np.zeros(n_samples)
    energies = np.zeros(n_samples)
    obs_rows = [None] * n_samples
    states = np.zeros((n_samples, H.dim), dtype=np.complex128) if store_states else None

    def emit(i: int, psi: np.ndarray):
        nrm = np.linalg.norm(psi)
        norms[i] = nrm
        u = psi / nrm
        energies[i] = H.expectation(u)
        if observer is not None:
            obs_rows[i] = observer(u)
        if states is not None:
            states[i] = u

    psi = psi0.astype(np.complex128) / nrm0
    emit(0, psi)
    t_total = float(schedule[-1])
    if t_total == 0.0:
        return _package(schedule, norms, energies, obs_rows, states, 0.0, 0)

    t_cur = 0.0
    next_i = 1
    drift = 0.0
    n_steps = 0
    tau = t_total / max(4.0, t_total / 10.0)  # opening guess, refined adaptively
    tau_min = max(t_total * 1e-12, 1e-9)
    V_work = np.empty((H.dim, min(krylov_dim, H.dim)), dtype=np.complex128, order="F")
    w_work = np.empty(H.dim, dtype=np.complex128)
    while next_i < n_samples:
        V, alpha, beta, m, invariant = _lanczos_factorization(
            H, psi, krylov_dim, V_work, w_work)
        y_of = _small_propagator(alpha, beta)
        remaining = t_total - t_cur
        if invariant:
            step = remaining
            est = 0.0
        else:
            step = min(tau, remaining)
            while True:
                y = y_of(step)
                # first-order residual: next coupling (as phase per step) times
                # the last component of the small-matrix exponential
                est = PHASE_PER_MHZ_NS * step * beta[m - 1] * abs(y[-1])
                # proportional error budget with a machine-precision floor
                allow = max(tol * step / t_total, 1e-14)
                if est <= allow:
                    break
                shrink = max(0.2, 0.7 * (allow / max(est, 1e-300)) ** (1.0 / m))
                step *= shrink
                if step < tau_min:
                    raise PropagationFailure(t_cur, est)
        # emit any sample times inside the accepted step from this factorization
        while next_i < n_samples and schedule[next_i] <= t_cur + step + 1e-9:
            dt_i = schedule[next_i] - t_cur
            u = V @ y_of(dt_i)
            emit(next_i, u)
            next_i += 1
        psi = V @ y_of(step)
        nrm = np.linalg.norm(psi)
        drift += abs(1.0 - nrm)
        psi /= nrm
        t_cur += step
        n_steps += 1
        if not invariant:
            if est <= 0.05 * allow:
                # far under budget (often noise-floor limited): push harder
                tau = step * 2.0
            else:
                grow = (allow / est) ** (1.0 / m)
                tau = step * min(2.0, max(0.5, 0.9 * grow))
    return _package(schedule, norms, energies, obs_rows, states, drift, n_steps)


def _package(schedule, norms, energies, obs_rows, states, drift, n_steps) -> Trajectory:
    observables: Dict[str, np.ndarray] = {}
    if obs_rows[0] is not None:
        keys = obs_rows[0].keys()
        for key in keys:
            observables[key] = np.array([row[key] for row in obs_rows])
    return Trajectory(
        times=schedule.copy(),
        norm=norms,
        energy_mhz=energies,
        observables=observables,
        states=states,
        renorm_drift=drift,
        n_steps=n_steps,
    )


def evolve_dense(H: HamiltonianOperator, psi0: np.ndarray, t: float,
                 cap: int = DENSE_CAP) -> np.ndarray:
    """Exact propagation by full eigendecomposition (oracle path)."""
    if H.dim > cap:
        raise DimensionTooLarge(f"dim {H.dim} exceeds dense cap {cap}")
    if psi0.shape != (H.dim,):
        raise ShapeMismatch(f"psi0 shape {psi0.shape} vs dim {H.dim}")
    cached = getattr(H, "_dense_eig", None)
    if cached is None:
        w, Q = scipy.linalg.eigh(H.to_dense())
        cached = (w, Q)
        H._dense_eig = cached
    w, Q = cached
    c = Q.T @ psi0
    return Q @ (np.exp(-1j * PHASE_PER_MHZ_NS * w * t) * c)
