"""Energy-resolved localization laboratory for disordered XY chains.

Exact-diagonalization and Krylov machinery for a fixed-excitation sector of
up to 32 two-level sites, plus the diagnostic suite (generalized imbalance,
gap-ratio statistics, participation ratio, Fisher information, diagonal
ensemble, power-law exponents, finite-size scans) and a sweep orchestrator.
"""

from .basis import FockState, SectorBasis, enumerate_sector, index_of, state_at
from .model import (
    CouplingMatrix,
    DeviceParameters,
    DisorderRealization,
    HamiltonianOperator,
    all_diagonal_energies,
    apply,
    build_hamiltonian,
    coupling_from_device,
    default_device_couplings,
    diagonal_energy,
    load_device_parameters,
    sample_disorder,
)
from .spectrum import (
    EigenSystem,
    SpectralWindow,
    MIDDLE_HALF,
    GOE_MEAN_R,
    POISSON_MEAN_R,
    dos_histogram,
    energy_density,
    extremal_eigenvalues,
    full_spectrum,
    gap_ratios,
    mean_r_in_window,
)
from .prepare import (
    Ensemble,
    QuenchInstance,
    build_ensemble,
    realization_seed,
    select_initial_state,
)
from .evolve import (
    DEFAULT_SCHEDULE,
    PHASE_PER_MHZ_NS,
    Trajectory,
    evolve_dense,
    evolve_krylov,
)
from .observables import (
    ImbalancePattern,
    ShotModel,
    fisher_information,
    fock_probabilities,
    generalized_imbalance,
    occupations,
    participation_ratio,
    sample_and_postselect,
)
from .analysis import (
    AveragedSeries,
    FiniteSizeRow,
    PowerLawFit,
    Series,
    VcEstimate,
    default_fit_window,
    diagonal_ensemble,
    diagonal_ensemble_values,
    disorder_average,
    estimate_vc,
    finite_size_series,
    fit_power_law,
)
from . import errors

__version__ = "0.1.0"
