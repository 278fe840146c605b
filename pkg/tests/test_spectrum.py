import numpy as np
import pytest

from mbllab import (
    CouplingMatrix,
    build_hamiltonian,
    default_device_couplings,
    dos_histogram,
    energy_density,
    enumerate_sector,
    extremal_eigenvalues,
    full_spectrum,
    gap_ratios,
    mean_r_in_window,
    sample_disorder,
)
from mbllab.errors import (
    DegenerateSpectrum,
    DimensionTooLarge,
    EmptyInput,
    InsufficientStatistics,
    ShapeMismatch,
)
from mbllab.spectrum import (
    GOE_MEAN_R,
    MIDDLE_HALF,
    POISSON_MEAN_R,
    EigenSystem,
    SpectralWindow,
)

from conftest import random_instance


def test_two_site_closed_form():
    basis = enumerate_sector(2, 1)
    J = CouplingMatrix(2, np.array([[0.0, 2.0], [2.0, 0.0]]))
    disorder = sample_disorder(10.0, 7, 2)
    v1, v2 = disorder.values
    H = build_hamiltonian(basis, J, disorder)
    avg = (v1 + v2) / 2
    split = np.hypot((v1 - v2) / 2, 2.0)
    lo, hi = extremal_eigenvalues(H)
    assert lo == pytest.approx(avg - split, abs=1e-10)
    assert hi == pytest.approx(avg + split, abs=1e-10)
    eigs = full_spectrum(H)
    assert np.allclose(eigs.energies, [avg - split, avg + split], atol=1e-10)


def test_extremes_match_dense(basis84):
    for seed, V in ((0, 4.0), (1, 16.0), (2, 50.0)):
        J, disorder = random_instance(basis84, V=V, seed=seed)
        H = build_hamiltonian(basis84, J, disorder)
        w = np.linalg.eigvalsh(H.to_dense())
        lo, hi = extremal_eigenvalues(H)
        width = w[-1] - w[0]
        assert abs(lo - w[0]) < 1e-8 * width
        assert abs(hi - w[-1]) < 1e-8 * width


def test_extremes_lanczos_path():
    basis = enumerate_sector(12, 6)  # dim 924, above the dense cutoff
    J, disorder = random_instance(basis, V=16.0, seed=3)
    H = build_hamiltonian(basis, J, disorder)
    w = np.linalg.eigvalsh(H.to_dense())
    lo, hi = extremal_eigenvalues(H)
    width = w[-1] - w[0]
    assert abs(lo - w[0]) < 1e-8 * width
    assert abs(hi - w[-1]) < 1e-8 * width


def test_extremes_clean_limit():
    # V = 0 keeps only the coupling part; degenerate-prone edges
    basis = enumerate_sector(14, 7)
    J = default_device_couplings(14)
    H = build_hamiltonian(basis, J, sample_disorder(0.0, 0, 14))
    w = np.linalg.eigvalsh(H.to_dense())
    lo, hi = extremal_eigenvalues(H)
    width = w[-1] - w[0]
    assert abs(lo - w[0]) < 1e-8 * width
    assert abs(hi - w[-1]) < 1e-8 * width


def test_extremes_shift_covariance(basis84):
    J, disorder = random_instance(basis84, V=16.0, seed=9)
    H = build_hamiltonian(basis84, J, disorder)
    lo, hi = extremal_eigenvalues(H)
    from mbllab.model import DisorderRealization
    shifted = DisorderRealization(amplitude=disorder.amplitude,
                                  values=disorder.values + 2.0,
                                  seed=disorder.seed)
    H2 = build_hamiltonian(basis84, J, shifted)
    lo2, hi2 = extremal_eigenvalues(H2)
    # every sector state holds exactly 4 excitations: diagonal shifts by 8
    assert lo2 - lo == pytest.approx(8.0, abs=1e-7)
    assert hi2 - hi == pytest.approx(8.0, abs=1e-7)


def test_extremes_tiny_dim():
    basis = enumerate_sector(2, 2)  # dim 1
    H = build_hamiltonian(basis, CouplingMatrix(2, np.zeros((2, 2))),
                          sample_disorder(1.0, 0, 2))
    with pytest.raises(ShapeMismatch):
        extremal_eigenvalues(H)


def test_energy_density():
    assert energy_density(-5.0, -5.0, 3.0) == 0.0
    assert energy_density(-1.0, -5.0, 3.0) == 0.5
    assert energy_density(3.0, -5.0, 3.0) == 1.0
    with pytest.raises(DegenerateSpectrum):
        energy_density(0.0, 1.0, 1.0)


def test_full_spectrum_diagonal_case(basis84):
    J0 = CouplingMatrix(8, np.zeros((8, 8)))
    disorder = sample_disorder(16.0, 13, 8)
    H = build_hamiltonian(basis84, J0, disorder)
    from mbllab import all_diagonal_energies
    expected = np.sort(all_diagonal_energies(basis84, disorder))
    eigs = full_spectrum(H)
    assert np.allclose(eigs.energies, expected, atol=1e-12)


def test_full_spectrum_trace_identity(basis84):
    J, disorder = random_instance(basis84, seed=4)
    H = build_hamiltonian(basis84, J, disorder)
    eigs = full_spectrum(H)
    from mbllab import all_diagonal_energies
    trace = all_diagonal_energies(basis84, disorder).sum()
    assert eigs.energies.sum() == pytest.approx(trace, abs=1e-10 * max(1, abs(trace)))


def test_full_spectrum_reconstruction(basis84):
    J, disorder = random_instance(basis84, V=16.0, seed=6)
    H = build_hamiltonian(basis84, J, disorder)
    eigs = full_spectrum(H, want_vectors=True)
    dense = H.to_dense()
    recon = (eigs.vectors * eigs.energies) @ eigs.vectors.T
    scale = np.linalg.norm(dense)
    assert np.linalg.norm(dense - recon) < 1e-9 * scale
    gram = eigs.vectors.T @ eigs.vectors
    assert np.max(np.abs(gram - np.eye(basis84.dim))) < 1e-10


def test_full_spectrum_cap():
    basis = enumerate_sector(14, 7)
    J, disorder = random_instance(basis, seed=1)
    H = build_hamiltonian(basis, J, disorder)
    with pytest.raises(DimensionTooLarge):
        full_spectrum(H, cap=3000)


def test_gap_ratios_examples():
    r = gap_ratios(np.array([0.0, 1.0, 3.0]))
    assert np.allclose(r.values, [0.5])
    assert r.n_skipped == 0
    r = gap_ratios(np.arange(10.0))
    assert np.allclose(r.values, np.ones(8))
    assert np.all((r.values >= 0) & (r.values <= 1))


def test_gap_ratios_shift_scale_invariance():
    rng = np.random.default_rng(3)
    e = np.sort(rng.normal(size=200))
    a = gap_ratios(e).values
    b = gap_ratios(3.7 * e + 11.0).values
    assert np.allclose(a, b, atol=1e-9)


def test_gap_ratios_degenerate_skip():
    e = np.array([0.0, 1.0, 1.0, 1.0, 2.0, 4.0])
    r = gap_ratios(e)
    assert r.n_skipped == 1  # the middle all-degenerate pair
    assert np.all(np.isfinite(r.values))


def test_gap_ratios_too_few():
    with pytest.raises(EmptyInput):
        gap_ratios(np.array([0.0, 1.0]))


def test_poisson_monte_carlo():
    # independent oracle: exponential spacings give mean r = 2 ln 2 - 1
    rng = np.random.default_rng(515)
    levels = np.cumsum(rng.exponential(size=100_000))
    r = gap_ratios(levels)
    assert r.values.mean() == pytest.approx(POISSON_MEAN_R, abs=0.005)
    assert POISSON_MEAN_R == pytest.approx(2 * np.log(2) - 1, abs=1e-12)


def test_goe_monte_carlo():
    # random-matrix sampling oracle for the GOE reference constant
    rng = np.random.default_rng(81)
    rs = []
    for _ in range(20):
        A = rng.normal(size=(500, 500))
        w = np.linalg.eigvalsh((A + A.T) / 2)
        eigs = EigenSystem(energies=w)
        mean_r, count = mean_r_in_window(eigs, MIDDLE_HALF)
        rs.append(mean_r)
        assert count > 100
    assert np.mean(rs) == pytest.approx(GOE_MEAN_R, abs=0.01)


def test_mean_r_window_slicing():
    e = np.arange(100.0)
    eigs = EigenSystem(energies=e)
    mean_r, count = mean_r_in_window(eigs, SpectralWindow(0.25, 0.75))
    assert mean_r == pytest.approx(1.0, abs=1e-12)
    # eps_k = k/99 in [0.25, 0.75] -> k = 25..74, 50 levels, 48 ratios
    assert count == 48


def test_mean_r_insufficient():
    eigs = EigenSystem(energies=np.arange(20.0))
    with pytest.raises(InsufficientStatistics):
        mean_r_in_window(eigs, SpectralWindow(0.0, 0.2))


def test_spectral_window_validation():
    with pytest.raises(ShapeMismatch):
        SpectralWindow(0.5, 0.5)
    with pytest.raises(ShapeMismatch):
        SpectralWindow(-0.1, 0.5)


def test_eigen_system_requires_ascending():
    with pytest.raises(ShapeMismatch):
        EigenSystem(energies=np.array([1.0, 0.0]))


def test_dos_histogram_basic():
    h = dos_histogram(np.array([1.0]), 5, (0.0, 10.0))
    assert h.masses.sum() == pytest.approx(1.0)
    assert np.count_nonzero(h.masses) == 1
    h2 = dos_histogram(np.array([-3.0, 3.0]), 6, (-4.0, 4.0))
    assert np.allclose(h2.masses, h2.masses[::-1])
    assert len(h2.centers) == 6
    assert np.allclose(h2.centers, (h2.edges[:-1] + h2.edges[1:]) / 2)


def test_dos_histogram_empty():
    with pytest.raises(EmptyInput):
        dos_histogram(np.array([]), 5, (0.0, 1.0))
