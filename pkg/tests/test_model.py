import numpy as np
import pytest

from mbllab import (
    CouplingMatrix,
    DeviceParameters,
    FockState,
    all_diagonal_energies,
    apply,
    build_hamiltonian,
    coupling_from_device,
    default_device_couplings,
    diagonal_energy,
    enumerate_sector,
    load_device_parameters,
    sample_disorder,
)
from mbllab.errors import DivisionByZeroDetuning, NegativeAmplitude, ShapeMismatch

from conftest import random_instance, random_state


def test_exchange_coupling_value():
    params = DeviceParameters(g=np.array([18.0, 18.0]), delta=-568.0)
    J = coupling_from_device(params)
    assert J.J[0, 1] == pytest.approx(-0.5704, abs=5e-5)


def test_exchange_plus_direct():
    lam = np.array([[0.0, 2.65], [2.65, 0.0]])
    params = DeviceParameters(g=np.array([18.0, 18.0]), delta=-568.0, lam=lam)
    J = coupling_from_device(params)
    assert J.J[0, 1] == pytest.approx(2.0796, abs=5e-5)


def test_zero_g_gives_lambda():
    lam = np.array([[0.0, 1.5], [1.5, 0.0]])
    params = DeviceParameters(g=np.zeros(2), delta=-568.0, lam=lam)
    assert np.allclose(coupling_from_device(params).J, lam)


def test_zero_detuning_rejected():
    with pytest.raises(DivisionByZeroDetuning):
        coupling_from_device(DeviceParameters(g=np.array([18.0, 18.0]), delta=0.0))


def test_shipped_device_file_exchange_range():
    params = load_device_parameters()
    J_se = np.outer(params.g, params.g) / params.delta
    off = J_se[~np.eye(len(params.g), dtype=bool)]
    assert off.min() >= -0.73 and off.max() <= -0.45


def test_default_couplings():
    J = default_device_couplings()
    assert J.n_sites == 19
    assert J.J[0, 1] == 2.65
    assert J.J[0, 2] == -0.5
    assert J.J[3, 3] == 0.0
    assert np.allclose(J.J, J.J.T)


def test_coupling_matrix_validation():
    bad = np.array([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(ShapeMismatch):
        CouplingMatrix(2, bad)
    with pytest.raises(ShapeMismatch):
        CouplingMatrix(3, bad)
    # nonzero diagonal entries are normalized away, not an error
    J = CouplingMatrix(2, np.array([[1.0, 0.5], [0.5, 2.0]]))
    assert J.J[0, 0] == 0.0 and J.J[1, 1] == 0.0


def test_coupling_json_round_trip():
    J = default_device_couplings(6)
    d = J.to_json_dict()
    assert len(d["J_mhz"]) == 15
    J2 = CouplingMatrix.from_json_dict(d)
    assert np.allclose(J.J, J2.J)


def test_disorder_bounds_and_determinism():
    a = sample_disorder(16.0, 42, 19)
    b = sample_disorder(16.0, 42, 19)
    c = sample_disorder(16.0, 43, 19)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert np.all(np.abs(a.values) <= 16.0)
    assert len(a.values) == 19


def test_disorder_zero_amplitude():
    assert np.all(sample_disorder(0.0, 5, 10).values == 0.0)


def test_disorder_negative_amplitude():
    with pytest.raises(NegativeAmplitude):
        sample_disorder(-1.0, 0, 10)


def test_two_site_matrix():
    basis = enumerate_sector(2, 1)
    J = CouplingMatrix(2, np.array([[0.0, 1.3], [1.3, 0.0]]))
    disorder = sample_disorder(16.0, 3, 2)
    v1, v2 = disorder.values
    H = build_hamiltonian(basis, J, disorder)
    dense = H.to_dense()
    # states ordered [01, 10] = site0, site1 occupied
    expected = np.array([[v1, 1.3], [1.3, v2]])
    assert np.allclose(dense, expected, atol=1e-14)
    # first column via apply
    col = apply(H, np.array([1.0, 0.0], dtype=complex))
    assert np.allclose(col, expected[:, 0])


def test_apply_zero_vector(basis84):
    J, disorder = random_instance(basis84)
    H = build_hamiltonian(basis84, J, disorder)
    out = apply(H, np.zeros(basis84.dim, dtype=complex))
    assert np.all(out == 0.0)


def test_matvec_matches_sparse_and_dense(basis84):
    J, disorder = random_instance(basis84, V=16.0, seed=11)
    H = build_hamiltonian(basis84, J, disorder)
    sp = H.to_sparse()
    dense = H.to_dense()
    for seed in range(4):
        psi = random_state(basis84.dim, seed)
        ref = sp @ psi
        assert np.max(np.abs(H.apply(psi) - ref)) < 1e-13
        assert np.max(np.abs(dense @ psi - ref)) < 1e-12


def test_matvec_matches_sparse_larger():
    basis = enumerate_sector(13, 6)  # dim 1716
    J, disorder = random_instance(basis, V=8.0, seed=2)
    H = build_hamiltonian(basis, J, disorder)
    sp = H.to_sparse()
    psi = random_state(basis.dim, 9)
    assert np.max(np.abs(H.apply(psi) - sp @ psi)) < 1e-13


def test_hermiticity(basis84):
    J, disorder = random_instance(basis84, V=16.0, seed=5)
    H = build_hamiltonian(basis84, J, disorder)
    rng = np.random.default_rng(12)
    for _ in range(5):
        phi = random_state(basis84.dim, int(rng.integers(1 << 30)))
        psi = random_state(basis84.dim, int(rng.integers(1 << 30)))
        lhs = np.vdot(phi, H.apply(psi))
        rhs = np.vdot(H.apply(phi), psi)
        assert abs(lhs - rhs) < 1e-12


def test_real_vector_dispatch(basis84):
    J, disorder = random_instance(basis84, seed=3)
    H = build_hamiltonian(basis84, J, disorder)
    x = np.random.default_rng(4).normal(size=basis84.dim)
    out = H.apply(x)
    assert out.dtype == np.float64
    assert np.max(np.abs(out - H.to_sparse() @ x)) < 1e-13


def test_eigenvector_residual(basis63):
    J, disorder = random_instance(basis63, V=10.0, seed=8)
    H = build_hamiltonian(basis63, J, disorder)
    w, Q = np.linalg.eigh(H.to_dense())
    v = Q[:, 3].astype(complex)
    assert np.max(np.abs(H.apply(v) - w[3] * v)) < 1e-12


def test_diagonal_energy():
    disorder = sample_disorder(16.0, 21, 8)
    empty = FockState(0, 8, 0)
    assert diagonal_energy(empty, disorder) == 0.0
    s = FockState.from_occupied((1, 4, 6), 8)
    assert diagonal_energy(s, disorder) == pytest.approx(
        disorder.values[[1, 4, 6]].sum(), abs=1e-14)


def test_constant_field_diagonal():
    from mbllab.model import DisorderRealization
    vals = np.full(19, 2.5)
    disorder = DisorderRealization(amplitude=2.5, values=vals, seed=0)
    s = FockState.from_occupied(range(9), 19)
    assert diagonal_energy(s, disorder) == pytest.approx(22.5, abs=1e-12)


def test_all_diagonal_energies_match_matrix(basis84):
    J, disorder = random_instance(basis84, seed=17)
    H = build_hamiltonian(basis84, J, disorder)
    diag = np.diag(H.to_dense())
    assert np.allclose(all_diagonal_energies(basis84, disorder), diag, atol=1e-13)


def test_shape_mismatch():
    basis = enumerate_sector(6, 3)
    J = default_device_couplings(7)
    disorder = sample_disorder(16.0, 1, 6)
    with pytest.raises(ShapeMismatch):
        build_hamiltonian(basis, J, disorder)
    H = build_hamiltonian(basis, default_device_couplings(6), disorder)
    with pytest.raises(ShapeMismatch):
        H.apply(np.zeros(7, dtype=complex))


def test_detuning_warning():
    with pytest.warns(UserWarning):
        DeviceParameters(g=np.array([100.0, 100.0]), delta=-568.0)
