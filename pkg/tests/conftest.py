import numpy as np
import pytest

from mbllab import default_device_couplings, enumerate_sector, sample_disorder


@pytest.fixture(scope="session")
def basis84():
    return enumerate_sector(8, 4)


@pytest.fixture(scope="session")
def basis63():
    return enumerate_sector(6, 3)


@pytest.fixture(scope="session")
def big_basis():
    # the full 19-site sector; built once, shared by the few tests that need it
    return enumerate_sector(19, 9)


def random_instance(basis, V=16.0, seed=0):
    """One (J, disorder) pair on the given sector with deterministic draws."""
    J = default_device_couplings(basis.n_sites)
    disorder = sample_disorder(V, seed, basis.n_sites)
    return J, disorder


def random_state(dim, seed=0):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)
