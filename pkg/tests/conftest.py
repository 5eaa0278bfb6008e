import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "numeric",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_hermitian(rng, p, psd=False, eigenvalues=None):
    """Random Hermitian matrix, optionally PSD or with prescribed spectrum."""
    a = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    if eigenvalues is not None:
        q, _ = np.linalg.qr(a)
        return (q * np.asarray(eigenvalues)) @ q.conj().T
    h = 0.5 * (a + a.conj().T)
    if psd:
        h = h @ h.conj().T
    return h


def random_basis(rng, p, d):
    """Random complex (p, d) matrix with orthonormal columns."""
    a = rng.standard_normal((p, d)) + 1j * rng.standard_normal((p, d))
    q, _ = np.linalg.qr(a)
    return q


@pytest.fixture
def make_hermitian(rng):
    def factory(p, psd=False, eigenvalues=None):
        return random_hermitian(rng, p, psd=psd, eigenvalues=eigenvalues)
    return factory


@pytest.fixture
def make_basis(rng):
    def factory(p, d):
        return random_basis(rng, p, d)
    return factory
