import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lspca.analysis import (
    FrequencyBand,
    band_coherence,
    band_from_grid,
    band_power,
    bands_from_flags,
)
from lspca.exceptions import UndefinedCoherenceError
from lspca.spectral import SpectralEstimate

from conftest import random_basis, random_hermitian


def make_estimate(mats, n=None):
    mats = np.asarray(mats, dtype=complex)
    n = n or 2 * len(mats)
    grid = np.arange(1, len(mats) + 1) / n
    return SpectralEstimate(grid=grid, matrices=mats, m_lags=1, n_samples=n)


def rank_one(u, lam=1.0):
    return lam * np.outer(u, u.conj())


class TestBandPower:
    def test_identity_triples(self):
        est = make_estimate([np.eye(3)] * 3)
        band = FrequencyBand(lo=0.0, hi=0.5, members=(0, 1, 2))
        np.testing.assert_allclose(band_power(est, band), 3.0)

    def test_rank_one_diagonal(self, rng):
        u = random_basis(rng, 4, 1)[:, 0]
        est = make_estimate([rank_one(u, 2.0)])
        band = FrequencyBand(lo=0.0, hi=0.5, members=(0,))
        np.testing.assert_allclose(band_power(est, band), 2.0 * np.abs(u) ** 2,
                                   atol=1e-12)

    def test_additive_over_disjoint_bands(self, rng):
        mats = [random_hermitian(rng, 3, psd=True) for _ in range(4)]
        est = make_estimate(mats)
        b1 = FrequencyBand(lo=0.0, hi=0.2, members=(0, 1))
        b2 = FrequencyBand(lo=0.3, hi=0.5, members=(2, 3))
        union = FrequencyBand(lo=0.0, hi=0.5, members=(0, 1, 2, 3))
        np.testing.assert_allclose(band_power(est, b1) + band_power(est, b2),
                                   band_power(est, union), atol=1e-12)

    def test_small_negative_clamped(self):
        mat = np.diag([1.0, -5e-9]).astype(complex)
        est = make_estimate([mat])
        power = band_power(est, FrequencyBand(lo=0.0, hi=0.5, members=(0,)))
        assert power[1] == 0.0

    def test_empty_band_rejected(self):
        est = make_estimate([np.eye(2)])
        with pytest.raises(ValueError):
            band_power(est, FrequencyBand(lo=0.0, hi=0.5, members=()))


class TestBandCoherence:
    def test_rank_one_unimodular(self, rng):
        u = random_basis(rng, 4, 1)[:, 0]
        est = make_estimate([rank_one(u, 3.0)])
        band = FrequencyBand(lo=0.0, hi=0.5, members=(0,))
        assert abs(abs(band_coherence(est, band, 0, 1)) - 1.0) <= 1e-10

    def test_diagonal_is_zero(self):
        est = make_estimate([np.diag([2.0, 3.0]).astype(complex)] * 2)
        band = FrequencyBand(lo=0.0, hi=0.5, members=(0, 1))
        assert band_coherence(est, band, 0, 1) == 0.0

    def test_orthogonal_supports_strictly_inside(self, rng):
        # two frequencies with rank-1 matrices on orthogonal supports: the
        # cross term comes from only one frequency, the powers from both
        u1 = np.array([1.0, 1.0, 0.0]) / np.sqrt(2)
        u2 = np.array([0.0, 1.0, 1.0]) / np.sqrt(2)
        est = make_estimate([rank_one(u1), rank_one(u2)])
        band = FrequencyBand(lo=0.0, hi=0.5, members=(0, 1))
        top = 0.5  # sum of f[0,1] over both matrices
        bottom = np.sqrt(0.5 * 1.0)
        assert band_coherence(est, band, 0, 1) == pytest.approx(top / bottom)
        assert abs(band_coherence(est, band, 0, 1)) < 1.0

    def test_zero_power_channel_rejected(self):
        est = make_estimate([np.diag([1.0, 0.0]).astype(complex)])
        band = FrequencyBand(lo=0.0, hi=0.5, members=(0,))
        with pytest.raises(UndefinedCoherenceError):
            band_coherence(est, band, 0, 1)

    @given(st.integers(0, 2 ** 31 - 1))
    def test_bounded_and_hermitian(self, seed):
        rng = np.random.default_rng(seed)
        mats = [random_hermitian(rng, 4, psd=True) for _ in range(3)]
        est = make_estimate(mats)
        band = FrequencyBand(lo=0.0, hi=0.5, members=(0, 1, 2))
        for k in range(4):
            for ell in range(4):
                coh = band_coherence(est, band, k, ell)
                assert abs(coh) <= 1 + 1e-8
                assert coh == pytest.approx(
                    np.conj(band_coherence(est, band, ell, k)), abs=1e-12)


class TestBands:
    def test_band_from_grid_respects_flags(self):
        grid = np.arange(1, 11) / 20
        beta = np.array([0, 1, 1, 0, 0, 1, 1, 1, 0, 0])
        band = band_from_grid(grid, 0.05, 0.40, beta=beta)
        assert band.members == (1, 2, 5, 6, 7)

    def test_bands_from_flags_runs(self):
        grid = np.arange(1, 11) / 20
        beta = np.array([0, 1, 1, 0, 0, 1, 1, 1, 0, 1])
        bands = bands_from_flags(grid, beta)
        assert [b.members for b in bands] == [(1, 2), (5, 6, 7), (9,)]
        for b in bands:
            assert 0.0 <= b.lo < b.hi <= 0.5
            recovered = band_from_grid(grid, b.lo, b.hi, beta=beta)
            assert recovered.members == b.members

    def test_no_flags_no_bands(self):
        assert bands_from_flags(np.arange(1, 5) / 8, np.zeros(4)) == []

    def test_band_validation(self):
        with pytest.raises(ValueError):
            FrequencyBand(lo=0.3, hi=0.2, members=(0,))
        with pytest.raises(ValueError):
            FrequencyBand(lo=0.0, hi=0.6, members=(0,))

    def test_out_of_grid_members_rejected(self):
        est = make_estimate([np.eye(2)])
        with pytest.raises(ValueError):
            band_power(est, FrequencyBand(lo=0.0, hi=0.5, members=(3,)))
