import numpy as np
import pytest

from lspca.linalg import row_support
from lspca.simulate import (
    AR_COEFFS,
    MIX_WEIGHTS,
    SIGNAL_BAND,
    TRUE_SUPPORT,
    SimScenario,
    ar4_simulate,
    ar_spectral_radius,
    ar_spectrum,
    ideal_bandpass,
    lspca_process,
    population_loadings,
    population_spectral_matrix,
)


class TestAr4:
    def test_benchmark_coefficients_are_stable(self):
        for coeffs in AR_COEFFS:
            assert ar_spectral_radius(coeffs) < 1.0

    def test_degenerate_is_white_noise(self):
        y = ar4_simulate([0.0, 0.0, 0.0, 0.0], 10_000, seed=1)
        assert abs(y.var() - 1.0) <= 0.1

    def test_unit_root_violation_raises(self):
        with pytest.raises(ValueError, match="1.1"):
            ar4_simulate([1.1, 0.0, 0.0, 0.0], 100)

    def test_deterministic(self):
        a = ar4_simulate(AR_COEFFS[0], 256, seed=9)
        b = ar4_simulate(AR_COEFFS[0], 256, seed=9)
        np.testing.assert_array_equal(a, b)


class TestBandpass:
    def test_inband_cosine_unchanged(self):
        n = 200
        t = np.arange(n)
        x = np.cos(2 * np.pi * 0.1 * t)  # 0.1 = 20/200, an exact grid frequency
        out = ideal_bandpass(x, (0.05, 0.25))
        assert np.max(np.abs(out - x)) <= 1e-8

    def test_outband_cosine_removed(self):
        n = 200
        x = np.cos(2 * np.pi * 0.4 * np.arange(n))
        out = ideal_bandpass(x, (0.05, 0.25))
        assert np.linalg.norm(out) <= 1e-8

    def test_full_band_identity(self, rng):
        x = rng.standard_normal(128)
        np.testing.assert_allclose(ideal_bandpass(x, (0.0, 0.5)), x, atol=1e-10)

    def test_idempotent(self, rng):
        x = rng.standard_normal(128)
        once = ideal_bandpass(x, SIGNAL_BAND)
        np.testing.assert_allclose(ideal_bandpass(once, SIGNAL_BAND), once, atol=1e-12)

    def test_band_validation(self):
        with pytest.raises(ValueError):
            ideal_bandpass(np.zeros(16), (0.3, 0.2))


class TestProcess:
    def test_reproducible(self):
        sc = SimScenario(p=8, n=128, c=2.0, seed=5)
        np.testing.assert_array_equal(lspca_process(sc), lspca_process(sc))

    def test_noise_channels_are_white(self):
        x = lspca_process(SimScenario(p=8, n=4096, c=1.0, seed=3))
        for j in range(5, 8):
            col = x[:, j]
            r1 = np.corrcoef(col[1:], col[:-1])[0, 1]
            assert abs(r1) <= 0.1

    def test_channel1_band_limited(self):
        # raw periodogram mass of channel 1 concentrates in the pass band
        x = lspca_process(SimScenario(p=6, n=4096, c=1.0, seed=7))
        coeffs = np.fft.rfft(x[:, 0] - x[:, 0].mean())
        power = np.abs(coeffs) ** 2
        freqs = np.arange(power.size) / 4096
        inband = (freqs >= SIGNAL_BAND[0]) & (freqs <= SIGNAL_BAND[1])
        assert power[inband].sum() / power.sum() >= 0.95

    def test_signal_noise_independence(self):
        x = lspca_process(SimScenario(p=10, n=4096, c=1.0, seed=11))
        bound = 3 / np.sqrt(4096)
        for j in range(5, 10):
            c01 = np.corrcoef(x[:, 0], x[:, j])[0, 1]
            assert abs(c01) <= bound * 3  # slack for finite-sample correlation

    def test_scenario_validation(self):
        with pytest.raises(ValueError):
            SimScenario(p=5, n=128)
        with pytest.raises(ValueError):
            SimScenario(p=8, n=32)
        with pytest.raises(ValueError):
            SimScenario(p=8, n=128, c=0.0)


class TestPopulationSpectra:
    def test_analytic_matches_simulated_latent_spectrum(self):
        # oracle: average raw periodogram of the first latent series over
        # replicates converges to the closed-form spectrum
        n, reps = 4096, 30
        ells = np.array([80, 160, 320, 480, 640])  # inside the AR peak region
        omegas = ells / n
        acc = np.zeros(ells.size)
        for rep in range(reps):
            y = ar4_simulate(AR_COEFFS[0], n, seed=1000 + rep)
            y = y - y.mean()
            coeffs = np.fft.fft(y)[ells]
            acc += np.abs(coeffs) ** 2 / n
        ratio = (acc / reps) / ar_spectrum(AR_COEFFS[0], omegas)
        assert abs(np.log(ratio).mean()) <= 0.2

    def test_outside_band_is_pure_noise(self):
        f = population_spectral_matrix(8, 1.0, [0.3, 0.45])
        expected = np.diag([0.0, 1, 1, 1, 1, 1, 1, 1])
        np.testing.assert_allclose(f[0], expected, atol=1e-14)
        np.testing.assert_allclose(f[1], expected, atol=1e-14)

    def test_inband_structure(self):
        omega = 0.1
        f = population_spectral_matrix(8, 2.0, [omega])[0]
        g = ar_spectrum(AR_COEFFS[0], [omega])[0] / 4.0
        m = np.r_[1.0, MIX_WEIGHTS, np.zeros(3)]
        expected = g * np.outer(m, m) + np.diag(
            np.r_[0.0, [ar_spectrum(AR_COEFFS[j], [omega])[0] / 4.0 + 1.0
                        for j in range(1, 5)], np.ones(3)])
        np.testing.assert_allclose(f, expected, atol=1e-12)

    def test_population_leading_vector_supported_on_signal_channels(self):
        omegas = np.linspace(0.06, 0.24, 9)
        loadings = population_loadings(16, 3.0, omegas, d=1)
        for i in range(omegas.size):
            support = set(row_support(loadings[i], tol=1e-10))
            assert support == set(TRUE_SUPPORT)
