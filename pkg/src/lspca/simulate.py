"""Synthetic benchmark process: band-limited latent AR signals plus noise.

Five independent AR(4) series drive the first five channels.  Channel 1 is
an ideally band-passed, scaled copy of the first latent series; channels
2-5 mix channel 1 with their own band-passed latent series and add unit
white noise; all remaining channels are independent white noise.  The
result has a one-dimensional principal subspace supported on channels 1-5
inside the pass band, with the scale divisor ``c`` controlling the
eigengap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .linalg import fix_column_phases

__all__ = [
    "AR_COEFFS",
    "MIX_WEIGHTS",
    "SIGNAL_BAND",
    "TRUE_SUPPORT",
    "SimScenario",
    "ar_spectral_radius",
    "ar4_simulate",
    "ideal_bandpass",
    "lspca_process",
    "ar_spectrum",
    "population_spectral_matrix",
    "population_loadings",
]

# Latent AR(4) coefficient sets, one row per driving series.
AR_COEFFS = np.array([
    [1.55, -1.694565, 1.341848, -0.6521739],
    [1.60, -1.6970652, 1.3853261, -0.6521739],
    [1.50, -1.6920652, 1.2983696, -0.6521739],
    [1.70, -1.7020652, 1.4722826, -0.6521739],
    [1.40, -1.6870652, 1.2114130, -0.6521739],
])

# Loadings of channels 2..5 onto channel 1.
MIX_WEIGHTS = np.array([2.2, 1.2, 1.25, 2.25])

# Pass band of the ideal filter, cycles/sample.
SIGNAL_BAND = (0.05, 0.25)

# Channels carrying signal (0-based); the implied true sparsity is 5.
TRUE_SUPPORT = frozenset(range(5))


@dataclass(frozen=True)
class SimScenario:
    """Process size, signal-strength divisor, seed, and burn-in length."""

    p: int
    n: int
    c: float = 1.0
    seed: int = 0
    burn_in: int = 500

    def __post_init__(self):
        if self.p < 6:
            raise ValueError(f"need p >= 6 (five signal channels plus noise), got {self.p}")
        if self.n < 64:
            raise ValueError(f"need n >= 64, got {self.n}")
        if not self.c > 0:
            raise ValueError(f"signal divisor must be positive, got {self.c}")
        if self.burn_in < 0:
            raise ValueError(f"burn-in must be >= 0, got {self.burn_in}")


def ar_spectral_radius(coeffs) -> float:
    """Spectral radius of the AR companion matrix (< 1 means stable)."""
    coeffs = np.asarray(coeffs, dtype=float)
    q = coeffs.size
    comp = np.zeros((q, q))
    comp[0] = coeffs
    if q > 1:
        comp[1:, :-1] = np.eye(q - 1)
    return float(np.max(np.abs(np.linalg.eigvals(comp))))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ar4_simulate(coeffs, n: int, seed=0, burn_in: int = 500) -> np.ndarray:
    """Simulate a stable AR process with unit-variance Gaussian innovations.

    Returns ``n`` samples after discarding ``burn_in``.  Raises ``ValueError``
    when the companion spectral radius is >= 1.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    radius = ar_spectral_radius(coeffs)
    if radius >= 1.0:
        raise ValueError(f"unstable AR coefficients: spectral radius {radius:.6f} >= 1")
    rng = _as_rng(seed)
    w = rng.standard_normal(n + burn_in)
    y = lfilter([1.0], np.r_[1.0, -coeffs], w)
    return y[burn_in:]


def ideal_bandpass(x, band=SIGNAL_BAND) -> np.ndarray:
    """Zero every Fourier bin outside [lo, hi] cycles/sample (inclusive)."""
    lo, hi = band
    if not 0.0 <= lo < hi <= 0.5:
        raise ValueError(f"band must satisfy 0 <= lo < hi <= 0.5, got {band}")
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    coeffs = np.fft.rfft(x)
    freqs = np.arange(coeffs.shape[0]) / n
    mask = (freqs >= lo) & (freqs <= hi)
    return np.fft.irfft(coeffs * mask, n=n)


def lspca_process(sc: SimScenario) -> np.ndarray:
    """Generate one realization of the benchmark process, shape (n, p).

    Deterministic per seed: the innovation draws happen in a fixed order
    (latent series first, then the channel noises, then the pure-noise
    block).
    """
    rng = _as_rng(sc.seed)
    y = np.empty((5, sc.n))
    for j in range(5):
        y[j] = ar4_simulate(AR_COEFFS[j], sc.n, seed=rng, burn_in=sc.burn_in)
    x = np.empty((sc.n, sc.p))
    x1 = ideal_bandpass(y[0] / sc.c, SIGNAL_BAND)
    x[:, 0] = x1
    for j in range(1, 5):
        w1 = rng.standard_normal(sc.n)
        x[:, j] = ideal_bandpass(MIX_WEIGHTS[j - 1] * x1 + y[j] / sc.c, SIGNAL_BAND) + w1
    x[:, 5:] = rng.standard_normal((sc.n, sc.p - 5))
    return x


def ar_spectrum(coeffs, omegas) -> np.ndarray:
    """Spectral density of a unit-innovation AR process, cycles/sample:
    ``|1 - sum_k pi_k exp(-2 pi i omega k)|^{-2}``."""
    coeffs = np.asarray(coeffs, dtype=float)
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    k = np.arange(1, coeffs.size + 1)
    transfer = 1.0 - np.exp(-2j * np.pi * omegas[:, None] * k[None, :]) @ coeffs
    return 1.0 / np.abs(transfer) ** 2


def population_spectral_matrix(p: int, c: float, omegas, band=SIGNAL_BAND) -> np.ndarray:
    """Exact spectral matrices of the benchmark process at the given frequencies.

    Inside the pass band the matrix is ``g_1 m m^T`` (from the shared latent
    series, with ``m = (1, mix weights, 0, ...)``) plus the per-channel
    latent spectra on channels 2-5 and the unit noise floor on channels
    2..p; outside the band only the noise floor remains.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    lo, hi = band
    g = np.stack([ar_spectrum(AR_COEFFS[j], omegas) for j in range(5)]) / c ** 2
    m = np.zeros(p)
    m[0] = 1.0
    m[1:5] = MIX_WEIGHTS
    noise = np.ones(p)
    noise[0] = 0.0  # channel 1 carries no independent noise
    out = np.zeros((omegas.size, p, p))
    inband = (omegas >= lo) & (omegas <= hi)
    for i, omega in enumerate(omegas):
        f = np.diag(noise.copy())
        if inband[i]:
            f += g[0, i] * np.outer(m, m)
            for j in range(1, 5):
                f[j, j] += g[j, i]
        out[i] = f
    return out


def population_loadings(p: int, c: float, omegas, d: int = 1,
                        band=SIGNAL_BAND) -> np.ndarray:
    """Top-d population eigenvectors per frequency (descending eigenvalues).

    Outside the pass band the leading eigenvalue is fully degenerate (pure
    noise), so the returned directions there are an arbitrary deterministic
    choice.
    """
    mats = population_spectral_matrix(p, c, omegas, band=band)
    out = np.empty((mats.shape[0], p, d))
    for i, f in enumerate(mats):
        w, v = np.linalg.eigh(f)
        v = v[:, ::-1][:, :d]
        out[i] = fix_column_phases(v).real
    return out
