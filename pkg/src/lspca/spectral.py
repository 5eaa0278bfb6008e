"""Autocovariance and spectral-matrix estimation.

The spectral estimate is a lag-window (truncated) periodogram evaluated on
the fundamental-frequency grid ``omega_l = l/n`` for ``l = 1..n//2``, in
cycles per sample.  With the maximal lag order ``M = n - 1`` and no taper it
reproduces the raw periodogram ``d(omega) d(omega)^H`` exactly at every grid
frequency.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import require_hermitian

TAPERS = ("none", "bartlett")

__all__ = [
    "SpectralEstimate",
    "TAPERS",
    "default_lag_order",
    "fourier_grid",
    "autocovariance_lags",
    "truncated_periodogram",
    "discrete_fourier_transform",
    "dft_frame",
    "smoothed_spectral_matrix",
]


def _as_series(x) -> np.ndarray:
    """Coerce input to an (n, p) float array with finite entries."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"expected an (n, p) array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("time series contains non-finite values")
    return x


def default_lag_order(n: int) -> int:
    """Default lag truncation order, floor(sqrt(n))."""
    return int(np.sqrt(n))


def fourier_grid(n: int) -> np.ndarray:
    """Fundamental frequencies l/n for l = 1..n//2 (cycles/sample)."""
    return np.arange(1, n // 2 + 1) / n


@dataclass(frozen=True, eq=False)
class SpectralEstimate:
    """Per-frequency Hermitian spectral matrices on the fundamental grid."""

    grid: np.ndarray        # (L,) frequencies in (0, 0.5]
    matrices: np.ndarray    # (L, p, p) complex Hermitian
    m_lags: int
    n_samples: int

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        mats = np.asarray(self.matrices)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ValueError(f"matrices must be (L, p, p), got {mats.shape}")
        if grid.shape != (mats.shape[0],):
            raise ValueError("grid length does not match matrix count")
        if grid.size and (grid[0] <= 0.0 or grid[-1] > 0.5 or np.any(np.diff(grid) <= 0)):
            raise ValueError("grid must be strictly increasing within (0, 0.5]")
        herm = np.max(np.abs(mats - mats.conj().transpose(0, 2, 1))) if mats.size else 0.0
        scale = max(1.0, float(np.max(np.abs(mats))) if mats.size else 0.0)
        if herm > 1e-12 * scale:
            raise ValueError("spectral matrices are not Hermitian within tolerance")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "matrices", mats)

    @property
    def n_freqs(self) -> int:
        return self.matrices.shape[0]

    @property
    def p(self) -> int:
        return self.matrices.shape[1]


def autocovariance_lags(x, m_lags: int, center: bool = True) -> np.ndarray:
    """Sample autocovariance matrices R_0 .. R_M.

    ``R_t = (1/n) sum_{k=1..n-t} X(k+t) X(k)^T`` after optional mean
    centering; the negative lags are implicitly ``R_{-t} = R_t^T``.  Returns
    an ``(M+1, p, p)`` array.
    """
    x = _as_series(x)
    n, p = x.shape
    if not 0 <= m_lags <= n - 1:
        raise ValueError(f"lag order must satisfy 0 <= M <= n-1, got M={m_lags}, n={n}")
    if center:
        x = x - x.mean(axis=0)
    out = np.empty((m_lags + 1, p, p))
    for t in range(m_lags + 1):
        out[t] = x[t:].T @ x[: n - t] / n
    return out


def _taper_weights(m_lags: int, taper: str) -> np.ndarray:
    if taper not in TAPERS:
        raise ValueError(f"unknown taper {taper!r}; choose from {TAPERS}")
    t = np.arange(m_lags + 1)
    if taper == "bartlett":
        return 1.0 - t / (m_lags + 1)
    return np.ones(m_lags + 1)


def truncated_periodogram(x, m_lags: int | None = None, center: bool = True,
                          taper: str = "none") -> SpectralEstimate:
    """Lag-window spectral estimate on the fundamental-frequency grid.

    ``f_n(omega) = sum_{t=-M..M} w(t) R_t exp(-2 pi i omega t)`` with
    ``w(t) = 1`` for ``taper="none"`` and the triangular
    ``w(t) = 1 - |t|/(M+1)`` for ``taper="bartlett"`` (which guarantees
    positive semidefinite output).
    """
    x = _as_series(x)
    n, p = x.shape
    if n < 4:
        raise ValueError(f"need at least 4 samples, got {n}")
    if m_lags is None:
        m_lags = default_lag_order(n)
    r = autocovariance_lags(x, m_lags, center=center)
    w = _taper_weights(m_lags, taper)
    omegas = fourier_grid(n)
    f = np.repeat((w[0] * r[0]).astype(complex)[None], len(omegas), axis=0)
    if m_lags >= 1:
        t = np.arange(1, m_lags + 1)
        z = w[1:] * np.exp(-2j * np.pi * omegas[:, None] * t[None, :])  # (L, M)
        f += np.einsum("ft,tjk->fjk", z, r[1:])
        f += np.einsum("ft,tkj->fjk", np.conj(z), r[1:])
    f = 0.5 * (f + f.conj().transpose(0, 2, 1))
    return SpectralEstimate(grid=omegas, matrices=f, m_lags=m_lags, n_samples=n)


def dft_frame(x, center: bool = True) -> np.ndarray:
    """Discrete Fourier transform at every fundamental frequency.

    Returns an ``(n//2, p)`` complex array with rows
    ``d(omega_l) = n^{-1/2} sum_{t=1..n} X(t) exp(-2 pi i omega_l t)`` so
    that ``d d^H`` matches the periodogram scale.
    """
    x = _as_series(x)
    n = x.shape[0]
    if center:
        x = x - x.mean(axis=0)
    ell = np.arange(1, n // 2 + 1)
    coeffs = np.fft.fft(x, axis=0)[ell]
    phase = np.exp(-2j * np.pi * ell / n)  # time index runs 1..n
    return phase[:, None] * coeffs / np.sqrt(n)


def discrete_fourier_transform(x, ell: int, center: bool = True) -> np.ndarray:
    """DFT vector at the single fundamental frequency ``omega = ell/n``."""
    x = _as_series(x)
    n = x.shape[0]
    if not 1 <= ell <= n // 2:
        raise ValueError(f"frequency index must be in 1..{n // 2}, got {ell}")
    if center:
        x = x - x.mean(axis=0)
    t = np.arange(1, n + 1)
    return (x * np.exp(-2j * np.pi * (ell / n) * t)[:, None]).sum(axis=0) / np.sqrt(n)


def smoothed_spectral_matrix(f_next, prev_proj, theta: float) -> np.ndarray:
    """Shrink the spectral matrix toward the previous frequency's subspace.

    Returns ``(1 - theta) f_next + theta P f_next P`` where ``P`` is the
    projection onto the previously estimated principal subspace.  ``theta``
    must lie in ``[0, 1)``: at 1 every step would simply reproduce the first
    frequency's subspace.
    """
    if not 0.0 <= theta < 1.0:
        raise ValueError(f"smoothing weight must be in [0, 1), got {theta}")
    f_next = require_hermitian(f_next)
    if theta == 0.0:
        return f_next
    prev_proj = np.asarray(prev_proj)
    if prev_proj.shape != f_next.shape:
        raise ValueError(
            f"shape mismatch: projection {prev_proj.shape} vs matrix {f_next.shape}"
        )
    out = (1.0 - theta) * f_next + theta * (prev_proj @ f_next @ prev_proj)
    return 0.5 * (out + out.conj().T)
