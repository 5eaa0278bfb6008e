"""Band-level summaries of a rank-d reconstructed spectrum.

Bands collect grid frequencies (optionally restricted to the retained
flags); band power is the channel-wise diagonal of the summed matrices and
band coherence the normalized band-integrated cross-spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import UndefinedCoherenceError
from .spectral import SpectralEstimate

__all__ = [
    "FrequencyBand",
    "band_from_grid",
    "bands_from_flags",
    "band_power",
    "band_coherence",
]


@dataclass(frozen=True)
class FrequencyBand:
    """Closed frequency interval plus the grid indices it covers."""

    lo: float
    hi: float
    members: tuple

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi <= 0.5:
            raise ValueError(f"band must satisfy 0 <= lo < hi <= 0.5, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, "members", tuple(int(i) for i in self.members))


def band_from_grid(grid, lo: float, hi: float, beta=None) -> FrequencyBand:
    """Band over grid points in [lo, hi], keeping only retained flags if given."""
    grid = np.asarray(grid)
    inside = (grid >= lo) & (grid <= hi)
    if beta is not None:
        inside &= np.asarray(beta).astype(bool)
    return FrequencyBand(lo=lo, hi=hi, members=tuple(np.flatnonzero(inside)))


def bands_from_flags(grid, beta) -> list:
    """Maximal runs of consecutively retained grid frequencies as bands.

    Band edges extend half a grid spacing beyond the first and last member
    (clipped to [0, 0.5]) so single-frequency runs still form valid bands.
    """
    grid = np.asarray(grid)
    flags = np.asarray(beta).astype(bool)
    if flags.shape != grid.shape:
        raise ValueError("flags and grid must have the same length")
    half = 0.5 * (grid[1] - grid[0] if len(grid) > 1 else grid[0])
    bands = []
    start = None
    for i in range(len(flags) + 1):
        on = i < len(flags) and flags[i]
        if on and start is None:
            start = i
        elif not on and start is not None:
            lo = max(0.0, float(grid[start] - half))
            hi = min(0.5, float(grid[i - 1] + half))
            bands.append(FrequencyBand(lo=lo, hi=hi, members=tuple(range(start, i))))
            start = None
    return bands


def _band_sum(fhat: SpectralEstimate, band: FrequencyBand) -> np.ndarray:
    if len(band.members) == 0:
        raise ValueError("band contains no grid frequencies")
    members = np.asarray(band.members, dtype=int)
    if members.min() < 0 or members.max() >= fhat.n_freqs:
        raise ValueError("band indices fall outside the spectral grid")
    return fhat.matrices[members].sum(axis=0)


def band_power(fhat: SpectralEstimate, band: FrequencyBand) -> np.ndarray:
    """Per-channel power in the band: the real diagonal of the summed matrices.

    Tiny negative residue (>= -1e-8) from roundoff is clamped to zero.
    """
    power = np.diag(_band_sum(fhat, band)).real.copy()
    power[(power < 0) & (power >= -1e-8)] = 0.0
    return power


def band_coherence(fhat: SpectralEstimate, band: FrequencyBand, k: int, ell: int) -> complex:
    """Normalized band-integrated cross-spectrum between channels k and ell.

    ``sum f[k, ell] / sqrt(sum f[k, k] * sum f[ell, ell])``; modulus is at
    most 1 for positive semidefinite spectra.  Raises
    ``UndefinedCoherenceError`` when either channel has no band power.
    """
    total = _band_sum(fhat, band)
    pk = total[k, k].real
    pl = total[ell, ell].real
    if pk <= 1e-12 or pl <= 1e-12:
        raise UndefinedCoherenceError(
            f"channel {k if pk <= 1e-12 else ell} has no power in the band"
        )
    return complex(total[k, ell] / np.sqrt(pk * pl))
