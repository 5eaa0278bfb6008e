"""Sequential driver: sparse, frequency-localized principal subspaces.

Frequencies are processed in order.  The first subspace comes from the
convex (Fantope) initialization refined by sparse orthogonal iteration;
every later frequency warm-starts from its predecessor and is fit against
the smoothing-regularized spectral matrix.  A final linear program keeps
the ``eta`` frequencies carrying the most captured power.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import NumericalError, RankCollapseError
from .fantope import AdmmConfig, default_admm_config, fantope_initial_dense, initial_subspace
from .linalg import fix_column_phases, hermitian_eig
from .soap import SoapConfig, _sparse_orthonormal, soap_solve, truncate_rows
from .spectral import SpectralEstimate, smoothed_spectral_matrix

__all__ = [
    "LspcaParams",
    "LspcaFit",
    "ScreeSummary",
    "frequency_select",
    "lspca_fit",
    "classical_fdpca",
    "principal_spectrum_reconstruct",
    "scree_summary",
]


@dataclass(frozen=True)
class LspcaParams:
    """Fit parameters: rank, row sparsity, smoothing weight, retained
    frequency count, and lag order (None = floor(sqrt(n)))."""

    d: int
    sparsity: int
    theta: float = 0.0
    eta: int | None = None
    m_lags: int | None = None
    admm: AdmmConfig | None = None
    soap: SoapConfig | None = None
    direction: str = "forward"

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"rank must be >= 1, got {self.d}")
        if self.sparsity < self.d:
            raise ValueError(
                f"sparsity must be >= rank, got s={self.sparsity}, d={self.d}"
            )
        if not 0.0 <= self.theta < 1.0:
            raise ValueError(f"theta must be in [0, 1), got {self.theta}")
        if self.eta is not None and self.eta < 1:
            raise ValueError(f"eta must be >= 1, got {self.eta}")
        if self.direction not in ("forward", "backward"):
            raise ValueError(f"direction must be forward or backward, got {self.direction}")


@dataclass(eq=False)
class LspcaFit:
    """Per-frequency loadings, eigenvalues, captured power, and retention flags."""

    grid: np.ndarray          # (L,)
    loadings: np.ndarray      # (L, p, d) complex, orthonormal columns, row-sparse
    eigenvalues: np.ndarray   # (L, d) descending Rayleigh eigenvalues
    h: np.ndarray             # (L,) captured power, clamped at 0
    beta: np.ndarray          # (L,) 0/1 retention flags, sum == eta
    params: LspcaParams
    eta: int
    reinit_indices: tuple[int, ...] = field(default_factory=tuple)

    @property
    def n_freqs(self) -> int:
        return self.loadings.shape[0]

    @property
    def p(self) -> int:
        return self.loadings.shape[1]

    @property
    def d(self) -> int:
        return self.loadings.shape[2]


def power_ranking(h) -> np.ndarray:
    """Indices of h sorted by decreasing value; ties keep the lower index."""
    return np.argsort(-np.asarray(h, dtype=float), kind="stable")


def frequency_select(h, eta: int) -> np.ndarray:
    """0/1 flags retaining the ``eta`` largest scores (ties to lower index).

    This is the vertex solution of maximizing ``sum beta_l h_l`` over
    ``0 <= beta_l <= 1, sum beta <= eta`` for nonnegative scores.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 1:
        raise ValueError("scores must be a 1-D sequence")
    if np.any(h < 0):
        raise ValueError("scores must be nonnegative; clamp before selecting")
    if not 1 <= eta <= h.size:
        raise ValueError(f"eta must be in 1..{h.size}, got {eta}")
    beta = np.zeros(h.size, dtype=int)
    beta[power_ranking(h)[:eta]] = 1
    return beta


def _rayleigh_align(u: np.ndarray, f: np.ndarray):
    """Rotate the basis so columns diagonalize U^H f U, eigenvalues descending."""
    a = u.conj().T @ f @ u
    lam, w = hermitian_eig(a)
    return lam.real, fix_column_phases(u @ w)


def _captured_power(u: np.ndarray, f: np.ndarray) -> float:
    return float(np.trace(u.conj().T @ f @ u).real)


def lspca_fit(spec: SpectralEstimate, params: LspcaParams,
              dense_init: np.ndarray | None = None) -> LspcaFit:
    """Run the full sequential fit over the spectral estimate.

    ``dense_init`` optionally supplies a precomputed dense initialization
    basis for the first frequency (useful when fitting many parameter
    candidates against the same spectra); it must span the convex-relaxation
    subspace of the first spectral matrix.

    A rank collapse at some frequency triggers a fresh convex
    initialization at that frequency; the affected indices are recorded on
    the returned fit.
    """
    length, p = spec.n_freqs, spec.p
    d, s_hat = params.d, params.sparsity
    if length < 1:
        raise ValueError("spectral estimate is empty")
    if not d <= s_hat <= p:
        raise ValueError(f"need d <= s <= p, got d={d}, s={s_hat}, p={p}")
    eta = length if params.eta is None else params.eta
    if not 1 <= eta <= length:
        raise ValueError(f"eta must be in 1..{length}, got {eta}")

    mats = spec.matrices if params.direction == "forward" else spec.matrices[::-1]
    admm_cfg = params.admm or default_admm_config(mats[0], d, spec.n_samples)
    soap_base = params.soap or SoapConfig(sparsity=s_hat)
    soap_cfg = replace(soap_base, sparsity=s_hat)

    reinits: list[int] = []

    def refine(f_theta, warm, index):
        try:
            return soap_solve(f_theta, warm, soap_cfg)
        except RankCollapseError:
            reinits.append(index)
            fresh = initial_subspace(f_theta, d, s_hat, admm_cfg)
            try:
                return soap_solve(f_theta, fresh, soap_cfg)
            except RankCollapseError as exc:
                raise NumericalError(
                    f"subspace refinement failed at frequency index {index} "
                    f"even after re-initialization"
                ) from exc

    loadings = np.empty((length, p, d), dtype=complex)
    eigenvalues = np.empty((length, d))
    h = np.empty(length)

    dense = dense_init if dense_init is not None else fantope_initial_dense(
        mats[0], d, admm_cfg)
    warm = _sparse_orthonormal(truncate_rows(dense, s_hat))
    u = refine(mats[0], warm, 0)
    h[0] = max(_captured_power(u, mats[0]), 0.0)
    loadings[0] = u
    for ell in range(1, length):
        f_theta = smoothed_spectral_matrix(mats[ell], u @ u.conj().T, params.theta)
        u = refine(f_theta, u, ell)
        h[ell] = max(_captured_power(u, f_theta), 0.0)
        loadings[ell] = u

    for ell in range(length):
        eigenvalues[ell], loadings[ell] = _rayleigh_align(loadings[ell], mats[ell])

    if params.direction == "backward":
        loadings = loadings[::-1].copy()
        eigenvalues = eigenvalues[::-1].copy()
        h = h[::-1].copy()
        reinits = [length - 1 - i for i in reversed(reinits)]

    beta = frequency_select(h, eta)
    return LspcaFit(
        grid=spec.grid.copy(),
        loadings=loadings,
        eigenvalues=eigenvalues,
        h=h,
        beta=beta,
        params=params,
        eta=eta,
        reinit_indices=tuple(reinits),
    )


def classical_fdpca(spec: SpectralEstimate, d: int) -> LspcaFit:
    """Dense per-frequency baseline: top-d eigenpairs of each spectral matrix.

    No sparsity, no smoothing, no localization (every retention flag is 1).
    """
    length, p = spec.n_freqs, spec.p
    if not 1 <= d <= p:
        raise ValueError(f"rank must be in 1..{p}, got {d}")
    loadings = np.empty((length, p, d), dtype=complex)
    eigenvalues = np.empty((length, d))
    h = np.empty(length)
    for ell, f in enumerate(spec.matrices):
        lam, vec = hermitian_eig(f)
        loadings[ell] = vec[:, :d]
        eigenvalues[ell] = lam[:d]
        h[ell] = max(float(lam[:d].sum()), 0.0)
    params = LspcaParams(d=d, sparsity=p, theta=0.0, eta=length)
    return LspcaFit(
        grid=spec.grid.copy(),
        loadings=loadings,
        eigenvalues=eigenvalues,
        h=h,
        beta=np.ones(length, dtype=int),
        params=params,
        eta=length,
    )


def principal_spectrum_reconstruct(fit: LspcaFit, spec: SpectralEstimate) -> SpectralEstimate:
    """Rank-d reconstruction: compress each spectral matrix onto its fitted subspace.

    Returns the Hermitian rank-<=d matrices ``P f_n P`` (with ``P`` the
    fitted projection), i.e. the estimated eigenvalue/eigenvector expansion
    of the principal part of the spectrum.
    """
    if fit.n_freqs != spec.n_freqs or fit.p != spec.p:
        raise ValueError(
            f"fit covers {fit.n_freqs} frequencies of dimension {fit.p}, "
            f"spectra have {spec.n_freqs} of dimension {spec.p}"
        )
    out = np.empty_like(spec.matrices)
    for ell in range(fit.n_freqs):
        u = fit.loadings[ell]
        core = u.conj().T @ spec.matrices[ell] @ u
        rec = u @ (0.5 * (core + core.conj().T)) @ u.conj().T
        out[ell] = 0.5 * (rec + rec.conj().T)
    return SpectralEstimate(grid=spec.grid.copy(), matrices=out,
                            m_lags=spec.m_lags, n_samples=spec.n_samples)


@dataclass(eq=False)
class ScreeSummary:
    """Per-frequency leading-eigenvalue proportions and their average."""

    grid: np.ndarray           # (L,)
    proportions: np.ndarray    # (L, d_max)
    average: np.ndarray        # (d_max,)
    zero_trace: np.ndarray     # (L,) bool flags


def scree_summary(spec: SpectralEstimate, d_max: int) -> ScreeSummary:
    """Proportion of variance carried by the top eigenvalues per frequency."""
    if not 1 <= d_max <= spec.p:
        raise ValueError(f"d_max must be in 1..{spec.p}, got {d_max}")
    length = spec.n_freqs
    props = np.zeros((length, d_max))
    flags = np.zeros(length, dtype=bool)
    for ell, f in enumerate(spec.matrices):
        lam = np.linalg.eigvalsh(0.5 * (f + f.conj().T))[::-1]
        total = float(lam.sum())
        if abs(total) < 1e-300:
            flags[ell] = True
        else:
            props[ell] = lam[:d_max] / total
    return ScreeSummary(grid=spec.grid.copy(), proportions=props,
                        average=props.mean(axis=0), zero_trace=flags)
