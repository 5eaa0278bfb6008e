"""Data-driven parameter selection.

* The retained-frequency count ``eta`` minimizes a Whittle-likelihood
  information criterion: the model spectral matrix at a retained frequency
  is the rank-d reconstruction plus the average off-support power, and at a
  dropped frequency just the average off-support power.
* The sparsity and smoothing parameters come from blocked k-fold cross
  validation scored by the Mahalanobis distance of held-out DFT ordinates
  under the model fitted to the remaining folds.
* The full loop selects each parameter in turn, conditional on the others,
  for a small number of iterations (two suffices in practice).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.special import gammaincinv

from .driver import LspcaFit, LspcaParams, lspca_fit, power_ranking
from .exceptions import SingularMatrixError
from .fantope import AdmmConfig, default_admm_config, fantope_initial_dense
from .spectral import (
    SpectralEstimate,
    default_lag_order,
    dft_frame,
    truncated_periodogram,
)

CRITERIA = ("aic", "aicc", "bic")

__all__ = [
    "CRITERIA",
    "TuneConfig",
    "EtaSelection",
    "CvSelection",
    "TuneResult",
    "ic_penalty",
    "whittle_log_likelihood",
    "select_eta",
    "block_folds",
    "cv_select",
    "iterative_tune",
]


@dataclass(frozen=True)
class TuneConfig:
    """Selection settings: rank, candidate grids, fold count, criterion."""

    d: int
    s_grid: tuple
    theta_grid: tuple
    k: int = 4
    criterion: str = "bic"
    iterations: int = 2
    m_lags: int | None = None
    center: bool = True
    taper: str = "none"
    eta_init_frac: float = 0.75
    order: str = "s_first"
    admm: AdmmConfig | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"rank must be >= 1, got {self.d}")
        if len(self.s_grid) == 0 or len(self.theta_grid) == 0:
            raise ValueError("candidate grids must be nonempty")
        if self.k < 2:
            raise ValueError(f"need at least 2 folds, got {self.k}")
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}, got {self.criterion!r}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not 0.0 < self.eta_init_frac < 1.0:
            raise ValueError("eta_init_frac must be in (0, 1)")
        if self.order not in ("s_first", "eta_first"):
            raise ValueError(f"order must be s_first or eta_first, got {self.order!r}")


def ic_penalty(criterion: str, eta: int, n: int) -> float:
    """Model-complexity penalty added to -2 log L."""
    if criterion == "aic":
        return 2.0 * eta
    if criterion == "aicc":
        return 2.0 * eta + (2.0 * eta ** 2 + 2.0 * eta) / (n - eta - 1)
    if criterion == "bic":
        return float(np.log(n)) * eta
    raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")


def _chol_pd(g):
    """Lower Cholesky factor with a trace-scaled ridge fallback.

    Returns ``(factor, regularized_flag)``; raises ``SingularMatrixError``
    when the matrix stays indefinite after regularization.
    """
    g = np.asarray(g)
    try:
        return cholesky(g, lower=True), False
    except np.linalg.LinAlgError:
        pass
    ridge = 1e-10 * float(np.trace(g).real) / g.shape[0]
    if not ridge > 0:
        raise SingularMatrixError("matrix is singular and has nonpositive trace")
    try:
        return cholesky(g + ridge * np.eye(g.shape[0]), lower=True), True
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("matrix is singular even after regularization") from exc


def whittle_log_likelihood(dfts, g_matrices) -> float:
    """Gaussian log likelihood of DFT ordinates under model spectra.

    ``-(sum over frequencies of p log pi + log det G + d G^{-1} d^H)``.
    Singular model matrices are ridge-regularized (with a warning) before
    giving up.
    """
    dfts = np.asarray(dfts)
    g_matrices = np.asarray(g_matrices)
    if dfts.ndim != 2 or g_matrices.ndim != 3 or dfts.shape[0] != g_matrices.shape[0]:
        raise ValueError("expected (L, p) ordinates and (L, p, p) model matrices")
    p = dfts.shape[1]
    total = 0.0
    flagged = False
    for d_l, g in zip(dfts, g_matrices):
        c, reg = _chol_pd(g)
        flagged = flagged or reg
        z = solve_triangular(c, d_l, lower=True)
        total += p * np.log(np.pi) + 2.0 * float(np.sum(np.log(np.diag(c).real)))
        total += float(np.vdot(z, z).real)
    if flagged:
        warnings.warn("singular model spectra were ridge-regularized",
                      RuntimeWarning, stacklevel=2)
    return -total


def _model_scores(sigma, retained, loadings, eigenvalues, dfts):
    """Log-determinants and Mahalanobis quadratics for the localization model.

    The model matrix at frequency l is ``sigma`` plus, when l is retained,
    the rank-d term ``U_l diag(max(lambda_l, 0)) U_l^H``.  Uses the
    matrix-determinant lemma and a low-rank Woodbury correction so only one
    Cholesky factorization of ``sigma`` is needed.  Returns per-frequency
    arrays ``(logdets, quads)``.
    """
    dfts = np.asarray(dfts)
    length, p = dfts.shape
    c, _ = _chol_pd(sigma)
    z = solve_triangular(c, dfts.T, lower=True)
    quads = np.einsum("pl,pl->l", z.conj(), z).real
    logdets = np.full(length, 2.0 * float(np.sum(np.log(np.diag(c).real))))
    retained = np.asarray(retained, dtype=int)
    if retained.size:
        u_r = np.asarray(loadings)[retained]
        lam_r = np.clip(np.asarray(eigenvalues)[retained], 0.0, None)
        r, _, d = u_r.shape
        rhs = np.moveaxis(u_r, 0, 1).reshape(p, r * d)
        w = np.moveaxis(solve_triangular(c, rhs, lower=True).reshape(p, r, d), 1, 0)
        m = np.einsum("rpi,rpj->rij", w.conj(), w)
        dets = np.linalg.det(np.eye(d) + lam_r[:, :, None] * m)
        logdets[retained] += np.log(np.maximum(dets.real, 1e-300))
        y = np.einsum("rpi,pr->ri", w.conj(), z[:, retained])
        g = np.linalg.solve(np.eye(d) + m * lam_r[:, None, :], y[:, :, None])[:, :, 0]
        quads[retained] -= np.einsum("ri,ri->r", y.conj(), lam_r * g).real
    return logdets, quads


def _base_quads(chol_sigma, dfts):
    z = solve_triangular(chol_sigma, np.asarray(dfts).T, lower=True)
    return np.einsum("pl,pl->l", z.conj(), z).real


def residual_power_matrix(pool, calibration_dfts=None, floor_rel: float = 1e-6):
    """Average residual spectrum from off-support DFT ordinates.

    ``pool`` holds the ordinates at frequencies outside the current
    retained-set estimate; their mean outer product estimates the spectrum
    of the non-principal remainder.  Two robustness steps follow: the
    eigenvalues are floored at ``floor_rel`` times the largest (band-limited
    channels can leave exactly unexcited directions in the pool, which would
    otherwise blow Mahalanobis quadratics past float precision), and the
    matrix is rescaled so the median Mahalanobis quadratic of
    ``calibration_dfts`` (default: the pool) matches its null value (the
    quadratic of a matched complex Gaussian is Gamma(p, 1)); the pool is
    rank-selected from the coldest ordinates and otherwise understates the
    typical one.
    """
    pool = np.asarray(pool)
    m, p = pool.shape
    if m < 1:
        raise ValueError("residual pool is empty")
    sigma = np.einsum("ip,iq->pq", pool, pool.conj()) / m
    lam, vec = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
    floor = floor_rel * max(lam[-1], 0.0)
    if floor <= 0.0:
        raise SingularMatrixError("residual pool has no power")
    sigma = (vec * np.maximum(lam, floor)) @ vec.conj().T
    calib = pool if calibration_dfts is None else np.asarray(calibration_dfts)
    c, _ = _chol_pd(sigma)
    kappa = float(np.median(_base_quads(c, calib))) / float(gammaincinv(p, 0.5))
    if not kappa > 0:
        kappa = 1.0
    return sigma * kappa


@dataclass(eq=False)
class EtaSelection:
    eta: int
    scores: np.ndarray  # information criterion per candidate eta = 1..L-1
    criterion: str
    sigma_eta: int


def select_eta(spec: SpectralEstimate, fit: LspcaFit, dfts,
               criterion: str = "bic", sigma_eta: int | None = None) -> EtaSelection:
    """Choose the retained-frequency count by scanning an information criterion.

    The residual power matrix is estimated once, from the ordinates outside
    the ``sigma_eta`` highest-ranked frequencies (default: the caller's
    current retained-count estimate when it leaves at least one frequency
    out, otherwise three quarters of the grid, an intentional
    overestimate).  The scan then walks candidates ``1..L-1`` down the
    captured-power ranking shared with the retention flags, adding the
    rank-d reconstruction at retained frequencies.  Ties resolve to the
    smaller candidate.  Model log-likelihoods agree with
    ``whittle_log_likelihood`` on the same model matrices.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    dfts = np.asarray(dfts)
    length, p = spec.n_freqs, spec.p
    if dfts.shape != (length, p):
        raise ValueError(f"expected ({length}, {p}) DFT ordinates, got {dfts.shape}")
    if length < 2:
        raise ValueError("need at least two frequencies to select eta")
    n = spec.n_samples
    order = power_ranking(fit.h)
    if sigma_eta is None:
        sigma_eta = fit.eta if 1 <= fit.eta < length else int(round(0.75 * length))
    if not 1 <= sigma_eta <= length - 1:
        raise ValueError(f"sigma_eta must be in 1..{length - 1}, got {sigma_eta}")
    sigma = residual_power_matrix(dfts[order[sigma_eta:]], calibration_dfts=dfts)

    # Per-frequency retention deltas against the residual-only model; the
    # scan over eta is then a cumulative sum down the ranking.
    logdets, quads = _model_scores(sigma, order, fit.loadings, fit.eigenvalues, dfts)
    c, _ = _chol_pd(sigma)
    base_logdet = 2.0 * float(np.sum(np.log(np.diag(c).real)))
    base_quads = _base_quads(c, dfts)
    logdet_gain = (logdets - base_logdet)[order]
    quad_saving = (base_quads - quads)[order]
    etas = np.arange(1, length)
    neg2_loglik = 2.0 * (
        length * p * np.log(np.pi) + length * base_logdet + base_quads.sum()
        + np.cumsum(logdet_gain)[:-1] - np.cumsum(quad_saving)[:-1]
    )
    penalties = np.array([ic_penalty(criterion, int(e), n) for e in etas])
    scores = neg2_loglik + penalties
    best = int(etas[np.argmin(scores)])  # first minimum: ties to smaller eta
    return EtaSelection(eta=best, scores=scores, criterion=criterion,
                        sigma_eta=int(sigma_eta))


def block_folds(x, k: int) -> list:
    """Split the series into k contiguous, disjoint, covering blocks."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if k < 1:
        raise ValueError(f"fold count must be >= 1, got {k}")
    if n % k != 0:
        raise ValueError(
            f"fold count {k} does not divide series length {n}; "
            f"truncate the series to {k * (n // k)} rows first"
        )
    nb = n // k
    if nb < 4:
        raise ValueError(f"blocks of length {nb} are too short for spectral estimation "
                         "(need at least 4 samples per block)")
    return [np.ascontiguousarray(x[r * nb:(r + 1) * nb]) for r in range(k)]


@dataclass(eq=False)
class CvSelection:
    value: float
    grid: np.ndarray
    scores: np.ndarray  # mean Mahalanobis distance per candidate


def _fold_eta(eta_full: int, l_full: int, l_fold: int) -> int:
    scaled = int(round(eta_full * l_fold / l_full))
    return int(np.clip(scaled, 1, l_fold - 1))


def cv_select(x, cfg: TuneConfig, vary: str, fixed_params: LspcaParams) -> CvSelection:
    """Blocked cross validation over one parameter grid.

    For each candidate and fold, the model is fit to the average of the
    training folds' spectral matrices; held-out DFT ordinates are then
    scored by their Mahalanobis distance under the fitted localization
    model.  Ties resolve to the smaller candidate.
    """
    if vary not in ("sparsity", "theta"):
        raise ValueError(f"vary must be 'sparsity' or 'theta', got {vary!r}")
    grid = np.sort(np.asarray(cfg.s_grid if vary == "sparsity" else cfg.theta_grid))
    if grid.size == 0:
        raise ValueError("candidate grid is empty")
    blocks = block_folds(x, cfg.k)
    n = np.asarray(x).shape[0]
    n_fold = n // cfg.k
    l_full, l_fold = n // 2, n_fold // 2
    m_full = cfg.m_lags if cfg.m_lags is not None else default_lag_order(n)
    m_fold = min(m_full, n_fold // 2 - 1)
    fold_specs = [truncated_periodogram(b, m_fold, center=cfg.center, taper=cfg.taper)
                  for b in blocks]
    fold_dfts = [dft_frame(b, center=cfg.center) for b in blocks]
    eta_full = fixed_params.eta if fixed_params.eta is not None else int(
        round(cfg.eta_init_frac * l_full))
    eta_fold = _fold_eta(eta_full, l_full, l_fold)

    train_specs, dense_inits, admm_cfgs, sigmas = [], [], [], []
    for r in range(cfg.k):
        mats = np.mean([fold_specs[j].matrices for j in range(cfg.k) if j != r], axis=0)
        spec_r = SpectralEstimate(grid=fold_specs[0].grid, matrices=mats,
                                  m_lags=m_fold, n_samples=n_fold)
        admm_cfg = cfg.admm or default_admm_config(mats[0], cfg.d, n_fold)
        train_specs.append(spec_r)
        admm_cfgs.append(admm_cfg)
        dense_inits.append(fantope_initial_dense(mats[0], cfg.d, admm_cfg))
        # Residual power is estimated once per fold, from a reference fit at
        # the incoming parameters, so candidates are scored against the same
        # baseline: letting each candidate build its own residual pool would
        # reward fits that rank badly (their pool absorbs leftover signal).
        ref_params = replace(fixed_params, eta=eta_fold, m_lags=m_fold, admm=admm_cfg)
        ref_fit = lspca_fit(spec_r, ref_params, dense_init=dense_inits[r])
        train = np.stack([fold_dfts[j] for j in range(cfg.k) if j != r])
        excluded = np.setdiff1d(np.arange(l_fold), power_ranking(ref_fit.h)[:eta_fold])
        sigmas.append(residual_power_matrix(
            train[:, excluded, :].reshape(-1, ref_fit.p),
            calibration_dfts=train.reshape(-1, ref_fit.p)))

    scores = np.empty(grid.size)
    for i, value in enumerate(grid):
        fold_scores = np.empty(cfg.k)
        for r in range(cfg.k):
            if vary == "sparsity":
                params_r = replace(fixed_params, sparsity=int(value), eta=eta_fold,
                                   m_lags=m_fold, admm=admm_cfgs[r])
            else:
                params_r = replace(fixed_params, theta=float(value), eta=eta_fold,
                                   m_lags=m_fold, admm=admm_cfgs[r])
            fit = lspca_fit(train_specs[r], params_r, dense_init=dense_inits[r])
            retained = power_ranking(fit.h)[:eta_fold]
            _, quads = _model_scores(sigmas[r], retained, fit.loadings,
                                     fit.eigenvalues, fold_dfts[r])
            fold_scores[r] = quads.mean()
        scores[i] = fold_scores.mean()
    best = int(np.argmin(scores))  # first strict minimum: favors smaller candidates
    value = grid[best]
    return CvSelection(value=float(value) if vary == "theta" else int(value),
                       grid=grid, scores=scores)


@dataclass(eq=False)
class TuneResult:
    params: LspcaParams
    trace: list


def iterative_tune(x, cfg: TuneConfig) -> TuneResult:
    """Select sparsity, retained-frequency count, and smoothing iteratively.

    The default order per iteration is sparsity (CV), then the frequency
    count (information criterion, without smoothing on the first pass),
    then smoothing (CV); ``cfg.order = "eta_first"`` moves the frequency
    step to the front.  Deterministic given the data.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    l_full = n // 2
    m_full = cfg.m_lags if cfg.m_lags is not None else default_lag_order(n)
    spec = truncated_periodogram(x, m_full, center=cfg.center, taper=cfg.taper)
    dfts = dft_frame(x, center=cfg.center)
    admm_cfg = cfg.admm or default_admm_config(spec.matrices[0], cfg.d, n)
    dense_init = fantope_initial_dense(spec.matrices[0], cfg.d, admm_cfg)

    params = LspcaParams(
        d=cfg.d,
        sparsity=int(max(cfg.s_grid)),  # start from an overestimate
        theta=0.0,
        eta=int(round(cfg.eta_init_frac * l_full)),
        m_lags=m_full,
        admm=admm_cfg,
    )
    steps = {"s_first": ("sparsity", "eta", "theta"),
             "eta_first": ("eta", "sparsity", "theta")}[cfg.order]
    trace: list[dict] = []
    for it in range(cfg.iterations):
        for step in steps:
            if step == "eta":
                fit0 = lspca_fit(spec, params, dense_init=dense_init)
                sel = select_eta(spec, fit0, dfts, criterion=cfg.criterion,
                                 sigma_eta=params.eta)
                params = replace(params, eta=sel.eta)
                trace.append({"iteration": it, "step": "eta", "selected": sel.eta,
                              "criterion": cfg.criterion, "sigma_eta": sel.sigma_eta,
                              "scores": [float(s) for s in sel.scores]})
            else:
                sel = cv_select(x, cfg, step, params)
                params = replace(params, **{step: sel.value})
                trace.append({"iteration": it, "step": step, "selected": sel.value,
                              "grid": [float(g) for g in sel.grid],
                              "scores": [float(s) for s in sel.scores]})
    return TuneResult(params=params, trace=trace)
