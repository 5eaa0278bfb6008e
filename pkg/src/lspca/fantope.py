"""Convex initialization via ADMM over the Fantope.

The feasible set (trace-q real symmetric matrices with eigenvalues in
[0, 1]) is the convex hull of the rank-q projection matrices.  The solver
maximizes ``tr(S Pi) - rho * |Phi|_1`` subject to ``Pi = Phi`` over that
set by alternating a Fantope projection, an entrywise soft threshold, and a
dual update, then averages the primal iterates.  Complex Hermitian inputs
are handled through their real ``2p x 2p`` embedding.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .linalg import (
    _complex_span,
    complex_to_real_embed,
    fix_column_phases,
    hermitian_eig,
    require_hermitian,
)
from .exceptions import NumericalError
from .soap import _sparse_orthonormal, truncate_rows

__all__ = [
    "AdmmConfig",
    "default_admm_config",
    "fantope_project",
    "soft_threshold_matrix",
    "admm_solve",
    "fantope_initial_dense",
    "initial_subspace",
]


@dataclass(frozen=True)
class AdmmConfig:
    """ADMM settings: l1 weight, augmented-Lagrangian weight, iterations,
    and the trace target of the feasible set (2d in the real embedding)."""

    rho: float
    penalty: float
    max_iter: int = 100
    trace_target: int | None = None

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if not self.penalty > 0:
            raise ValueError(f"penalty must be positive, got {self.penalty}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


def default_admm_config(f1, d: int, n: int, rho_scale: float = 1.0,
                        max_iter: int = 100) -> AdmmConfig:
    """Data-driven defaults: ``rho = C lambda_1 sqrt(log p / n)`` with the
    leading eigenvalue taken at the first frequency, and penalty
    ``sqrt(2) p rho / sqrt(d)``."""
    f1 = require_hermitian(f1)
    p = f1.shape[0]
    lam1 = float(np.linalg.eigvalsh(f1)[-1])
    rho = rho_scale * max(lam1, 0.0) * np.sqrt(np.log(p) / n)
    penalty = np.sqrt(2.0) * p * rho / np.sqrt(d) if rho > 0 else 1.0
    return AdmmConfig(rho=rho, penalty=penalty, max_iter=max_iter, trace_target=2 * d)


def _capped_simplex(lam: np.ndarray, q: float, max_iter: int = 200) -> np.ndarray:
    """Euclidean projection of eigenvalues onto {v : sum v = q, 0 <= v <= 1}.

    The KKT solution is ``v_j = clip(lam_j - mu, 0, 1)`` with the scalar
    ``mu`` found by bisection on the monotone map ``mu -> sum v_j(mu)``
    bracketed by ``[min lam - 1, max lam]``.
    """
    lo = float(lam.min()) - 1.0
    hi = float(lam.max())
    for _ in range(max_iter):
        mu = 0.5 * (lo + hi)
        total = float(np.clip(lam - mu, 0.0, 1.0).sum())
        if abs(total - q) <= 1e-13 * max(1.0, q):
            break
        if total > q:
            lo = mu
        else:
            hi = mu
    return np.clip(lam - 0.5 * (lo + hi), 0.0, 1.0)


def fantope_project(s, q: int) -> np.ndarray:
    """Nearest Fantope point (trace q, eigenvalues in [0, 1]) in Frobenius norm."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {s.shape}")
    if not 1 <= q <= s.shape[0]:
        raise ValueError(f"trace target must be in 1..{s.shape[0]}, got {q}")
    sym = 0.5 * (s + s.T)
    lam, qmat = np.linalg.eigh(sym)
    v = _capped_simplex(lam, float(q))
    out = (qmat * v) @ qmat.T
    return 0.5 * (out + out.T)


def soft_threshold_matrix(a, tau: float) -> np.ndarray:
    """Entrywise shrinkage: 0 where |a| <= tau, else sign(a) (|a| - tau)."""
    if tau < 0:
        raise ValueError(f"threshold must be >= 0, got {tau}")
    a = np.asarray(a, dtype=float)
    return np.sign(a) * np.maximum(np.abs(a) - tau, 0.0)


def admm_solve(s, cfg: AdmmConfig, return_history: bool = False):
    """Run the ADMM loop and return the averaged primal iterate.

    The average of the per-iteration Fantope points is itself feasible by
    convexity.  Raises ``NumericalError`` if a non-finite value appears,
    reporting the iteration index.
    """
    s = np.asarray(s, dtype=float)
    q = cfg.trace_target
    if q is None:
        raise ValueError("AdmmConfig.trace_target must be set")
    if not 1 <= q <= s.shape[0]:
        raise ValueError(f"trace target must be in 1..{s.shape[0]}, got {q}")
    beta = cfg.penalty
    pi = np.zeros_like(s)
    phi = np.zeros_like(s)
    theta = np.zeros_like(s)
    acc = np.zeros_like(s)
    history = {"pi": [], "primal_residual": []} if return_history else None
    for t in range(cfg.max_iter):
        pi = fantope_project(phi + theta / beta + s / beta, q)
        phi = soft_threshold_matrix(pi - theta / beta, cfg.rho / beta)
        theta = theta - beta * (pi - phi)
        if not (np.all(np.isfinite(pi)) and np.all(np.isfinite(phi))
                and np.all(np.isfinite(theta))):
            raise NumericalError(f"non-finite ADMM state at iteration {t}")
        acc += pi
        if history is not None:
            history["pi"].append(pi)
            history["primal_residual"].append(float(np.linalg.norm(pi - phi)))
    pibar = acc / cfg.max_iter
    if return_history:
        return pibar, history
    return pibar


def fantope_initial_dense(f1, d: int, cfg: AdmmConfig) -> np.ndarray:
    """Dense complex initialization from the convex relaxation.

    Solves the relaxation on the real embedding of ``f1`` with trace target
    ``2d``, takes the leading ``2d`` eigenvectors of the averaged iterate,
    and maps them back to a ``(p, d)`` complex orthonormal basis.
    """
    f1 = require_hermitian(f1)
    p = f1.shape[0]
    if not 1 <= d <= p:
        raise ValueError(f"rank must be in 1..{p}, got {d}")
    cfg = replace(cfg, trace_target=2 * d)
    pibar = admm_solve(complex_to_real_embed(f1), cfg)
    w_eig, w_vec = hermitian_eig(pibar)
    if 2 * d < 2 * p and w_eig[2 * d - 1] - w_eig[2 * d] < 1e-10:
        warnings.warn(
            "degenerate initialization: eigengap at the subspace boundary is "
            "below 1e-10; proceeding with the solver's stable order",
            RuntimeWarning,
            stacklevel=2,
        )
    w = w_vec[:, : 2 * d]
    # Columns [a; b] encode complex vectors a - i b; pairs collapse to d lines.
    return _complex_span(w[:p] - 1j * w[p:], d)


def initial_subspace(f1, d: int, s_hat: int, cfg: AdmmConfig) -> np.ndarray:
    """Sparse initialization: convex relaxation, row truncation, re-orthonormalize."""
    f1 = require_hermitian(f1)
    p = f1.shape[0]
    if not 1 <= d <= s_hat <= p:
        raise ValueError(f"need 1 <= d <= s <= p, got d={d}, s={s_hat}, p={p}")
    dense = fantope_initial_dense(f1, d, cfg)
    return fix_column_phases(_sparse_orthonormal(truncate_rows(dense, s_hat)))
