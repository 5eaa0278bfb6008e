"""Sparse orthogonal-iteration refinement of a principal subspace.

One refinement pass alternates a multiplication by the spectral matrix,
re-orthonormalization, hard row truncation to the sparsity budget, and a
final re-orthonormalization.  Iterates until the subspace stops moving or
the iteration budget is exhausted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import RankCollapseError, RankDeficientError
from .linalg import require_hermitian, subspace_distance, thin_qr

__all__ = ["SoapConfig", "truncate_rows", "soap_solve"]


@dataclass(frozen=True)
class SoapConfig:
    """Refinement settings: row-sparsity target and stopping rule."""

    sparsity: int
    max_iter: int = 50
    tol: float = 1e-8

    def __post_init__(self):
        if self.sparsity < 1:
            raise ValueError(f"sparsity must be >= 1, got {self.sparsity}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")


def truncate_rows(v, s_hat: int) -> np.ndarray:
    """Zero all rows outside the ``s_hat`` largest row norms.

    Ties at the boundary keep the lowest row index.  The result has at most
    ``s_hat`` nonzero rows.
    """
    v = np.asarray(v)
    p = v.shape[0]
    if not 1 <= s_hat <= p:
        raise ValueError(f"row budget must be in 1..{p}, got {s_hat}")
    norms = np.linalg.norm(np.atleast_2d(v), axis=1)
    keep = np.argsort(-norms, kind="stable")[:s_hat]
    out = np.zeros_like(v)
    out[keep] = v[keep]
    return out


def _sparse_orthonormal(v):
    """Orthonormalize while keeping the truncated rows exactly zero.

    Householder QR leaves O(eps) residue in rows that are exactly zero on
    input; those rows are re-zeroed so the row-support bound is exact.
    """
    q, _ = thin_qr(v)
    q[np.linalg.norm(np.atleast_2d(v), axis=1) == 0.0] = 0.0
    return q


def soap_solve(h, u_init, cfg: SoapConfig, return_history: bool = False):
    """Refine an initial orthonormal basis against one spectral matrix.

    Each iteration maps ``U -> QR(truncate(QR(H U)))``.  Stops after
    ``cfg.max_iter`` iterations or once the subspace distance between
    successive iterates drops below ``cfg.tol`` without growing.  An exact
    non-dominant eigenbasis is a stationary saddle of the iteration, so
    the start receives a small deterministic jitter (64 tol): from a
    saddle the jittered component grows geometrically and keeps the
    iteration alive, while near the optimum it contracts within a few
    iterations.  Raises ``RankCollapseError`` when ``H U`` loses column
    rank (e.g. the iterate drifted into the null space); callers typically
    fall back to a fresh convex initialization.
    """
    h = require_hermitian(h)
    u_init = np.asarray(u_init)
    p, d = u_init.shape
    if not d <= cfg.sparsity <= p:
        raise ValueError(
            f"sparsity must satisfy d <= s <= p, got s={cfg.sparsity}, d={d}, p={p}"
        )
    try:
        u = _sparse_orthonormal(truncate_rows(u_init, cfg.sparsity))
        noise = np.random.default_rng(0).standard_normal((2, p, d))
        delta = max(64.0 * cfg.tol, 1e-9)
        u, _ = thin_qr(u + delta * (noise[0] + 1j * noise[1]))
    except RankDeficientError as exc:
        raise RankCollapseError(f"initial basis collapsed under truncation: {exc}") from exc

    history = {"subspaces": [u], "moved": []} if return_history else None
    prev_moved = None
    for _ in range(cfg.max_iter):
        try:
            v, _ = thin_qr(h @ u)
            u_new = _sparse_orthonormal(truncate_rows(v, cfg.sparsity))
        except RankDeficientError as exc:
            raise RankCollapseError(f"iterate collapsed to lower rank: {exc}") from exc
        moved = subspace_distance(u_new, u)
        u = u_new
        if history is not None:
            history["subspaces"].append(u)
            history["moved"].append(moved)
        if moved < cfg.tol and prev_moved is not None and moved <= prev_moved:
            break
        prev_moved = moved
    if return_history:
        return u, history
    return u
