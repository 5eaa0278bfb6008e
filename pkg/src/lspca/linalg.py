"""Complex linear-algebra primitives shared by the solvers.

Conventions used throughout the package:

* Hermitian matrices are plain complex ``(p, p)`` arrays satisfying
  ``H == H.conj().T`` within ``HERMITIAN_TOL``.
* Subspace bases are ``(p, d)`` arrays with orthonormal columns
  (``V.conj().T @ V == I`` within ``ORTHONORMAL_TOL``).
* Eigendecompositions sort eigenvalues in descending order and fix the
  otherwise-arbitrary per-column phase by making the first nonzero
  component of each eigenvector real and positive.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DegenerateEmbeddingError, RankDeficientError

HERMITIAN_TOL = 1e-12
ORTHONORMAL_TOL = 1e-10

__all__ = [
    "HERMITIAN_TOL",
    "ORTHONORMAL_TOL",
    "require_hermitian",
    "is_orthonormal",
    "row_support",
    "projection",
    "subspace_distance",
    "fix_column_phases",
    "hermitian_eig",
    "thin_qr",
    "complex_to_real_embed",
    "real_to_complex_subspace",
]


def require_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate that ``h`` is square and Hermitian within ``tol``.

    Returns ``h`` as an ndarray.  Raises ``ValueError`` otherwise.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 0.0)
    if float(np.max(np.abs(h - h.conj().T))) > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return h


def is_orthonormal(v, tol: float = ORTHONORMAL_TOL) -> bool:
    """True when the columns of ``v`` are orthonormal within ``tol`` (Frobenius)."""
    v = np.asarray(v)
    gram = v.conj().T @ v
    return float(np.linalg.norm(gram - np.eye(v.shape[1]))) <= tol


def row_support(v, tol: float = 0.0) -> np.ndarray:
    """Indices of rows of ``v`` with Euclidean norm strictly above ``tol``."""
    norms = np.linalg.norm(np.atleast_2d(np.asarray(v)), axis=1)
    return np.flatnonzero(norms > tol)


def projection(v) -> np.ndarray:
    """Orthogonal projection matrix ``V V^H`` onto the column span of ``v``."""
    v = np.asarray(v)
    return v @ v.conj().T


def subspace_distance(a, b) -> float:
    """Frobenius distance between the projection matrices of two subspaces.

    Both arguments are ``(p, d)`` orthonormal bases of the same shape.  The
    value lies in ``[0, sqrt(2 d)]`` and is invariant under right-unitary
    changes of basis.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(projection(a) - projection(b)))


def fix_column_phases(v, tol: float = 1e-12) -> np.ndarray:
    """Rotate each column by a unit scalar so its first nonzero entry is
    real and positive.  Columns that are numerically zero are left alone."""
    v = np.array(v, copy=True)
    if v.ndim == 1:
        v = v[:, None]
    for k in range(v.shape[1]):
        col = v[:, k]
        mags = np.abs(col)
        top = mags.max()
        if top <= 0.0:
            continue
        lead = int(np.flatnonzero(mags > tol * top)[0])
        phase = col[lead] / mags[lead]
        v[:, k] = col * np.conj(phase)
    return v


def hermitian_eig(h):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` real and sorted descending and
    eigenvector columns ``v`` phase-fixed for reproducibility.
    """
    h = np.asarray(h)
    sym = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(sym)
    w = w[::-1].copy()
    v = fix_column_phases(v[:, ::-1])
    return w, v


def thin_qr(mtx):
    """Reduced QR factorization with a real nonnegative diagonal of R.

    The input must have full column rank: its smallest singular value must
    exceed ``1e-12`` times the largest, otherwise ``RankDeficientError`` is
    raised.
    """
    mtx = np.asarray(mtx)
    if mtx.ndim != 2 or mtx.shape[0] < mtx.shape[1]:
        raise ValueError(f"expected a tall (p, d) matrix, got shape {mtx.shape}")
    sv = np.linalg.svd(mtx, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= 1e-12 * sv[0]:
        raise RankDeficientError(
            f"rank-deficient input: singular values span {sv[-1]:.3e} .. {sv[0]:.3e}"
        )
    q, r = np.linalg.qr(mtx)
    diag = np.diagonal(r).copy()
    phase = diag / np.abs(diag)
    q = q * phase[None, :]
    r = np.conj(phase)[:, None] * r
    return q, r


def complex_to_real_embed(h) -> np.ndarray:
    """Real ``(2p, 2p)`` embedding ``[[Re H, Im H], [-Im H, Re H]]``.

    The embedding is an algebra homomorphism; a Hermitian input maps to a
    symmetric output whose spectrum is that of ``h`` with every eigenvalue
    duplicated.
    """
    h = require_hermitian(h)
    re, im = h.real, h.imag
    return np.block([[re, im], [-im, re]])


def _complex_span(v_raw, d: int) -> np.ndarray:
    """Orthonormal basis of the d-dimensional complex span of ``v_raw`` columns."""
    u, _, _ = np.linalg.svd(v_raw, full_matrices=False)
    return fix_column_phases(u[:, :d])


def real_to_complex_subspace(w, tol: float = 1e-6) -> np.ndarray:
    """Invert the real embedding on a pair-closed ``(2p, 2d)`` orthonormal basis.

    ``w`` must span a subspace that is invariant under the pairing map
    ``J = [[0, I], [-I, 0]]`` within ``tol``; such subspaces are exactly the
    embeddings of d-dimensional complex subspaces.  Returns a ``(p, d)``
    orthonormal complex basis whose projection embeds back into ``span(w)``.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] % 2 or w.shape[1] % 2:
        raise ValueError(f"expected even-dimensional (2p, 2d) basis, got {w.shape}")
    p, d = w.shape[0] // 2, w.shape[1] // 2
    jw = np.vstack([w[p:], -w[:p]])
    resid = jw - w @ (w.T @ jw)
    closure = float(np.linalg.norm(resid))
    if closure > tol * np.sqrt(2 * d):
        raise DegenerateEmbeddingError(
            f"subspace not closed under the pairing map (residual {closure:.3e})"
        )
    # Each real column [a; b] encodes the complex vector a - i b; the two
    # members of a J-pair land on the same complex line.
    basis = _complex_span(w[:p] - 1j * w[p:], d)
    back = complex_to_real_embed(projection(basis))
    if float(np.linalg.norm(back - w @ w.T)) > tol * np.sqrt(2 * d):
        raise DegenerateEmbeddingError("embedding round-trip exceeded tolerance")
    return basis
