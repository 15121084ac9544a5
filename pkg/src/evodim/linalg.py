"""Small numerical helpers shared across modules."""

from __future__ import annotations

import numpy as np

DEFAULT_RANK_TOL = 1e-9


def numerical_rank(singular_values, tol: float = DEFAULT_RANK_TOL, floor: float = 0.0) -> int:
    """Count singular values above ``tol * max(s_max, floor)``.

    ``floor`` keeps an all-roundoff spectrum from being counted as full
    rank when the exact answer is zero.
    """
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0:
        return 0
    cutoff = tol * max(float(s.max()), floor)
    if cutoff == 0.0:
        return 0
    return int(np.count_nonzero(s > cutoff))


def krylov_basis(
    op, start: np.ndarray, max_dim: int, tol: float = DEFAULT_RANK_TOL, floor: float = 0.0
) -> np.ndarray:
    """Orthonormal basis (rows) of ``span{start, op(start), op^2(start), ...}``.

    Built by Arnoldi iteration with reorthogonalization.  A new direction is
    accepted when its component orthogonal to the current basis exceeds
    ``tol`` times its own norm.  This is far better conditioned than taking
    the SVD of the raw power sequence, whose columns decay geometrically.
    A start vector with norm at most ``tol * floor`` counts as zero.
    """
    v = np.asarray(start).ravel()
    norm = np.linalg.norm(v)
    if norm == 0.0 or norm <= tol * floor:
        return np.zeros((0, v.size), dtype=v.dtype)
    basis = [v / norm]
    while len(basis) < max_dim:
        w = np.asarray(op(basis[-1])).ravel()
        w_norm = np.linalg.norm(w)
        if w_norm == 0.0:
            break
        q = np.array(basis)
        for _ in range(2):
            w = w - q.T @ (q.conj() @ w)
        resid = np.linalg.norm(w)
        if resid <= tol * w_norm:
            break
        basis.append(w / resid)
    return np.array(basis)


def krylov_rank(op, start, max_dim: int, tol: float = DEFAULT_RANK_TOL, floor: float = 0.0) -> int:
    return len(krylov_basis(op, start, max_dim, tol, floor))


def hermitian_to_real(h: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix in an orthonormal basis.

    The map is an isometry from Hermitian matrices with the Hilbert-Schmidt
    inner product ``tr[A B]`` onto ``R^(d*d)``.
    """
    d = h.shape[0]
    iu = np.triu_indices(d, k=1)
    off = h[iu]
    return np.concatenate(
        [np.real(np.diag(h)), np.sqrt(2.0) * off.real, np.sqrt(2.0) * off.imag]
    )


def real_to_hermitian(x: np.ndarray, d: int) -> np.ndarray:
    """Inverse of :func:`hermitian_to_real`."""
    h = np.diag(np.asarray(x[:d], dtype=complex))
    iu = np.triu_indices(d, k=1)
    k = len(iu[0])
    off = (x[d : d + k] + 1j * x[d + k : d + 2 * k]) / np.sqrt(2.0)
    h[iu] = off
    h[(iu[1], iu[0])] = off.conj()
    return h


def operator_norm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))
