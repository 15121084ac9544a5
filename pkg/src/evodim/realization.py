"""Hankel-rank estimation and minimal linear realizations.

The rank of the Hankel matrix of a sequence counts the linearly independent
delayed vectors and therefore bounds the Hilbert-space dimension of any
Markovian quantum model producing it.  When the sequence is known only up to
a perturbation of operator norm ``epsilon``, the number of singular values
above ``epsilon`` is still a lower bound on the rank.

A minimal realization ``a(t) = <l| m^t |r>`` is read off a balanced SVD of
the Hankel matrix and its shift, and can be brought into contractive form by
a similarity transformation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import (
    InconsistentDimension,
    InvalidParameter,
    RankDeficiencyNotReached,
    UnboundedRealization,
    UnitCircleJordanBlock,
)
from .linalg import DEFAULT_RANK_TOL, numerical_rank, operator_norm
from .sequences import HankelPair, RealSequence, build_hankel

RADIUS_TOL = 1e-10
JORDAN_COND_MAX = 1e8
DELTA_MIN = 1e-8


@dataclass(frozen=True, eq=False)
class RankReport:
    n: int
    singular_values: np.ndarray
    epsilon: float
    dim_v_lower: int
    dim_v_exact_if_clean: int

    @property
    def dim_v(self) -> int:
        """Rank estimate: the noise-aware bound, or the clean rank if ``epsilon == 0``."""
        return self.dim_v_lower if self.epsilon > 0 else self.dim_v_exact_if_clean


def effective_rank(hankel: HankelPair | np.ndarray, epsilon: float = 0.0,
                   rank_tol: float = DEFAULT_RANK_TOL) -> RankReport:
    """Singular-value rank analysis of ``hankel.v``.

    A plain matrix (e.g. a stacked multi-observable Hankel matrix) is
    accepted in place of a :class:`HankelPair`.

    ``dim_v_lower`` is the smallest ``k`` with ``s_{k+1} <= epsilon``.  If the
    observed matrix differs from the noiseless one by at most ``epsilon`` in
    operator norm, the noiseless rank is at least ``dim_v_lower``.
    """
    if epsilon < 0:
        raise InvalidParameter(f"epsilon must be >= 0, got {epsilon}")
    matrix = hankel.v if isinstance(hankel, HankelPair) else np.asarray(hankel)
    s = la.svdvals(matrix)
    above = s > epsilon
    dim_lower = int(np.argmin(above)) if not above.all() else s.size
    return RankReport(
        n=matrix.shape[1],
        singular_values=s,
        epsilon=float(epsilon),
        dim_v_lower=dim_lower,
        dim_v_exact_if_clean=numerical_rank(s, rank_tol),
    )


def noise_epsilon(sigma: float, n: int, confidence: float = 0.99) -> float:
    """Operator-norm bound for the Hankel matrix of i.i.d. Gaussian noise.

    The ``n x n`` Hankel matrix of ``2n - 1`` samples is (up to a flip) a
    block of a circulant matrix, whose norm is the largest modulus of the
    sample DFT.  Each squared DFT modulus is exponential with mean
    ``(2n - 1) sigma^2``, so a union bound gives
    ``P(||E|| > eps) <= 1 - confidence`` for the value returned here.
    """
    if sigma < 0:
        raise InvalidParameter(f"sigma must be >= 0, got {sigma}")
    if not 0 < confidence < 1:
        raise InvalidParameter(f"confidence must lie in (0, 1), got {confidence}")
    m = 2 * n - 1
    return float(sigma * math.sqrt(m * math.log(m / (1.0 - confidence))))


@dataclass(frozen=True)
class DimensionBounds:
    dim_v: int
    d_min: int
    dim_c_max_given_d: int | None = None
    d_e_min_given_ds: int | None = None


def dimension_bounds(rank_report: RankReport | int, known_d: int | None = None,
                     known_ds: int | None = None) -> DimensionBounds:
    """Consequences of ``dim C + dim V <= d^2 + 1`` with ``dim C >= 1``.

    ``rank_report`` may also be a plain integer ``dim V``.
    """
    dim_v = rank_report if isinstance(rank_report, int) else rank_report.dim_v
    if dim_v < 0:
        raise InvalidParameter(f"dim_v must be >= 0, got {dim_v}")
    root = math.isqrt(dim_v)
    d_min = max(1, root if root * root == dim_v else root + 1)
    dim_c_max = None
    if known_d is not None:
        if known_d < 1 or known_d * known_d < dim_v:
            raise InconsistentDimension(
                f"d={known_d} cannot produce dim V={dim_v}: need d >= {d_min}",
                invariant="d^2 >= dim V",
                residual=dim_v - known_d * known_d,
            )
        dim_c_max = known_d * known_d + 1 - dim_v
    d_e_min = None
    if known_ds is not None:
        if known_ds < 1:
            raise InvalidParameter(f"known_ds must be >= 1, got {known_ds}")
        d_e_min = max(0, d_min - known_ds)
    return DimensionBounds(dim_v=dim_v, d_min=d_min, dim_c_max_given_d=dim_c_max,
                           d_e_min_given_ds=d_e_min)


@dataclass(frozen=True, eq=False)
class LinearRealization:
    """``a(t) = <l_vec| m^t |r_vec>`` with ``<l|`` the conjugate transpose of ``l_vec``."""

    m: np.ndarray
    l_vec: np.ndarray
    r_vec: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=complex, copy=True)
        l_vec = np.array(self.l_vec, dtype=complex, copy=True).ravel()
        r_vec = np.array(self.r_vec, dtype=complex, copy=True).ravel()
        r = m.shape[0]
        if m.ndim != 2 or m.shape != (r, r) or r == 0:
            raise InvalidParameter(f"m must be a nonempty square matrix, got shape {m.shape}")
        if l_vec.size != r or r_vec.size != r:
            raise InvalidParameter(f"l and r must have length {r}")
        for arr in (m, l_vec, r_vec):
            arr.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "l_vec", l_vec)
        object.__setattr__(self, "r_vec", r_vec)

    @property
    def r(self) -> int:
        return self.m.shape[0]

    @property
    def contraction_norm(self) -> float:
        return operator_norm(self.m)

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.m))))

    def evaluate(self, steps: int) -> np.ndarray:
        """Complex values ``<l| m^t |r>`` for ``t < steps``."""
        out = np.empty(steps, dtype=complex)
        x = np.array(self.r_vec)
        for t in range(steps):
            out[t] = np.vdot(self.l_vec, x)
            x = self.m @ x
        return out

    def sequence(self, steps: int) -> RealSequence:
        return RealSequence(self.evaluate(steps).real)


def linear_realization(seq: RealSequence, n: int | None = None,
                       rank_tol: float = DEFAULT_RANK_TOL) -> LinearRealization:
    """Minimal realization from the Hankel pair of size ``n``.

    With ``V = U S W^T`` truncated to the numerical rank ``r``, the balanced
    factors ``V_L = U_r S_r^(1/2)`` and ``V_R = S_r^(1/2) W_r^T`` give
    ``m = V_L^+ V' V_R^+``, ``r_vec`` the first column of ``V_R`` and ``<l|``
    the first row of ``V_L``.

    Raises
    ------
    RankDeficiencyNotReached
        If the Hankel matrix has full numerical rank, so ``n`` does not yet
        exceed the dimension of the delay space.
    """
    pair = build_hankel(seq, n)
    u, s, wh = la.svd(pair.v)
    r = numerical_rank(s, rank_tol)
    if r >= pair.n:
        raise RankDeficiencyNotReached(
            f"Hankel matrix of size {pair.n} has full numerical rank; "
            "increase the Hankel size or supply more samples"
        )
    if r == 0:
        return LinearRealization(m=np.zeros((1, 1)), l_vec=np.zeros(1), r_vec=np.zeros(1))
    root = np.sqrt(s[:r])
    v_left = u[:, :r] * root
    v_right = root[:, None] * wh[:r]
    m = (u[:, :r].T @ pair.v_shift @ wh[:r].T) / np.outer(root, root)
    return LinearRealization(m=m, l_vec=v_left[0].conj(), r_vec=v_right[:, 0])


def _graded_contraction(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale an upper-triangular block by ``diag(delta^i)`` until it contracts.

    Returns the scaled block and the exponent vector ``delta ** i``.
    """
    k = block.shape[0]
    expo = np.arange(k)
    gap = np.subtract.outer(expo, expo).T  # j - i
    delta = 1.0
    while delta >= DELTA_MIN:
        with np.errstate(under="ignore"):
            scaled = np.triu(block * np.power(delta, np.maximum(gap, 0)))
        if operator_norm(scaled) <= 1.0:
            return scaled, np.power(delta, expo.astype(float))
        delta /= 2.0
    raise UnitCircleJordanBlock(
        "no graded diagonal scaling down to delta=1e-8 makes the realization contractive"
    )


def enforce_contraction(real: LinearRealization, margin_tol: float = 1e-6) -> LinearRealization:
    """Similarity-transform ``real`` so that ``||m|| <= 1``.

    Eigenvalues with ``|lambda| >= 1 - margin_tol`` are split off from the
    rest of a sorted Schur form by solving a Sylvester equation and then
    diagonalized.  A near-defective eigenvector basis there means a Jordan
    block on the unit circle, which only an unbounded sequence can have.
    The remaining triangular block is contracted by the graded scaling
    ``diag(delta, delta^2, ...)`` with ``delta`` halved until the norm is at
    most one.

    Unimodular eigenvalues estimated slightly outside the unit disc (within
    ``1e-10``) are moved radially onto it.
    """
    radius = real.spectral_radius
    if radius > 1.0 + RADIUS_TOL:
        raise UnboundedRealization(f"spectral radius {radius:.12g} exceeds 1")

    t, z, k = la.schur(real.m, output="complex", sort=lambda x: abs(x) >= 1.0 - margin_tol)
    r = real.r
    outer = np.eye(r, dtype=complex)  # accumulates the basis change: m = B m' B^-1
    inner_left = np.eye(r, dtype=complex)
    if 0 < k < r:
        y = la.solve_sylvester(t[:k, :k], -t[k:, k:], -t[:k, k:])
        outer[:k, k:] = y
        inner_left[:k, k:] = -y

    m_new = np.zeros((r, r), dtype=complex)
    basis = z @ outer
    basis_inv_rows = inner_left @ z.conj().T

    if k:
        w, vecs = np.linalg.eig(t[:k, :k])
        cond = np.linalg.cond(vecs)
        if not np.isfinite(cond) or cond > JORDAN_COND_MAX:
            raise UnitCircleJordanBlock(
                f"eigenvalues near the unit circle have Jordan structure "
                f"(eigenvector condition number {cond:.3e})"
            )
        mod = np.abs(w)
        w = np.where(mod > 1.0, w / mod, w)
        m_new[:k, :k] = np.diag(w)
        basis[:, :k] = basis[:, :k] @ vecs
        basis_inv_rows[:k] = np.linalg.solve(vecs, basis_inv_rows[:k])

    if k < r:
        scaled, grade = _graded_contraction(t[k:, k:])
        m_new[k:, k:] = scaled
        basis[:, k:] = basis[:, k:] * grade
        with np.errstate(over="raise"):
            basis_inv_rows[k:] = basis_inv_rows[k:] / grade[:, None]

    return LinearRealization(
        m=m_new,
        l_vec=basis.conj().T @ real.l_vec,
        r_vec=basis_inv_rows @ real.r_vec,
    )
