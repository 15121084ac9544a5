"""Finite-dimensional quantum models.

States, observables and Kraus channels, the expectation-value sequence
``a(t) = tr[A T^t(rho)]`` they generate, and the numerical quantities that
govern its Hankel rank: the space of conserved quantities and the
ergodicity of the Schroedinger and Heisenberg orbits.

Matrices are vectorized row-major (``numpy.ravel``), i.e. ``|i><j|`` maps to
``|i>|j>``.  In that convention the channel acts on ``vec(rho)`` as
``sum_k K_k (x) conj(K_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidParameter, ValidationError
from .linalg import (
    DEFAULT_RANK_TOL,
    hermitian_to_real,
    krylov_basis,
    krylov_rank,
    real_to_hermitian,
)
from .sequences import RealSequence

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
TP_TOL = 1e-10


def _square(mat, name: str) -> np.ndarray:
    mat = np.array(mat, dtype=complex, copy=True)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
        raise ValidationError(f"{name} must be a nonempty square matrix, got shape {mat.shape}",
                              invariant="square")
    if not np.all(np.isfinite(mat)):
        raise ValidationError(f"{name} has non-finite entries", invariant="finite entries")
    return mat


def _check_hermitian(mat: np.ndarray, name: str) -> None:
    resid = float(np.max(np.abs(mat - mat.conj().T)))
    if resid > HERMITIAN_TOL:
        raise ValidationError(
            f"{name} is not Hermitian: max|M - M^dagger| = {resid:.3e} > {HERMITIAN_TOL:g}",
            invariant="Hermitian",
            residual=resid,
        )


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    mat: np.ndarray

    def __post_init__(self):
        mat = _square(self.mat, "density matrix")
        _check_hermitian(mat, "density matrix")
        tr_err = abs(np.trace(mat) - 1.0)
        if tr_err > TRACE_TOL:
            raise ValidationError(
                f"density matrix trace differs from 1 by {tr_err:.3e}",
                invariant="unit trace",
                residual=tr_err,
            )
        min_eig = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2).min())
        if min_eig < -PSD_TOL:
            raise ValidationError(
                f"density matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}",
                invariant="positive semidefinite",
                residual=min_eig,
            )
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def d(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True, eq=False)
class Observable:
    mat: np.ndarray

    def __post_init__(self):
        mat = _square(self.mat, "observable")
        _check_hermitian(mat, "observable")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def d(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Trace-preserving completely positive map ``rho -> sum_k K_k rho K_k^dagger``."""

    kraus: tuple

    def __post_init__(self):
        ops = [_square(k, "Kraus operator") for k in self.kraus]
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator",
                                  invariant="nonempty Kraus list")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise DimensionMismatch("Kraus operators must share one dimension",
                                    invariant="equal dimensions")
        resid = tp_residual(ops)
        if resid > TP_TOL:
            raise ValidationError(
                f"channel is not trace preserving: max|sum K^dagger K - 1| = {resid:.3e}",
                invariant="trace preservation",
                residual=resid,
            )
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", tuple(ops))

    @property
    def d(self) -> int:
        return self.kraus[0].shape[0]

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        """Schroedinger-picture action on a matrix."""
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    def adjoint(self, a: np.ndarray) -> np.ndarray:
        """Heisenberg-picture action, ``tr[A T(rho)] = tr[T*(A) rho]``."""
        return sum(k.conj().T @ a @ k for k in self.kraus)

    @classmethod
    def identity(cls, d: int) -> "KrausChannel":
        return cls((np.eye(d),))

    @classmethod
    def unitary(cls, u) -> "KrausChannel":
        return cls((np.asarray(u),))


def tp_residual(kraus) -> float:
    """Largest entry of ``|sum_k K_k^dagger K_k - 1|``."""
    d = kraus[0].shape[0]
    gram = sum(k.conj().T @ k for k in kraus)
    return float(np.max(np.abs(gram - np.eye(d))))


def _match(channel: KrausChannel, *others) -> None:
    for obj in others:
        if obj.d != channel.d:
            raise DimensionMismatch(
                f"dimension mismatch: channel acts on d={channel.d}, "
                f"{type(obj).__name__} has d={obj.d}",
                invariant="matching dimension",
            )


def evolve_expectations(
    channel: KrausChannel, rho: DensityMatrix, a: Observable, steps: int
) -> RealSequence:
    """Return ``tr[A T^t(rho)]`` for ``t = 0 .. steps - 1``.

    The state is propagated by one channel application per step.
    """
    _match(channel, rho, a)
    if steps < 1:
        raise InvalidParameter(f"steps must be positive, got {steps}")
    out = np.empty(steps)
    state = np.array(rho.mat)
    obs_t = a.mat.T
    for t in range(steps):
        # tr[A rho] without forming the product
        out[t] = np.sum(obs_t * state).real
        state = channel(state)
    return RealSequence(out)


def transfer_matrix(channel: KrausChannel) -> np.ndarray:
    """``sum_k K_k (x) conj(K_k)``, acting on row-major ``vec(rho)``."""
    return sum(np.kron(k, k.conj()) for k in channel.kraus)


@dataclass(frozen=True, eq=False)
class ConservedSpace:
    """Hermitian ``H`` with ``tr[H T^t(rho)]`` independent of ``t``."""

    d: int
    basis: tuple

    @property
    def dim_c(self) -> int:
        return len(self.basis)


def conserved_space(
    channel: KrausChannel, rho: DensityMatrix, tol: float = DEFAULT_RANK_TOL
) -> ConservedSpace:
    """Compute the space of conserved quantities for ``(channel, rho)``.

    The conserved space is the Hilbert-Schmidt orthogonal complement, among
    Hermitian matrices, of ``span{T^t(rho) - rho : t >= 1}``.  That span
    equals the Krylov space of ``T`` started at ``T(rho) - rho`` and is
    computed by Arnoldi iteration, capped at ``d*d`` directions.
    """
    _match(channel, rho)
    if tol <= 0:
        raise InvalidParameter(f"tol must be positive, got {tol}")
    d = channel.d
    start = hermitian_to_real(channel(rho.mat) - rho.mat)

    def step(x):
        return hermitian_to_real(channel(real_to_hermitian(x, d)))

    moving = krylov_basis(step, start, d * d, tol=tol, floor=np.linalg.norm(rho.mat))
    if moving.shape[0] == 0:
        complement = np.eye(d * d)
    else:
        # rows of vh beyond the rank span the orthogonal complement
        _, _, vh = np.linalg.svd(moving, full_matrices=True)
        complement = vh[moving.shape[0]:]
    basis = tuple(real_to_hermitian(x, d) for x in complement)
    return ConservedSpace(d=d, basis=basis)


@dataclass(frozen=True)
class ErgodicityReport:
    ergodic_wrt_observable: bool
    ergodic_wrt_state: bool


def ergodicity_report(
    channel: KrausChannel, rho: DensityMatrix, a: Observable, tol: float = DEFAULT_RANK_TOL
) -> ErgodicityReport:
    """Check whether the Schroedinger orbit of ``rho`` and the Heisenberg
    orbit of ``a`` each span all ``d x d`` matrices."""
    _match(channel, rho, a)
    d = channel.d
    full = d * d

    def forward(x):
        return channel(x.reshape(d, d)).ravel()

    def backward(x):
        return channel.adjoint(x.reshape(d, d)).ravel()

    return ErgodicityReport(
        ergodic_wrt_observable=krylov_rank(backward, a.mat, full, tol) == full,
        ergodic_wrt_state=krylov_rank(forward, rho.mat, full, tol) == full,
    )


# -- random instances ----------------------------------------------------------


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def _haar_isometry(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, rows, cols))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix, phases fixed)."""
    return _haar_isometry(rng, d, d)


def random_channel(rng: np.random.Generator, d: int, kraus_count: int) -> KrausChannel:
    iso = _haar_isometry(rng, d * kraus_count, d)
    return KrausChannel(tuple(iso[j * d:(j + 1) * d] for j in range(kraus_count)))


def random_state(rng: np.random.Generator, d: int) -> DensityMatrix:
    g = _ginibre(rng, d, d)
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho / np.trace(rho).real)


def random_observable(rng: np.random.Generator, d: int) -> Observable:
    g = _ginibre(rng, d, d)
    return Observable((g + g.conj().T) / 2)


def random_instance(kind: str, d: int, kraus_count: int = 1, seed: int = 0):
    """Draw a random ``unitary``, ``channel``, ``state`` or ``observable``.

    The result depends only on the arguments.  ``unitary`` returns a
    single-Kraus :class:`KrausChannel`.
    """
    if d < 1:
        raise InvalidParameter(f"d must be >= 1, got {d}")
    if kraus_count < 1:
        raise InvalidParameter(f"kraus_count must be >= 1, got {kraus_count}")
    if not 0 <= seed < 2**64:
        raise InvalidParameter(f"seed must be an unsigned 64-bit integer, got {seed}")
    rng = np.random.default_rng(seed)
    if kind == "unitary":
        return KrausChannel.unitary(random_unitary(rng, d))
    if kind == "channel":
        return random_channel(rng, d, kraus_count)
    if kind == "state":
        return random_state(rng, d)
    if kind == "observable":
        return random_observable(rng, d)
    raise InvalidParameter(f"unknown kind {kind!r}")
