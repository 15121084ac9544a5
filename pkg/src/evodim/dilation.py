"""Quantum models for given sequences.

Any real sequence with a contractive realization ``a(t) = <L| M^t |R>`` of
size ``r`` is reproduced by a channel on ``C^(r+2)``.  The Kraus operator
``C = 1 (+) M`` plus the vector ``Psi = (1, R)`` and the Hermitian form
``B = (|e0><0 (+) L| + h.c.) / 2`` realize the sequence with a completely
positive map; a further absorbing level collects the weight
``1 - K^dagger K`` lost by ``K = 0 (+) C`` and makes it trace preserving.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonRealSequence, NotAContraction
from .quantum import DensityMatrix, KrausChannel, Observable, tp_residual
from .realization import LinearRealization

CONTRACTION_TOL = 1e-10
CLIP_TOL = 1e-12
REAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QuantumRealization:
    channel: KrausChannel
    rho: DensityMatrix
    a: Observable

    @property
    def dim(self) -> int:
        return self.channel.d


def _check_real(real: LinearRealization) -> None:
    # a sequence of a size-r realization is fixed by its first 2r values
    vals = real.evaluate(2 * real.r + 2)
    scale = max(float(np.max(np.abs(vals))), np.linalg.norm(real.l_vec) * np.linalg.norm(real.r_vec))
    imag = float(np.max(np.abs(vals.imag)))
    if imag > REAL_TOL * max(scale, 1.0):
        raise NonRealSequence(
            f"realization produces complex values (max imaginary part {imag:.3e})",
            invariant="real-valued sequence",
            residual=imag,
        )


def quantum_realization(real: LinearRealization) -> QuantumRealization:
    """Build ``(T, rho, A)`` of dimension ``r + 2`` with ``tr[A T^t(rho)] = <L|M^t|R>``.

    Raises
    ------
    NotAContraction
        If ``||M|| > 1 + 1e-10``; run :func:`enforce_contraction` first.
    NonRealSequence
        If the realization yields complex values.
    """
    norm = real.contraction_norm
    if norm > 1.0 + CONTRACTION_TOL:
        raise NotAContraction(
            f"realization matrix has operator norm {norm:.12g} > 1",
            invariant="||M|| <= 1",
            residual=norm - 1.0,
        )
    _check_real(real)

    r = real.r
    dim = r + 2
    # inner block structure C (+) C^r, embedded at outer indices 1 .. r+1
    c = np.zeros((r + 1, r + 1), dtype=complex)
    c[0, 0] = 1.0
    c[1:, 1:] = real.m
    psi = np.concatenate([[1.0], real.r_vec])
    ell = np.concatenate([[0.0], real.l_vec])
    e0 = np.zeros(r + 1)
    e0[0] = 1.0
    half = np.outer(e0, ell.conj())
    b = (half + half.conj().T) / 2

    psi_norm2 = 1.0 + float(np.vdot(real.r_vec, real.r_vec).real)
    k = np.zeros((dim, dim), dtype=complex)
    k[1:, 1:] = c
    a = np.zeros((dim, dim), dtype=complex)
    a[1:, 1:] = b * psi_norm2
    rho = np.zeros((dim, dim), dtype=complex)
    rho[1:, 1:] = np.outer(psi, psi.conj()) / psi_norm2

    defect = np.eye(dim) - k.conj().T @ k
    mu, f = np.linalg.eigh((defect + defect.conj().T) / 2)
    if mu.min() < -CLIP_TOL:
        raise NotAContraction(
            f"1 - K^dagger K has eigenvalue {mu.min():.3e}",
            invariant="K^dagger K <= 1",
            residual=float(mu.min()),
        )
    mu = np.clip(mu, 0.0, None)
    kraus = [k]
    for weight, vec in zip(mu, f.T):
        if weight > 0.0:
            op = np.zeros((dim, dim), dtype=complex)
            op[0] = np.sqrt(weight) * vec.conj()
            kraus.append(op)
    return QuantumRealization(
        channel=KrausChannel(tuple(kraus)), rho=DensityMatrix(rho), a=Observable(a)
    )


@dataclass(frozen=True)
class CPTPReport:
    trace_preserving_residual: float
    choi_min_eigenvalue: float
    passed: bool


def choi_matrix(kraus) -> np.ndarray:
    """``sum_ij |i><j| (x) T(|i><j|)`` for ``T`` given by Kraus operators."""
    d = kraus[0].shape[0]
    choi = np.zeros((d * d, d * d), dtype=complex)
    for op in kraus:
        # vec(K) in the |i>|.> ordering: column i of K sits in block i
        v = op.T.ravel()
        choi += np.outer(v, v.conj())
    return choi


def verify_cptp(channel) -> CPTPReport:
    """Check trace preservation and complete positivity.

    Accepts a :class:`KrausChannel` or a raw list of Kraus matrices, so
    invalid candidates can be examined too.
    """
    kraus = channel.kraus if isinstance(channel, KrausChannel) else [np.asarray(k) for k in channel]
    resid = tp_residual(kraus)
    choi = choi_matrix(kraus)
    choi_min = float(np.linalg.eigvalsh((choi + choi.conj().T) / 2).min())
    return CPTPReport(
        trace_preserving_residual=resid,
        choi_min_eigenvalue=choi_min,
        passed=bool(resid <= 1e-10 and choi_min >= -1e-10),
    )
