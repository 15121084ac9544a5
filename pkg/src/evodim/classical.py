"""Classical stochastic models ``a(t) = <a| S^t |p>``.

``S`` is column-stochastic so a probability column vector evolves as
``p -> S p``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, ValidationError
from .sequences import RealSequence

STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class StochasticModel:
    s: np.ndarray
    p: np.ndarray
    a_out: np.ndarray

    def __post_init__(self):
        s = np.array(self.s, dtype=float, copy=True)
        p = np.array(self.p, dtype=float, copy=True).ravel()
        a_out = np.array(self.a_out, dtype=float, copy=True).ravel()
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] == 0:
            raise ValidationError(f"S must be square, got shape {s.shape}", invariant="square S")
        dc = s.shape[0]
        if p.size != dc or a_out.size != dc:
            raise ValidationError(
                f"p and a must have length {dc}, got {p.size} and {a_out.size}",
                invariant="matching dimension",
            )
        if s.min() < 0:
            raise ValidationError(f"S has negative entry {s.min():.3e}",
                                  invariant="S entries >= 0", residual=float(s.min()))
        col_err = float(np.max(np.abs(s.sum(axis=0) - 1.0)))
        if col_err > STOCHASTIC_TOL:
            raise ValidationError(f"columns of S do not sum to 1 (max error {col_err:.3e})",
                                  invariant="column sums", residual=col_err)
        if p.min() < 0:
            raise ValidationError(f"p has negative entry {p.min():.3e}",
                                  invariant="p entries >= 0", residual=float(p.min()))
        p_err = abs(p.sum() - 1.0)
        if p_err > STOCHASTIC_TOL:
            raise ValidationError(f"p does not sum to 1 (error {p_err:.3e})",
                                  invariant="p normalized", residual=p_err)
        for arr in (s, p, a_out):
            arr.setflags(write=False)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "a_out", a_out)

    @property
    def dc(self) -> int:
        return self.s.shape[0]


def evolve_classical(model: StochasticModel, steps: int) -> RealSequence:
    if steps < 1:
        raise InvalidParameter(f"steps must be positive, got {steps}")
    out = np.empty(steps)
    p = np.array(model.p)
    for t in range(steps):
        out[t] = model.a_out @ p
        p = model.s @ p
    return RealSequence(out)


def _flat_dirichlet(rng: np.random.Generator, size: int, count: int) -> np.ndarray:
    x = rng.standard_exponential((size, count))
    return x / x.sum(axis=0)


def random_stochastic(dc: int, seed: int = 0) -> StochasticModel:
    """Random model: Dirichlet(1, ..., 1) columns and initial distribution,
    standard normal measurement values."""
    if dc < 1:
        raise InvalidParameter(f"dc must be >= 1, got {dc}")
    if not 0 <= seed < 2**64:
        raise InvalidParameter(f"seed must be an unsigned 64-bit integer, got {seed}")
    rng = np.random.default_rng(seed)
    s = _flat_dirichlet(rng, dc, dc)
    p = _flat_dirichlet(rng, dc, 1).ravel()
    return StochasticModel(s=s, p=p, a_out=rng.standard_normal(dc))
