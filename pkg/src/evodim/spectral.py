"""Frequency-domain analysis.

The z-transform ``L(z) = (1/z) sum_t a(t) z^-t`` of a realized sequence is
the resolvent ``<L| (z - M)^-1 |R>``, so its poles are eigenvalues of ``M``.
For a classical chain with ``d_c`` states the poles must lie in the convex
hull of all roots of unity of order at most ``d_c``; the smallest such order
containing the observed poles is a lower bound on ``d_c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameter, NearPole, OutsideConvergence, PoleOutsideDisc
from .realization import LinearRealization
from .sequences import RealSequence

DEFAULT_ORDER_MAX = 64
UNBOUNDED = "unbounded"


class ZValue(NamedTuple):
    value: complex
    error_bound: float


def ztransform_series(seq: RealSequence, z: complex) -> ZValue:
    """Truncated series with a bound on its error.

    The bound covers the neglected tail, assuming ``|a(t)|`` stays below the
    largest observed magnitude, plus the floating-point error of the sum.
    """
    z = complex(z)
    mod = abs(z)
    if mod <= 1.0 + 1e-6:
        raise OutsideConvergence(
            f"|z| = {mod:.6g}: the series only converges for |z| > 1",
            invariant="|z| > 1",
            residual=1.0 - mod,
        )
    n = len(seq)
    powers = z ** -np.arange(1, n + 1, dtype=float)
    terms = seq.values * powers
    value = complex(np.sum(terms))
    tail = seq.scale * mod ** (-n) / (mod - 1.0)
    rounding = 2.0 * (n + 2) * np.finfo(float).eps * float(np.sum(np.abs(terms)))
    return ZValue(value, float(tail + rounding))


def ztransform_resolvent(real: LinearRealization, z: complex) -> complex:
    """Analytic continuation ``<L| (z - M)^-1 |R>``, valid off the spectrum."""
    z = complex(z)
    eigs = np.linalg.eigvals(real.m)
    gap = float(np.min(np.abs(eigs - z)))
    if gap < 1e-10:
        raise NearPole(f"z = {z} lies within {gap:.3e} of a pole")
    x = np.linalg.solve(z * np.eye(real.r) - real.m, real.r_vec)
    return complex(np.vdot(real.l_vec, x))


def ztransform_eval(source, z: complex) -> ZValue:
    """Evaluate ``L(z)`` from a sequence (series) or a realization (resolvent).

    The resolvent has no truncation error, so its bound is reported as 0.
    """
    if isinstance(source, LinearRealization):
        return ZValue(ztransform_resolvent(source, z), 0.0)
    return ztransform_series(source, z)


def sort_poles(values) -> np.ndarray:
    """Descending modulus, then ascending phase."""
    values = np.asarray(values, dtype=complex)
    # round the modulus so conjugate pairs tie despite roundoff
    mod = np.round(np.abs(values), 10)
    order = np.lexsort((np.angle(values), -mod))
    return values[order]


def poles(real: LinearRealization) -> np.ndarray:
    """Eigenvalues of the realization matrix, with multiplicity."""
    return sort_poles(np.linalg.eigvals(real.m))


@dataclass(frozen=True)
class UnityHull:
    order: int
    vertices: tuple  # complex, counterclockwise starting at 1

    @property
    def fractions(self) -> tuple:
        """Vertex angles as exact fractions of a full turn."""
        return _farey_turns(self.order)


def _farey_turns(order: int) -> tuple:
    return tuple(sorted({Fraction(k, m) for m in range(1, order + 1) for k in range(m)}))


def unity_hull(order: int) -> UnityHull:
    """Convex hull of ``{exp(2 pi i k/m) : m <= order}``.

    Distinct points on a circle are all extreme, so the vertices are the
    reduced fractions ``k/m`` in ``[0, 1)``, i.e. the Farey sequence.
    """
    if order < 1:
        raise InvalidParameter(f"order must be >= 1, got {order}")
    turns = _farey_turns(order)
    vertices = tuple(complex(np.exp(2j * np.pi * float(f))) for f in turns)
    # exact values where floating point would leave roundoff
    exact = {Fraction(0): 1 + 0j, Fraction(1, 2): -1 + 0j, Fraction(1, 4): 1j, Fraction(3, 4): -1j}
    vertices = tuple(exact.get(f, v) for f, v in zip(turns, vertices))
    return UnityHull(order=order, vertices=vertices)


def in_hull(point: complex, hull: UnityHull, tol: float = 0.0) -> bool:
    """Membership in the hull dilated outward by ``tol`` (boundary counts as inside)."""
    point = complex(point)
    verts = hull.vertices
    if len(verts) == 1:
        return abs(point - verts[0]) <= tol
    if len(verts) == 2:
        # the real segment [-1, 1]
        return abs(point.imag) <= tol and -1.0 - tol <= point.real <= 1.0 + tol
    for a, b in zip(verts, verts[1:] + verts[:1]):
        edge = b - a
        # signed distance, positive on the left of a counterclockwise edge
        cross = edge.real * (point - a).imag - edge.imag * (point - a).real
        if cross / abs(edge) < -tol:
            return False
    return True


def min_classical_dimension(pole_list, order_max: int = DEFAULT_ORDER_MAX,
                            tol: float = 1e-9) -> int | str:
    """Smallest order whose roots-of-unity hull contains every pole.

    Returns ``"unbounded"`` if no order up to ``order_max`` works.
    """
    pole_list = np.atleast_1d(np.asarray(pole_list, dtype=complex))
    if order_max < 1:
        raise InvalidParameter(f"order_max must be >= 1, got {order_max}")
    if pole_list.size:
        worst = float(np.max(np.abs(pole_list)))
        if worst > 1.0 + tol:
            raise PoleOutsideDisc(
                f"pole of modulus {worst:.12g} lies outside the unit disc",
                invariant="|pole| <= 1",
                residual=worst - 1.0,
            )
    for order in range(1, order_max + 1):
        hull = unity_hull(order)
        if all(in_hull(p, hull, tol) for p in pole_list):
            return order
    return UNBOUNDED


@dataclass(frozen=True)
class SpectralReport:
    poles: np.ndarray
    min_classical_dimension: int | str
    hull_order_tested_max: int
    tolerance: float


def spectral_report(real: LinearRealization, order_max: int = DEFAULT_ORDER_MAX,
                    tol: float = 1e-9) -> SpectralReport:
    pole_list = poles(real)
    return SpectralReport(
        poles=pole_list,
        min_classical_dimension=min_classical_dimension(pole_list, order_max, tol),
        hull_order_tested_max=order_max,
        tolerance=tol,
    )
