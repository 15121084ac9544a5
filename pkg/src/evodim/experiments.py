"""Experiment drivers producing CSV tables.

``fig2`` samples random spin-1 unitary dynamics, adds Gaussian noise of
increasing strength and records the Hankel singular values and the rank
lower bound.  ``fig1`` emits the roots-of-unity hull polygons that bound
the eigenvalues of small classical stochastic matrices.

Each trial draws from its own counter-based stream keyed by
``(seed, trial)``, so results do not depend on scheduling and parallel runs
are byte-identical to serial ones.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter
from .quantum import (
    KrausChannel,
    evolve_expectations,
    random_observable,
    random_state,
    random_unitary,
)
from .realization import effective_rank, noise_epsilon
from .sequences import RealSequence, build_hankel
from .spectral import unity_hull

REPORTED_SINGULAR_VALUES = 15
DEFAULT_NOISE_FRACTIONS = tuple(round(0.01 * k, 2) for k in range(1, 11))


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 42
    trials: int = 20
    d: int = 3
    steps: int = 101
    hankel_n: int = 50
    noise_fractions: tuple = field(default=DEFAULT_NOISE_FRACTIONS)
    confidence: float = 0.99

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise InvalidParameter(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.trials < 1 or self.d < 1 or self.hankel_n < 1:
            raise InvalidParameter("trials, d and hankel_n must be positive")
        if self.steps < 2 * self.hankel_n:
            raise InvalidParameter(
                f"steps={self.steps} is too short for hankel_n={self.hankel_n}",
                invariant="steps >= 2 hankel_n",
            )
        if any(not 0.0 <= f <= 1.0 for f in self.noise_fractions):
            raise InvalidParameter("noise fractions must lie in [0, 1]")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent Philox stream for one trial."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial,))))


FIG2_COLUMNS = (
    ["trial", "noise_fraction", "sigma", "epsilon", "rank", "s7_over_s8"]
    + [f"s{j}" for j in range(1, REPORTED_SINGULAR_VALUES + 1)]
)


def _fig2_row(trial, fraction, sigma, eps, report):
    s = report.singular_values
    top = list(s[:REPORTED_SINGULAR_VALUES])
    top += [0.0] * (REPORTED_SINGULAR_VALUES - len(top))
    ratio = s[6] / s[7] if s.size > 7 and s[7] > 0 else float("inf")
    return [trial, fraction, sigma, eps, report.dim_v, ratio] + top


def fig2_trial(config: ExperimentConfig, trial: int) -> list:
    """Rows for one trial: the noiseless sequence first, then each noise level."""
    rng = trial_rng(config.seed, trial)
    channel = KrausChannel.unitary(random_unitary(rng, config.d))
    rho = random_state(rng, config.d)
    obs = random_observable(rng, config.d)
    clean = evolve_expectations(channel, rho, obs, config.steps).values
    scale = float(np.max(np.abs(clean)))

    rows = [_fig2_row(trial, 0.0, 0.0, 0.0,
                      effective_rank(build_hankel(RealSequence(clean), config.hankel_n)))]
    for fraction in config.noise_fractions:
        sigma = fraction * scale
        noisy = clean + sigma * rng.standard_normal(config.steps)
        eps = noise_epsilon(sigma, config.hankel_n, config.confidence)
        report = effective_rank(build_hankel(RealSequence(noisy), config.hankel_n), eps)
        rows.append(_fig2_row(trial, fraction, sigma, eps, report))
    return rows


def _fig2_trial_star(args):
    return fig2_trial(*args)


def run_fig2(config: ExperimentConfig, jobs: int = 1) -> list:
    """All rows, ordered by trial index regardless of ``jobs``."""
    tasks = [(config, t) for t in range(config.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_trial = list(pool.map(_fig2_trial_star, tasks))
    else:
        per_trial = [_fig2_trial_star(t) for t in tasks]
    return [row for rows in per_trial for row in rows]


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def format_csv(header, rows) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    return out.getvalue()


HULL_COLUMNS = ["order", "vertex_index", "re", "im"]
CIRCLE_POINTS = 360


def emit_region_data(order_max: int, circle: bool = True) -> list:
    """Hull vertex rows for orders ``1 .. order_max``.

    With ``circle`` the unit circle is appended as a closed polyline under
    ``order = 0``.
    """
    if order_max < 1:
        raise InvalidParameter(f"order_max must be >= 1, got {order_max}")
    rows = []
    for order in range(1, order_max + 1):
        for i, v in enumerate(unity_hull(order).vertices):
            rows.append([order, i, v.real, v.imag])
    if circle:
        angles = 2 * np.pi * np.arange(CIRCLE_POINTS + 1) / CIRCLE_POINTS
        for i, phi in enumerate(angles):
            rows.append([0, i, float(np.cos(phi)), float(np.sin(phi))])
    return rows
