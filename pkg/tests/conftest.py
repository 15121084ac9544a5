import numpy as np
import pytest

from evodim.quantum import DensityMatrix, KrausChannel, Observable

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
PLUS = DensityMatrix(np.full((2, 2), 0.5, dtype=complex))
GAMMA, OMEGA = 0.1, 0.7


def damped_rabi_channel(gamma=GAMMA, omega=OMEGA):
    """Phase damping plus rotation: off-diagonal multiplied by exp(-gamma + i omega)."""
    q = 1.0 - np.exp(-2 * gamma)
    k0 = np.diag([1.0, np.sqrt(1 - q) * np.exp(-1j * omega)])
    k1 = np.diag([0.0, np.sqrt(q)])
    return KrausChannel((k0, k1))


def damped_rabi(t, gamma=GAMMA, omega=OMEGA):
    t = np.asarray(t, dtype=float)
    return np.exp(-gamma * t) * np.cos(omega * t)


@pytest.fixture
def sigma_x():
    return Observable(SIGMA_X)


@pytest.fixture
def plus():
    return PLUS


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
