import numpy as np
import pytest

from conftest import damped_rabi
from evodim.dilation import choi_matrix, quantum_realization, verify_cptp
from evodim.errors import NonRealSequence, NotAContraction
from evodim.quantum import (
    KrausChannel,
    evolve_expectations,
    random_channel,
    random_observable,
    random_state,
    random_unitary,
)
from evodim.realization import LinearRealization, enforce_contraction, linear_realization
from evodim.sequences import RealSequence

HORIZON = 201


def reproduce(qr, steps=HORIZON):
    return evolve_expectations(qr.channel, qr.rho, qr.a, steps).values


def random_contractive(rng, r):
    m = rng.standard_normal((r, r))
    m *= rng.uniform(0.2, 1.0) / np.linalg.norm(m, 2)
    return LinearRealization(m=m, l_vec=rng.standard_normal(r), r_vec=rng.standard_normal(r))


def test_constant_sequence_dimension_three():
    real = LinearRealization(m=[[1.0]], l_vec=[1.0], r_vec=[1.0])
    qr = quantum_realization(real)
    assert qr.dim == 3
    np.testing.assert_allclose(reproduce(qr, 50), 1.0, atol=1e-12)


def test_geometric_sequence():
    real = LinearRealization(m=[[0.5]], l_vec=[1.0], r_vec=[1.0])
    qr = quantum_realization(real)
    np.testing.assert_allclose(reproduce(qr, 60), 0.5 ** np.arange(60), atol=1e-14)


def test_damped_rabi_dimension_four():
    real = enforce_contraction(linear_realization(RealSequence(damped_rabi(np.arange(10))), 5))
    qr = quantum_realization(real)
    assert qr.dim == 4
    assert verify_cptp(qr.channel).passed
    np.testing.assert_allclose(reproduce(qr), damped_rabi(np.arange(HORIZON)), atol=1e-8)


def test_state_and_observable_are_valid():
    real = LinearRealization(m=[[0.3, 0.4], [-0.4, 0.3]], l_vec=[1.0, 2.0], r_vec=[-1.0, 0.5])
    qr = quantum_realization(real)
    assert np.trace(qr.rho.mat).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(qr.rho.mat).min() >= -1e-12
    np.testing.assert_allclose(qr.a.mat, qr.a.mat.conj().T)
    np.testing.assert_allclose(reproduce(qr, 100), real.evaluate(100).real, atol=1e-12)


def test_rejects_expanding_and_complex_realizations():
    with pytest.raises(NotAContraction):
        quantum_realization(LinearRealization(m=[[0.9, 5], [0, 0.9]], l_vec=[1, 0], r_vec=[0, 1]))
    with pytest.raises(NonRealSequence):
        quantum_realization(LinearRealization(m=[[0.5]], l_vec=[1j], r_vec=[1]))


def test_random_contractive_realizations(rng):
    for trial in range(100):
        r = int(rng.integers(1, 7))
        real = random_contractive(rng, r)
        qr = quantum_realization(real)
        assert qr.dim == r + 2
        check = verify_cptp(qr.channel)
        assert check.passed
        assert check.trace_preserving_residual <= 1e-10
        target = real.evaluate(HORIZON).real
        scale = max(np.abs(target).max(), 1e-300)
        assert np.max(np.abs(reproduce(qr) - target)) <= 1e-8 * scale


@pytest.mark.parametrize("d", [2, 3])
def test_end_to_end_from_channel(rng, d):
    for _ in range(10):
        ch = random_channel(rng, d, 2) if rng.random() < 0.5 else KrausChannel.unitary(
            random_unitary(rng, d))
        n = 2 * d * d
        seq = evolve_expectations(ch, random_state(rng, d), random_observable(rng, d), HORIZON)
        real = enforce_contraction(linear_realization(RealSequence(seq.values[:2 * n]), n))
        qr = quantum_realization(real)
        # dimension law: one level per delay-space dimension plus two
        assert qr.dim == real.r + 2 <= d * d + 2
        assert verify_cptp(qr.channel).passed
        assert np.max(np.abs(reproduce(qr) - seq.values)) <= 1e-7 * seq.scale


def test_verify_cptp_examples():
    good = verify_cptp(KrausChannel.identity(2))
    assert good.passed and good.trace_preserving_residual == 0.0
    bad = verify_cptp([0.5 * np.eye(2)])
    assert not bad.passed
    assert bad.trace_preserving_residual == pytest.approx(0.75)
    assert bad.choi_min_eigenvalue >= 0


def test_choi_matches_definition(rng):
    ch = random_channel(rng, 3, 2)
    d = 3
    ref = np.zeros((9, 9), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d))
            unit[i, j] = 1
            ref += np.kron(unit, ch(unit))
    np.testing.assert_allclose(choi_matrix(ch.kraus), ref, atol=1e-14)
    np.testing.assert_allclose(np.trace(ref), d, atol=1e-12)
