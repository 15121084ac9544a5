import mpmath
import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import damped_rabi
from evodim.errors import (
    InconsistentDimension,
    InvalidParameter,
    RankDeficiencyNotReached,
    SequenceTooShort,
    UnboundedRealization,
    UnitCircleJordanBlock,
)
from evodim.quantum import (
    KrausChannel,
    conserved_space,
    ergodicity_report,
    evolve_expectations,
    random_channel,
    random_instance,
    random_observable,
    random_state,
    random_unitary,
)
from evodim.realization import (
    LinearRealization,
    dimension_bounds,
    effective_rank,
    enforce_contraction,
    linear_realization,
    noise_epsilon,
)
from evodim.sequences import RealSequence, build_hankel


def exact_hankel_rank(n):
    """Rank of the Hilbert-type Hankel matrix of 1/(t+1) in 60-digit arithmetic."""
    with mpmath.workdps(60):
        h = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                h[i, j] = mpmath.mpf(1) / (i + j + 1)
        s = sorted(mpmath.svd_r(h, compute_uv=False), reverse=True)
        exact = sum(1 for x in s if x > mpmath.mpf(10) ** -50 * s[0])
        at_tol = sum(1 for x in s if x > 1e-9 * s[0])
    return exact, at_tol


def test_rank_constant_sequence():
    rep = effective_rank(build_hankel(RealSequence(np.ones(8)), 4), 0.0)
    assert rep.dim_v_exact_if_clean == 1
    np.testing.assert_allclose(rep.singular_values, [4, 0, 0, 0], atol=1e-14)


def test_rank_cosine():
    rep = effective_rank(build_hankel(RealSequence(np.cos(0.7 * np.arange(10))), 5))
    assert rep.dim_v_exact_if_clean == 2


def test_lower_bound_exact_boundary():
    v = np.diag([3.0, 2.0, 0.0, 0.0])
    e = np.diag([0.0, 0.0, 0.25, 0.0])
    assert effective_rank(v + e, 0.25).dim_v_lower == 2
    assert effective_rank(v + e, 0.2).dim_v_lower == 3
    assert effective_rank(v, 5.0).dim_v_lower == 0
    assert effective_rank(v + 1e-3 * np.eye(4), 0.0).dim_v_lower == 4


def test_rank_report_invariants(rng):
    rep = effective_rank(rng.standard_normal((6, 6)), 0.5)
    s = rep.singular_values
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
    k = rep.dim_v_lower
    assert 0 <= k <= rep.n
    assert k == rep.n or s[k] <= 0.5
    assert np.all(s[:k] > 0.5)
    with pytest.raises(InvalidParameter):
        effective_rank(np.eye(2), -1.0)


def fig2_sequence(seed, steps=101):
    rng = np.random.default_rng(seed)
    ch = KrausChannel.unitary(random_unitary(rng, 3))
    return evolve_expectations(ch, random_state(rng, 3), random_observable(rng, 3), steps)


def test_lower_bound_under_norm_exact_perturbation(rng):
    v = build_hankel(fig2_sequence(0), 50).v
    s7 = np.linalg.svd(v, compute_uv=False)[6]
    for eps in [1e-6 * s7, 1e-3 * s7, 0.3 * s7, 0.9 * s7, 2 * s7, 10 * s7]:
        for _ in range(20):
            e = rng.standard_normal(v.shape)
            e *= eps / np.linalg.norm(e, 2)
            rep = effective_rank(v + e, eps)
            assert rep.dim_v_lower <= 7
            if eps <= 0.3 * s7:
                assert rep.dim_v_lower == 7


def test_noise_epsilon_bounds_hankel_noise(rng):
    n = 50
    eps = noise_epsilon(1.0, n, confidence=0.99)
    norms = []
    for _ in range(300):
        e = rng.standard_normal(2 * n)
        norms.append(np.linalg.norm(build_hankel(RealSequence(e), n).v, 2))
    # union bound at 1% failure probability; empirical exceedance is far lower
    assert np.mean(np.array(norms) > eps) <= 0.01
    assert noise_epsilon(2.0, n) == pytest.approx(2 * eps)


def test_dimension_bounds_examples():
    b = dimension_bounds(7)
    assert b.d_min == 3
    assert dimension_bounds(1).d_min == 1
    b = dimension_bounds(7, known_d=3, known_ds=1)
    assert b.dim_c_max_given_d == 3
    assert b.d_e_min_given_ds == 2
    with pytest.raises(InconsistentDimension):
        dimension_bounds(7, known_d=2)


def test_dimension_bounds_match_conserved_space():
    ch = random_instance("unitary", 3, seed=11)
    rho = random_instance("state", 3, seed=12)
    a = random_instance("observable", 3, seed=13)
    seq = evolve_expectations(ch, rho, a, 40)
    rep = effective_rank(build_hankel(seq, 20))
    b = dimension_bounds(rep, known_d=3)
    assert rep.dim_v == 7
    assert b.dim_c_max_given_d == conserved_space(ch, rho).dim_c == 3


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 400))
def test_d_min_invariant(dim_v):
    d = dimension_bounds(dim_v).d_min
    assert d * d >= dim_v > (d - 1) ** 2 or (dim_v == 0 and d == 1)


def test_realization_constant():
    real = linear_realization(RealSequence(np.ones(10)), 5)
    assert real.r == 1
    np.testing.assert_allclose(real.m, [[1]], atol=1e-14)
    np.testing.assert_allclose(real.evaluate(50).real, 1, atol=1e-13)


def test_realization_cosine():
    real = linear_realization(RealSequence(np.cos(0.7 * np.arange(10))), 5)
    assert real.r == 2
    eigs = np.sort_complex(np.linalg.eigvals(real.m))
    np.testing.assert_allclose(eigs, np.exp([-0.7j, 0.7j]), atol=1e-9)


def test_realization_damped_rabi():
    real = linear_realization(RealSequence(damped_rabi(np.arange(10))), 5)
    assert real.r == 2
    eigs = np.sort_complex(np.linalg.eigvals(real.m))
    np.testing.assert_allclose(eigs, np.exp(-0.1 + np.array([-0.7j, 0.7j])), atol=1e-9)
    np.testing.assert_allclose(real.evaluate(100).real, damped_rabi(np.arange(100)), atol=1e-10)


def test_realization_errors(rng):
    with pytest.raises(RankDeficiencyNotReached):
        linear_realization(RealSequence(rng.standard_normal(10)), 5)
    with pytest.raises(SequenceTooShort):
        linear_realization(RealSequence(np.ones(5)), 3)


def test_realization_of_zero_sequence():
    real = linear_realization(RealSequence(np.zeros(6)), 3)
    assert np.all(real.evaluate(10) == 0)


@pytest.mark.parametrize("d", [2, 3])
def test_round_trip_extrapolates(rng, d):
    for _ in range(20):
        ch = random_channel(rng, d, 2) if rng.random() < 0.5 else KrausChannel.unitary(
            random_unitary(rng, d))
        n = 2 * d * d
        seq = evolve_expectations(ch, random_state(rng, d), random_observable(rng, d), 4 * n + 1)
        real = linear_realization(RealSequence(seq.values[:2 * n]), n)
        err = np.max(np.abs(real.evaluate(4 * n + 1).real - seq.values)) / seq.scale
        assert err <= 1e-7
        assert real.spectral_radius <= 1 + 1e-10


@pytest.mark.parametrize("d", [2, 3])
def test_prop1_with_realization_rank(rng, d):
    for _ in range(20):
        ch = random_channel(rng, d, 2)
        rho, a = random_state(rng, d), random_observable(rng, d)
        n = 2 * d * d
        seq = evolve_expectations(ch, rho, a, 2 * n)
        rank = effective_rank(build_hankel(seq, n), rank_tol=1e-12).dim_v_exact_if_clean
        dim_c = conserved_space(ch, rho).dim_c
        assert rank + dim_c <= d * d + 1
        if ergodicity_report(ch, rho, a).ergodic_wrt_observable:
            assert rank + dim_c == d * d + 1


def test_algebraic_decay_never_saturates():
    seq = RealSequence(1.0 / (np.arange(24) + 1))
    ranks = []
    for n in range(1, 13):
        exact, at_tol = exact_hankel_rank(n)
        assert exact == n
        rep = effective_rank(build_hankel(seq, n))
        assert rep.dim_v_exact_if_clean == at_tol
        ranks.append(rep.dim_v_exact_if_clean)
    assert ranks[:7] == list(range(1, 8))
    assert ranks == sorted(ranks)


def matched_gap(a, b):
    """Largest distance under the optimal pairing of two eigenvalue lists."""
    cost = np.abs(np.subtract.outer(a, b))
    i, j = linear_sum_assignment(cost)
    return cost[i, j].max()


def seq_of(real, steps):
    return real.evaluate(steps)


def test_contraction_trivial():
    real = LinearRealization(m=[[0.5]], l_vec=[1], r_vec=[2])
    out = enforce_contraction(real)
    np.testing.assert_allclose(out.m, [[0.5]])
    assert out.contraction_norm == pytest.approx(0.5)
    np.testing.assert_allclose(seq_of(out, 20), seq_of(real, 20), atol=1e-15)


def test_contraction_nonnormal_block():
    real = LinearRealization(m=[[0.9, 5], [0, 0.9]], l_vec=[1, -2], r_vec=[0.3, 1])
    out = enforce_contraction(real)
    assert out.contraction_norm <= 1 + 1e-10
    # oracle: diagonal similarity diag(1, 0.02) gives off-diagonal 0.1
    s = np.diag([1, 0.02])
    ref = np.linalg.inv(s) @ real.m @ s
    assert np.linalg.norm(ref, 2) <= 1
    np.testing.assert_allclose(np.linalg.eigvals(out.m), [0.9, 0.9], atol=1e-7)
    before, after = seq_of(real, 200), seq_of(out, 200)
    np.testing.assert_allclose(after, before, atol=1e-10 * np.abs(before).max())


def test_contraction_rejects_unit_circle_jordan_block():
    with pytest.raises(UnitCircleJordanBlock):
        enforce_contraction(LinearRealization(m=[[1, 1], [0, 1]], l_vec=[1, 0], r_vec=[0, 1]))
    with pytest.raises(UnboundedRealization):
        enforce_contraction(LinearRealization(m=[[1.1]], l_vec=[1], r_vec=[1]))


def test_contraction_mixed_spectrum(rng):
    # unimodular pair coupled to a decaying non-normal block
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    t = np.array([[np.exp(0.3j), 2, 1, 0.5],
                  [0, np.exp(-0.3j), 0.7, 1],
                  [0, 0, 0.6, 3],
                  [0, 0, 0, 0.6]])
    real = LinearRealization(m=q @ t @ q.T, l_vec=rng.standard_normal(4), r_vec=rng.standard_normal(4))
    out = enforce_contraction(real)
    assert out.contraction_norm <= 1 + 1e-10
    assert matched_gap(np.linalg.eigvals(out.m), np.linalg.eigvals(real.m)) <= 1e-7
    before = seq_of(real, 300)
    np.testing.assert_allclose(seq_of(out, 300), before, atol=1e-10 * np.abs(before).max())


@pytest.mark.parametrize("d", [2, 3])
def test_contraction_preserves_poles_and_sequence(rng, d):
    for _ in range(20):
        ch = random_channel(rng, d, 2) if rng.random() < 0.5 else KrausChannel.unitary(
            random_unitary(rng, d))
        n = 2 * d * d
        seq = evolve_expectations(ch, random_state(rng, d), random_observable(rng, d), 2 * n)
        real = linear_realization(seq, n)
        out = enforce_contraction(real)
        assert out.contraction_norm <= 1 + 1e-10
        # modes are simple, so eigenvalues are well conditioned and compare directly
        assert matched_gap(np.linalg.eigvals(out.m), np.linalg.eigvals(real.m)) <= 1e-10
        np.testing.assert_allclose(seq_of(out, 2 * n).real, seq_of(real, 2 * n).real,
                                   atol=1e-10 * seq.scale)
