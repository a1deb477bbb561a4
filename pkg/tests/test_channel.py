import math

import numpy as np
import pytest

from chicap.channel import (
    CqChannel,
    Ensemble,
    apply,
    check_distribution,
    chi_function,
    chi_of_ensemble,
    hhat_function,
    spectral_truncation,
    sup_trace_norm_deviation,
    truncate_channel,
)
from chicap.errors import DimensionMismatch, InvalidProjector, ValidationError
from chicap.qfamily import QSequence, family_channel, sigma_state
from chicap.random import rand_channel, rand_density, rand_distribution
from chicap.solver import solve_capacity
from chicap.spectral import relative_entropy, von_neumann_entropy

from helpers import ket, proj


def ortho(k):
    return CqChannel(np.stack([proj(ket(k, j)) for j in range(k)]))


def test_channel_validation():
    with pytest.raises(DimensionMismatch):
        CqChannel([np.eye(2) / 2, np.eye(3) / 3])
    with pytest.raises(ValidationError):
        CqChannel(np.zeros((0, 2, 2)))
    ch = ortho(3)
    assert (ch.letters, ch.dim) == (3, 3)
    assert not ch.outputs.flags.writeable


def test_distribution_validation():
    with pytest.raises(ValidationError):
        check_distribution([0.5, 0.6])
    with pytest.raises(ValidationError):
        check_distribution([1.5, -0.5])
    with pytest.raises(DimensionMismatch):
        check_distribution([1.0], 2)


def test_apply_examples():
    ch = ortho(4)
    assert np.allclose(apply(ch, [0, 0, 1, 0]), ch.outputs[2])
    assert np.allclose(apply(ch, np.full(4, 0.25)), np.eye(4) / 4)
    with pytest.raises(DimensionMismatch):
        apply(ch, [0.5, 0.5])


def test_apply_family_pair_by_hand():
    s = QSequence("power", prefix=(0.5, 0.25))
    ch = CqChannel(np.stack([sigma_state(s, 1, 3), sigma_state(s, 2, 3)]))
    r1, r2 = math.sqrt(0.25), math.sqrt(0.75 * 0.25)
    expect = np.array(
        [
            [0.25 * 0.5 + 0.75 * 0.75, 0.25 * r1, 0.75 * r2],
            [0.25 * r1, 0.25 * 0.5, 0],
            [0.75 * r2, 0, 0.75 * 0.25],
        ]
    )
    assert np.max(np.abs(apply(ch, [0.25, 0.75]) - expect)) <= 1e-15


def test_apply_is_affine(rng):
    ch = rand_channel(3, 5, rng)
    p, q = rand_distribution(5, rng), rand_distribution(5, rng)
    a = 0.3
    lhs = apply(ch, a * p + (1 - a) * q)
    assert np.max(np.abs(lhs - a * apply(ch, p) - (1 - a) * apply(ch, q))) <= 1e-12


def test_chi_of_ensemble_examples():
    ch = ortho(2)
    assert chi_of_ensemble(ch, Ensemble([1.0], [[0.3, 0.7]])).chi == pytest.approx(0, abs=1e-14)
    assert chi_of_ensemble(ch, Ensemble([0.5, 0.5], np.eye(2))).chi == pytest.approx(math.log(2), abs=1e-12)


def test_chi_of_family_letters_equals_output_entropy():
    s = QSequence("power", prefix=(0.5, 0.25))
    ch = family_channel(s, 2)  # letters 1, 2, -1, -2
    hv = chi_of_ensemble(ch, Ensemble(np.full(4, 0.25), np.eye(4)))
    avg = np.mean(ch.outputs, axis=0)
    assert hv.hhat == pytest.approx(0, abs=1e-12)
    assert hv.chi == pytest.approx(von_neumann_entropy(avg), abs=1e-12)
    # off-diagonal terms of +k and -k cancel, leaving a diagonal average
    assert np.allclose(avg, np.diag([0.625, 0.25, 0.125]))


def test_chi_identity_and_refinement(rng):
    for _ in range(20):
        ch = rand_channel(3, 4, rng)
        w = rand_distribution(3, rng)
        sup = np.stack([rand_distribution(4, rng) for _ in range(3)])
        hv = chi_of_ensemble(ch, Ensemble(w, sup))
        assert hv.chi == pytest.approx(hv.output_entropy - hv.hhat, abs=1e-8)
        split = Ensemble(np.concatenate([[w[0] / 2, w[0] / 2], w[1:]]), np.vstack([sup[:1], sup]))
        assert chi_of_ensemble(ch, split).chi == pytest.approx(hv.chi, abs=1e-10)
        assert chi_function(ch, w @ sup) >= hv.chi - 1e-10


def test_hhat_examples(rng):
    assert hhat_function(ortho(3), [0.2, 0.3, 0.5]) == 0.0
    ch = CqChannel(np.stack([proj(ket(2, 0)), np.eye(2) / 2]))
    assert hhat_function(ch, [0.5, 0.5]) == pytest.approx(0.5 * math.log(2), abs=1e-14)


def test_hhat_dominated_by_coarser_decompositions(rng):
    ch = rand_channel(3, 3, rng)
    for _ in range(50):
        sup = np.stack([rand_distribution(3, rng) for _ in range(4)])
        w = rand_distribution(4, rng)
        p = w @ sup
        coarse = sum(wi * von_neumann_entropy(apply(ch, si)) for wi, si in zip(w, sup))
        assert hhat_function(ch, p) <= coarse + 1e-12


def test_chi_function_examples():
    ch = ortho(5)
    assert chi_function(ch, [0, 1, 0, 0, 0]) == pytest.approx(0, abs=1e-14)
    assert chi_function(ch, np.full(5, 0.2)) == pytest.approx(math.log(5), abs=1e-12)


def test_chi_function_below_capacity_minus_divergence(rng):
    ch = rand_channel(3, 5, rng)
    rep = solve_capacity(ch, tol=1e-10)
    for _ in range(30):
        p = rand_distribution(5, rng)
        bound = rep.capacity_nats - relative_entropy(apply(ch, p), rep.omega)
        assert chi_function(ch, p) <= bound + 1e-6


def test_truncation_identity_and_errors(rng):
    ch = rand_channel(3, 4, rng)
    same = truncate_channel(ch, np.eye(3))
    assert np.allclose(same.outputs, ch.outputs)
    with pytest.raises(InvalidProjector):
        truncate_channel(ch, np.diag([1.0, 0.5, 0.0]))
    p = np.diag([1.0, 1.0, 0.0])
    with pytest.raises(ValidationError):
        truncate_channel(ch, p)
    with pytest.raises(ValidationError):
        truncate_channel(ch, p, proj(ket(3, 0)))
    t = truncate_channel(ch, p, proj(ket(3, 2)))
    assert np.allclose(np.trace(t.outputs, axis1=1, axis2=2), 1)


def test_truncation_is_data_processing(rng):
    ch = rand_channel(4, 5, rng)
    full = solve_capacity(ch, tol=1e-10)
    for rank in range(1, 5):
        t = spectral_truncation(ch, full.omega, rank)
        assert solve_capacity(t, tol=1e-10).capacity_nats <= full.capacity_nats + 1e-8
        for _ in range(5):
            w = rand_distribution(3, rng)
            sup = np.stack([rand_distribution(5, rng) for _ in range(3)])
            e = Ensemble(w, sup)
            assert chi_of_ensemble(t, e).chi <= chi_of_ensemble(ch, e).chi + 1e-8


def test_sup_deviation_vanishes_at_full_rank(rng):
    ch = rand_channel(3, 4, rng)
    omega = rand_density(3, rng)
    inputs = [rand_distribution(4, rng) for _ in range(10)]
    assert sup_trace_norm_deviation(ch, spectral_truncation(ch, omega, 3), inputs) <= 1e-12
    assert sup_trace_norm_deviation(ch, spectral_truncation(ch, omega, 1), inputs) > 0
