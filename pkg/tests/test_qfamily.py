import math

import mpmath as mp
import numpy as np
import pytest

from chicap.errors import (
    IndexOutOfRange,
    NoSolutionYet,
    UnsupportedTailClass,
    ValidationError,
    WrongCase,
)
from chicap.qfamily import (
    F_scalar,
    F_value,
    FiniteSequence,
    QSequence,
    barycenter_image,
    ce_witness_entropies,
    ce_witness_path,
    classify,
    exp_sum,
    family_channel,
    letter_order,
    omega_entropy_enclosure,
    optimal_measure_weights,
    search_case_c,
    sigma_state,
    truncated_maximizer,
    tune_boundary,
    weighted_exp_sum,
)
from chicap.solver import solve_capacity
from chicap.spectral import von_neumann_entropy

POWER = QSequence("power", c=1, a=1)
LOG = QSequence("log", c=1, b=1)
LOGLOG = QSequence("loglog", c=1, b=10, m=3)
ITERLOG = QSequence("iterlog", c=1, b=2)

# capacity - H(omega) for LOGLOG; produced by demos/case_c_search.py
CASE_C_MARGIN = 0.2730573182739633


def zeta_F(lam):
    # q_1 = 1 after capping, q_n = 1/log(n+1): sums over m = n + 1 >= 3
    lam = mp.mpf(lam)
    return -mp.zeta(lam, derivative=1) - mp.zeta(lam) + 1 + 2**-lam * (1 - mp.log(2))


def zeta_E(lam):
    lam = mp.mpf(lam)
    return mp.exp(-lam) + mp.zeta(lam) - 1 - 2**-lam


def brute_F_loglog(seq, lam, n=10**7):
    """Partial sum over n terms plus a quadrature tail in L = log(x + b)."""
    idx = np.arange(1, n + 1, dtype=float)
    h = seq.inv_q(idx)
    part = float(np.sum((h - 1) * np.exp(-lam * h)))

    def f(big):
        hh = (big + seq.m * mp.log(big)) / seq.c
        return (hh - 1) * mp.exp(big - lam * hh)

    return part + float(mp.quad(f, [mp.log(n + 0.5 + seq.b), mp.inf]))


def test_sequence_validation():
    with pytest.raises(UnsupportedTailClass):
        QSequence("cubic")
    with pytest.raises(ValidationError):
        QSequence("power", c=-1)
    with pytest.raises(ValidationError):
        QSequence("power", a=0)
    with pytest.raises(ValidationError):
        QSequence("power", prefix=(0.5, 1.5))
    q = LOG.q(np.arange(1, 10**5))
    assert np.all((q > 0) & (q <= 1)) and np.all(np.diff(q) <= 0)
    assert QSequence("power", prefix=(0.3,)).q(1) == 0.3


def test_lambda_star():
    assert QSequence("power", a=2.5).lambda_star == 0
    assert QSequence("log", c=1.7, b=1).lambda_star == 1.7
    assert QSequence("iterlog", c=1, b=2).lambda_star == math.inf


def test_sigma_state(rng):
    s = QSequence("power", prefix=(0.5, 1.0))
    half = sigma_state(s, 1, 2)
    assert np.allclose(half, 0.5 * np.ones((2, 2)))
    assert np.allclose(sigma_state(s, 2, 3), np.diag([0, 0, 1.0]))
    for k in (2, 3, 7):
        a, b = sigma_state(POWER, k, 9), sigma_state(POWER, -k, 9)
        assert np.trace(a @ a) == pytest.approx(1, abs=1e-12)
        assert np.allclose(a.diagonal(), b.diagonal())
        assert a[0, k] == -b[0, k] != 0
    with pytest.raises(IndexOutOfRange):
        sigma_state(POWER, 3, 3)
    with pytest.raises(IndexOutOfRange):
        sigma_state(POWER, 0, 3)


def test_family_channel_layout():
    ch = family_channel(POWER, 3)
    assert list(letter_order(3)) == [1, 2, 3, -1, -2, -3]
    assert ch.letters == 6 and ch.dim == 4


def test_F_power_closed_form_and_long_sum():
    iv = F_value(POWER, 1.0)
    closed = math.exp(-2) / (1 - math.exp(-1)) ** 2
    n = np.arange(1, 10**6 + 1, dtype=float)
    direct = math.fsum((n - 1) * np.exp(-n))
    assert iv.width <= 1e-10
    assert abs(iv.mid - direct) <= 1e-12
    assert abs(direct - closed) <= 1e-15
    for lam in (0.3, 0.7, 2.0):
        x = math.exp(-lam)
        assert F_scalar(POWER, lam) == pytest.approx(x * x / (1 - x) ** 2, abs=1e-10)


def test_F_decreases_to_zero():
    grid = [0.5, 1, 2, 5, 10, 40]
    vals = [F_value(POWER, lam).mid for lam in grid]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-15


def test_F_log_class_matches_zeta():
    for lam in (1.3, 1.7, 3.0):
        assert F_value(LOG, lam, tol=1e-12).contains(float(zeta_F(lam)), slack=1e-12)
        assert exp_sum(LOG, lam, tol=1e-12).contains(float(zeta_E(lam)), slack=1e-12)


def test_divergence_flags():
    assert F_value(LOG, LOG.lambda_star).is_infinite
    assert F_value(POWER, 0.0).is_infinite
    assert F_value(ITERLOG, 50.0).is_infinite
    assert F_value(QSequence("loglog", c=1, b=10, m=2), 1.0).is_infinite
    assert not exp_sum(QSequence("loglog", c=1, b=10, m=1.5), 1.0).is_infinite
    assert not F_value(LOGLOG, 1.0).is_infinite


@pytest.mark.parametrize("c,m", [(1.0, 3.0), (0.7, 3.0), (1.0, 4.0)])
def test_F_loglog_against_brute_force(c, m):
    seq = QSequence("loglog", c=c, b=10, m=m)
    iv = F_value(seq, seq.lambda_star, tol=1e-12)
    assert iv.contains(brute_F_loglog(seq, seq.lambda_star), slack=1e-11)


def test_F_loglog_above_threshold():
    seq = QSequence("loglog", c=1, b=10, m=3)
    iv = F_value(seq, 1.2, tol=1e-12)
    assert iv.contains(brute_F_loglog(seq, 1.2, n=10**6), slack=1e-11)


def test_case_A():
    an = classify(POWER)
    assert an.case == "A" and an.dc_omega == 0
    # F(lam) = x^2/(1-x)^2 with x = exp(-lam) gives x = 1/2
    assert an.lambda_sol == pytest.approx(math.log(2), abs=1e-13)
    assert an.pi_sol == pytest.approx(0.5, abs=1e-13)
    assert an.capacity_nats == pytest.approx(2 * math.log(2), abs=1e-12)
    assert an.omega_entropy == pytest.approx(an.capacity_nats, abs=1e-8)
    assert abs(F_value(POWER, an.lambda_sol, tol=1e-12).mid - 1) <= 1e-10


def test_case_B_matches_zeta_root():
    an = classify(LOG)
    lam = mp.findroot(lambda x: zeta_F(x) - 1, 1.7)
    assert an.case == "B" and math.isinf(an.F_at_lambda_star)
    assert an.lambda_sol == pytest.approx(float(lam), abs=1e-12)
    assert an.capacity_nats == pytest.approx(float(lam + mp.log(1 + zeta_E(lam))), abs=1e-12)
    assert 0 < an.dc_omega < 1
    assert an.dc_omega == pytest.approx(1 / float(lam))
    assert math.isinf(an.h_star)


def test_case_C_fixture_from_search():
    assert search_case_c() == LOGLOG
    an = classify(LOGLOG)
    assert an.case == "C" and an.dc_omega == 1.0
    assert an.lambda_sol == an.lambda_star == 1.0
    assert an.F_at_lambda_star < 1
    margin = an.capacity_nats - an.omega_entropy
    assert margin > 0
    assert margin == pytest.approx(CASE_C_MARGIN, abs=1e-9)
    # margin has the closed form lam* (1 - h_*)
    assert margin == pytest.approx(an.lambda_star * (1 - an.h_star), abs=1e-10)


def test_case_D():
    an = classify(ITERLOG)
    assert an.case == "D" and math.isinf(an.capacity_nats) and an.dc_omega is None


def test_boundary_footnote():
    edge = tune_boundary()
    an = classify(edge)
    assert abs(an.F_at_lambda_star - 1) <= 1e-9
    assert an.case == "B" and an.dc_omega == 1.0
    for c in (0.70, 0.7269):
        near = classify(QSequence("loglog", c=c, b=10, m=3))
        assert near.case == "B" and near.F_at_lambda_star > 1 and near.dc_omega < 1
    assert classify(QSequence("loglog", c=0.73, b=10, m=3)).case == "C"


@pytest.mark.parametrize("c", [0.5, 0.7, 0.73, 1.0, 2.0])
def test_h_star_equivalence(c):
    seq = QSequence("loglog", c=c, b=10, m=3)
    ls = seq.lambda_star
    h_star = weighted_exp_sum(seq, ls, tol=1e-12).mid / (1 + exp_sum(seq, ls, tol=1e-12).mid)
    f_star = F_value(seq, ls, tol=1e-12).mid
    assert (h_star >= 1) == (f_star >= 1)
    assert classify(seq).h_star == pytest.approx(h_star, abs=1e-12)


def test_finite_sequence_is_not_classified():
    fs = FiniteSequence((0.5, 0.3, 0.2))
    with pytest.raises(UnsupportedTailClass):
        classify(fs)
    with pytest.raises(UnsupportedTailClass):
        F_value(fs, 1.0)
    assert truncated_maximizer(fs, 3).residual <= 1e-12
    with pytest.raises(IndexOutOfRange):
        truncated_maximizer(fs, 4)


def test_optimal_weights():
    an = classify(POWER)
    w = optimal_measure_weights(an, POWER, 1000)
    assert np.allclose(w.weights[:1000], w.weights[1000:])
    assert w.total.contains(1.0, slack=1e-8)
    img = barycenter_image(POWER, w.letters, w.weights, 1001)
    head = np.array(classify(POWER, omega_levels=1000).omega_head)
    assert np.max(np.abs(np.linalg.eigvalsh(img)[::-1] - np.sort(head)[::-1])) <= 1e-8
    with pytest.raises(WrongCase):
        optimal_measure_weights(classify(LOGLOG), LOGLOG, 10)


def test_optimal_weights_case_B_total():
    an = classify(LOG)
    w = optimal_measure_weights(an, LOG, 1000)
    assert w.total.contains(1.0, slack=1e-8)


def test_truncated_maximizer():
    with pytest.raises(NoSolutionYet):
        truncated_maximizer(POWER, 2)  # sum (k - 1) = 1 is not > 1
    tm = truncated_maximizer(POWER, 3)
    assert tm.residual <= 1e-12
    for n in (5, 20, 200):
        tm = truncated_maximizer(POWER, n)
        ch = family_channel(POWER, n)
        assert np.max(np.abs(ch.mix(tm.letter_weights) - tm.rho)) <= 1e-10
        assert tm.entropy == pytest.approx(von_neumann_entropy(tm.rho), abs=1e-12)


def test_truncated_entropies_increase_to_capacity():
    for seq in (POWER, LOG):
        cap = classify(seq).capacity_nats
        ns = [4, 8, 32, 128, 1024, 8192]
        ent = [truncated_maximizer(seq, n).entropy for n in ns]
        assert all(b >= a - 1e-15 for a, b in zip(ent, ent[1:]))
        assert all(e <= cap + 1e-12 for e in ent)
    assert truncated_maximizer(POWER, 200).entropy == pytest.approx(2 * math.log(2), abs=1e-12)


def test_truncated_lambda_limits():
    lam1 = classify(LOG).lambda_sol
    lams = [truncated_maximizer(LOG, n).lam for n in (10, 100, 10**4, 10**6)]
    assert all(b > a for a, b in zip(lams, lams[1:]))
    assert abs(lams[-1] - lam1) < abs(lams[0] - lam1)
    lams = [truncated_maximizer(LOGLOG, n).lam for n in (100, 10**4, 10**6)]
    assert all(b > a for a, b in zip(lams, lams[1:])) and lams[-1] < 1.0


def test_truncated_solver_agrees_with_analytic_maximizer():
    for n in (3, 6, 12):
        rep = solve_capacity(family_channel(POWER, n), tol=1e-12)
        assert rep.capacity_nats == pytest.approx(truncated_maximizer(POWER, n).entropy, abs=1e-10)


def test_omega_entropy_enclosure():
    for seq in (POWER, LOG):
        an = classify(seq)
        enc = omega_entropy_enclosure(seq, an, 1000)
        assert enc.contains(an.capacity_nats, slack=1e-6)
    an = classify(LOGLOG)
    enc = omega_entropy_enclosure(LOGLOG, an, 1000)
    assert enc.hi < an.capacity_nats
    assert enc.contains(an.omega_entropy, slack=1e-9)


def test_ce_witness():
    s = QSequence("power", prefix=(0.25,))
    w = ce_witness_path(s, 1)
    p = 1 / 4
    assert w.entropy == pytest.approx(-p * math.log(p) - (1 - p) * math.log(1 - p), abs=1e-14)
    assert np.allclose(w.diagonal, [0.75, 0.25])
    assert ce_witness_path(POWER, 10**4).entropy <= 0.01
    ent = ce_witness_entropies(LOG, 10**6)
    assert ent[999:].min() > 0.3
    with pytest.raises(ValidationError):
        ce_witness_path(POWER, 0)


def test_ce_witness_vector_matches_states():
    ent = ce_witness_entropies(LOG, 50)
    for n in (1, 7, 50):
        w = ce_witness_path(LOG, n)
        d = w.diagonal[w.diagonal > 0]
        assert ent[n - 1] == pytest.approx(-np.sum(d * np.log(d)), abs=1e-12)
