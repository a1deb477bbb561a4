"""Analytics for the channel family built from a null sequence ``q_n``.

Letter ``k`` (a nonzero integer) is sent to the pure state

    sigma_k = (1 - q) |0><0| + q |k|><|k| + sign(k) sqrt(q (1 - q)) (|0><|k|| + h.c.)

with ``q = q_|k|``. Everything about the capacity is governed by

    E(lam) = sum_n exp(-lam / q_n),   G(lam) = sum_n exp(-lam / q_n) / q_n,

through ``F = G - E`` and the convergence abscissa ``lam*`` of ``E``. The
sequence is described analytically (:class:`QSequence`) because ``lam*``
and the divergence of ``F`` cannot be read off finitely many terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import mpmath
import numpy as np

from .channel import CqChannel
from .errors import (
    IndexOutOfRange,
    NoSolutionYet,
    RootBracketFailure,
    UnsupportedTailClass,
    ValidationError,
    WrongCase,
)
from .series import Interval, bisect_decreasing, tail_bounded_sum
from .spectral import SpectralTail, decrease_coefficient

KINDS = ("power", "log", "loglog", "iterlog")
# |F(lam*) - 1| below this counts as equality when splitting cases B and C
BOUNDARY_TOL = 1e-9
mpmath.mp.dps = 30


@dataclass(frozen=True)
class QSequence:
    """Null sequence in ``(0, 1]`` given by a tail class.

    ``power``    q_n = c / n**a
    ``log``      q_n = c / log(n + b)
    ``loglog``   q_n = c / (log(n + b) + m log log(n + b))
    ``iterlog``  q_n = c / log(log(n + b))

    Values are capped at 1 and the first ``len(prefix)`` terms may be given
    explicitly.
    """

    kind: str
    c: float = 1.0
    a: float = 1.0
    b: float = 1.0
    m: float = 0.0
    prefix: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedTailClass(f"unknown tail class {self.kind!r}")
        if self.c <= 0:
            raise ValidationError("c must be positive")
        if self.kind == "power" and self.a <= 0:
            raise ValidationError("power class needs a > 0")
        if self.kind in ("log", "loglog") and math.log(1 + self.b) <= (1.0 if self.kind == "loglog" else 0.0):
            raise ValidationError("shift b too small: log(n + b) must exceed 1 (loglog) or 0 (log)")
        if self.kind == "iterlog" and math.log(1 + self.b) <= 1.0:
            raise ValidationError("iterlog class needs log(1 + b) > 1")
        if self.kind == "loglog" and self.m < 0:
            raise ValidationError("loglog class needs m >= 0")
        if any(not 0 < x <= 1 for x in self.prefix):
            raise ValidationError("prefix values must lie in (0, 1]")
        object.__setattr__(self, "prefix", tuple(float(x) for x in self.prefix))

    # 1/q_n from the tail formula, valid for real x >= 1
    def inv_q_formula(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "power":
            return x**self.a / self.c
        big = np.log(x + self.b)
        if self.kind == "log":
            return big / self.c
        if self.kind == "loglog":
            return (big + self.m * np.log(big)) / self.c
        return np.log(big) / self.c

    def inv_q(self, n):
        n = np.asarray(n, dtype=float)
        inv = np.maximum(self.inv_q_formula(n), 1.0)
        k = len(self.prefix)
        if k:
            pre = np.asarray(self.prefix)
            head = n <= k
            idx = np.clip(n.astype(int) - 1, 0, k - 1)
            inv = np.where(head, 1.0 / pre[idx], inv)
        return inv

    def q(self, n):
        return 1.0 / self.inv_q(n)

    @property
    def lambda_star(self) -> float:
        """Infimum of ``lam`` with ``sum_n exp(-lam/q_n) < inf``."""
        return {"power": 0.0, "log": self.c, "loglog": self.c, "iterlog": math.inf}[self.kind]

    @property
    def tail_start(self) -> int:
        """First index past the prefix from which the formula is below 1."""
        n = max(len(self.prefix) + 1, 1)
        while self.inv_q_formula(n) <= 1.0:
            n *= 2
            if n > 1 << 40:
                raise UnsupportedTailClass("sequence never drops below 1")
        lo, hi = max(len(self.prefix) + 1, n // 2), n
        while lo < hi:
            mid = (lo + hi) // 2
            if self.inv_q_formula(mid) > 1.0:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def diverges(self, lam: float, weighted: bool) -> bool:
        """Whether ``E(lam)`` (or ``G(lam)`` when ``weighted``) is infinite."""
        ls = self.lambda_star
        if lam > ls:
            return False
        if lam < ls or self.kind in ("power", "log", "iterlog"):
            return True
        # loglog at lam* = c: terms ~ (log y)^(1-m) / y or (log y)^(-m) / y
        return self.m <= (2.0 if weighted else 1.0)

    def tail_integrals(self, lam: float, x: float):
        """``(int_x^inf exp(-lam h), err, int_x^inf h exp(-lam h), err)`` with ``h = 1/q``."""
        if self.kind == "power":
            a, c = self.a, self.c
            u = lam * x**a / c
            pre = (c / lam) ** (1 / a) / a
            e = pre * mpmath.gammainc(1 / a, u)
            g = pre / lam * mpmath.gammainc(1 / a + 1, u)
            return float(e), 0.0, float(g), 0.0
        y = x + self.b
        if self.kind == "log":
            s = lam / self.c
            ly = math.log(y)
            e = y ** (1 - s) / (s - 1)
            g = y ** (1 - s) * (ly / (s - 1) + 1 / (s - 1) ** 2) / self.c
            return e, 0.0, g, 0.0
        if self.kind == "loglog":
            return self._loglog_integrals(lam, math.log(y))
        raise UnsupportedTailClass("iterlog sums diverge for every lambda")

    def _loglog_integrals(self, lam, big0):
        # substitute L = log(x + b): integrand exp(-(s-1) L) L^(-s m) (...) dL
        s = lam / self.c
        kappa = mpmath.mpf(s - 1)
        alpha = mpmath.mpf(s * self.m)
        big0 = mpmath.mpf(big0)

        def j(al):  # int_{L0}^inf exp(-kappa L) L^(-al) dL
            if kappa == 0:
                return big0 ** (1 - al) / (al - 1)
            return kappa ** (al - 1) * mpmath.gammainc(1 - al, kappa * big0)

        e = j(alpha)
        # h = (L + m log L) / c ; int log L ... = -dJ/d(alpha)
        g = (j(alpha - 1) - self.m * mpmath.diff(j, alpha)) / self.c
        return float(e), 1e-14 * abs(float(e)), float(g), 1e-14 * abs(float(g))


@dataclass(frozen=True)
class FiniteSequence:
    """Raw list ``q_1..q_N``; usable only for truncated computations."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(x) for x in self.values)
        if not vals or any(not 0 < x <= 1 for x in vals):
            raise ValidationError("values must lie in (0, 1]")
        object.__setattr__(self, "values", vals)

    def inv_q(self, n):
        n = np.asarray(n)
        if np.any(n < 1) or np.any(n > len(self.values)):
            raise IndexOutOfRange(f"index outside 1..{len(self.values)}")
        return 1.0 / np.asarray(self.values)[n.astype(int) - 1]

    def q(self, n):
        return 1.0 / self.inv_q(n)


def _require_analytic(seq) -> QSequence:
    if not isinstance(seq, QSequence):
        raise UnsupportedTailClass("a finite list of values does not determine lambda* or the case")
    return seq


def _series(seq: QSequence, lam: float, which: str, tol: float, rtol: float, start: int = 1) -> Interval:
    seq = _require_analytic(seq)
    weighted = which in ("G", "F")
    if seq.diverges(lam, weighted):
        return Interval.infinite()

    def term(n):
        h = seq.inv_q(n)
        e = np.exp(-lam * h)
        if which == "E":
            return e
        if which == "G":
            return h * e
        return (h - 1.0) * e

    def tail(x):
        e, e_err, g, g_err = seq.tail_integrals(lam, x)
        if which == "E":
            return e, e_err
        if which == "G":
            return g, g_err
        return g - e, g_err + e_err

    probe = tail_bounded_sum(term, tail, tol=math.inf, start=start, tail_from=seq.tail_start)
    target = max(tol, rtol * abs(probe.hi))
    return tail_bounded_sum(term, tail, tol=target, start=start, tail_from=seq.tail_start)


def exp_sum(seq: QSequence, lam: float, tol: float = 1e-10, rtol: float = 0.0) -> Interval:
    """``E(lam) = sum_n exp(-lam / q_n)``."""
    return _series(seq, lam, "E", tol, rtol)


def weighted_exp_sum(seq: QSequence, lam: float, tol: float = 1e-10, rtol: float = 0.0) -> Interval:
    """``G(lam) = sum_n exp(-lam / q_n) / q_n``."""
    return _series(seq, lam, "G", tol, rtol)


def F_value(seq: QSequence, lam: float, tol: float = 1e-10, rtol: float = 0.0) -> Interval:
    """Enclosure of ``F(lam) = sum_k (1/q_k - 1) exp(-lam / q_k)``."""
    if lam < 0:
        raise ValidationError("lambda must be nonnegative")
    return _series(seq, lam, "F", tol, rtol)


def F_scalar(seq: QSequence, lam: float, tol: float = 1e-10) -> float:
    """Midpoint of :func:`F_value`, guaranteed within ``tol`` of the true sum."""
    return F_value(seq, lam, tol=2 * tol).mid


def sigma_state(seq: QSequence, k: int, dim: int) -> np.ndarray:
    """Pure output state for letter ``k != 0`` embedded in ``dim`` levels."""
    k = int(k)
    if k == 0 or abs(k) >= dim:
        raise IndexOutOfRange(f"letter {k} needs 0 < |k| < dim = {dim}")
    q = float(seq.q(abs(k)))
    out = np.zeros((dim, dim))
    off = math.copysign(math.sqrt((1 - q) * q), k)
    out[0, 0], out[abs(k), abs(k)] = 1 - q, q
    out[0, abs(k)] = out[abs(k), 0] = off
    return out


def letter_order(n: int) -> np.ndarray:
    """Letters ``1..n`` followed by ``-1..-n``; the layout of :func:`family_channel`."""
    ks = np.arange(1, n + 1)
    return np.concatenate([ks, -ks])


def family_channel(seq: QSequence, n: int) -> CqChannel:
    """Channel restricted to letters ``±1..±n`` on ``n + 1`` output levels."""
    return CqChannel(np.stack([sigma_state(seq, k, n + 1) for k in letter_order(n)]))


@dataclass
class FamilyAnalysis:
    """Closed-form capacity data for one sequence.

    In cases A and B the capacity also equals the maximal entropy over
    states with ``<H> <= 1`` for ``H = sum_n |n><n| / q_n``, whose Gibbs
    form fixes the omega weights below.
    """

    lambda_star: float
    F_at_lambda_star: float
    case: str
    lambda_sol: float = math.nan
    pi_sol: float = math.nan
    capacity_nats: float = math.nan
    omega_entropy: float = math.nan
    omega_head: list = field(default_factory=list)
    dc_omega: float | None = None
    h_star: float = math.nan
    E_sol: Interval | None = None
    G_sol: Interval | None = None

    @property
    def capacity_minus_omega_entropy(self) -> float:
        return self.capacity_nats - self.omega_entropy

    def to_dict(self) -> dict:
        out = {
            "lambda_star": self.lambda_star,
            "F_at_lambda_star": self.F_at_lambda_star,
            "case": self.case,
            "lambda_sol": self.lambda_sol,
            "pi_sol": self.pi_sol,
            "capacity_nats": self.capacity_nats,
            "omega_entropy": self.omega_entropy,
            "omega_head": list(map(float, self.omega_head)),
            "dc_omega": self.dc_omega,
            "h_star": self.h_star,
        }
        return out


def _F_mid(seq, lam):
    return F_value(seq, lam, tol=1e-13, rtol=1e-13).mid


def solve_F_equals_one(seq: QSequence) -> float:
    """Root of ``F(lam) = 1`` on ``(lam*, inf)``, assuming ``F(lam*) > 1``."""
    ls = seq.lambda_star
    step = 1.0
    lo = ls + step
    # shrink toward lam* until F(lo) >= 1
    for _ in range(200):
        if _F_mid(seq, lo) >= 1.0:
            break
        step /= 2
        lo = ls + step
        if step < 1e-14 * max(1.0, ls):
            lo = ls
            break
    hi = lo + 1.0
    for _ in range(200):
        if _F_mid(seq, hi) < 1.0:
            break
        hi = ls + 2 * (hi - ls)
    else:
        raise RootBracketFailure("F stays above 1", {"hi": hi})
    return bisect_decreasing(lambda x: _F_mid(seq, x), lo, hi, target=1.0)


def classify(seq: QSequence, omega_levels: int = 32) -> FamilyAnalysis:
    """Case A-D classification with capacity, omega and diagnostics."""
    seq = _require_analytic(seq)
    ls = seq.lambda_star
    if math.isinf(ls):
        return FamilyAnalysis(ls, math.inf, "D", capacity_nats=math.inf, omega_entropy=math.inf, h_star=math.nan)
    f_star = F_value(seq, ls, tol=1e-12).mid
    if ls == 0:
        case = "A"
    elif f_star >= 1 - BOUNDARY_TOL:
        case = "B"
    else:
        case = "C"

    if case == "C" or (case == "B" and abs(f_star - 1) <= BOUNDARY_TOL):
        lam = ls
    else:
        lam = solve_F_equals_one(seq)

    e = exp_sum(seq, lam, tol=1e-12)
    g = weighted_exp_sum(seq, lam, tol=1e-12)
    pi = 1.0 / (1.0 + e.mid)
    capacity = lam - math.log(pi)
    h_omega = -math.log(pi) + lam * pi * g.mid
    if ls == 0 or seq.diverges(ls, weighted=True):
        h_star = math.inf
    else:
        h_star = weighted_exp_sum(seq, ls, tol=1e-12).mid / (1.0 + exp_sum(seq, ls, tol=1e-12).mid)
    dc = decrease_coefficient(SpectralTail(threshold=ls, beta=lam))
    head = [pi] + list(pi * np.exp(-lam * seq.inv_q(np.arange(1, omega_levels + 1))))

    out = FamilyAnalysis(
        lambda_star=ls,
        F_at_lambda_star=f_star,
        case=case,
        lambda_sol=lam,
        pi_sol=pi,
        capacity_nats=capacity,
        omega_entropy=h_omega,
        omega_head=head,
        dc_omega=dc,
        h_star=h_star,
        E_sol=e,
        G_sol=g,
    )
    _check_analysis(seq, out)
    return out


def _check_analysis(seq, an: FamilyAnalysis):
    if an.case in ("A", "B"):
        resid = F_value(seq, an.lambda_sol, tol=1e-12).mid - 1.0
        if abs(resid) > 1e-10 and not (an.case == "B" and an.lambda_sol == an.lambda_star):
            raise ArithmeticError(f"F(lambda_1) - 1 = {resid:.3e}")
        if abs(an.capacity_nats - an.omega_entropy) > 1e-8:
            raise ArithmeticError("capacity differs from H(omega) in case A/B")
    if an.case == "A" and an.dc_omega != 0.0:
        raise ArithmeticError("case A needs dc(omega) = 0")
    if an.case == "B" and not 0 < an.dc_omega <= 1:
        raise ArithmeticError("case B needs dc(omega) in (0, 1]")
    if an.case == "C":
        if an.dc_omega != 1.0:
            raise ArithmeticError("case C needs dc(omega) = 1")
        if not an.capacity_nats > an.omega_entropy:
            raise ArithmeticError("case C needs capacity > H(omega)")


def omega_entropy_enclosure(seq: QSequence, an: FamilyAnalysis, levels: int) -> Interval:
    """``H(omega)`` from its first ``levels`` eigenvalues plus an enclosed tail.

    Eigenvalues are ``pi`` and ``pi exp(-lam/q_n)``; the entropy beyond
    level ``levels`` is ``pi lam G_tail - pi log(pi) E_tail``.
    """
    if an.case == "D":
        return Interval.infinite()
    lam, pi = an.lambda_sol, an.pi_sol
    w = pi * np.exp(-lam * seq.inv_q(np.arange(1, levels + 1)))
    w = np.concatenate([[pi], w])
    w = w[w > 0]
    head = float(-np.sum(w * np.log(w)))
    g_tail = _series(seq, lam, "G", 1e-13, 0.0, start=levels + 1)
    e_tail = _series(seq, lam, "E", 1e-13, 0.0, start=levels + 1)
    return head + g_tail.scale(pi * lam) + e_tail.scale(-pi * math.log(pi))


@dataclass
class OptimalWeights:
    letters: np.ndarray
    weights: np.ndarray
    tail_mass: Interval

    @property
    def total(self) -> Interval:
        return self.tail_mass + float(np.sum(self.weights))


def optimal_measure_weights(an: FamilyAnalysis, seq: QSequence, n: int) -> OptimalWeights:
    """Weights ``pi/(2 q_k) exp(-lam/q_k)`` on letters ``±1..±n`` plus the tail mass."""
    if an.case not in ("A", "B"):
        raise WrongCase(f"no optimal measure in case {an.case}")
    ks = letter_order(n)
    inv = seq.inv_q(np.abs(ks))
    w = an.pi_sol * 0.5 * inv * np.exp(-an.lambda_sol * inv)
    tail = _series(seq, an.lambda_sol, "G", 1e-13, 0.0, start=n + 1).scale(an.pi_sol)
    return OptimalWeights(ks, w, tail)


def barycenter_image(seq: QSequence, letters, weights, dim: int) -> np.ndarray:
    """``sum_k w_k sigma_k`` assembled entrywise (letters' outputs are 2x2 blocks)."""
    out = np.zeros((dim, dim))
    for k, w in zip(letters, weights):
        j = abs(int(k))
        q = float(seq.q(j))
        out[0, 0] += w * (1 - q)
        out[j, j] += w * q
        off = w * math.copysign(math.sqrt(q * (1 - q)), k)
        out[0, j] += off
        out[j, 0] += off
    return out


@dataclass
class TruncatedMaximizer:
    n: int
    lam: float
    residual: float
    diagonal: np.ndarray  # eigenvalues of rho_n on levels 0..n
    letter_weights: np.ndarray  # decomposition weights on letter_order(n)

    @property
    def rho(self) -> np.ndarray:
        return np.diag(self.diagonal)

    @property
    def entropy(self) -> float:
        d = self.diagonal[self.diagonal > 0]
        return float(-np.sum(d * np.log(d)))


def truncated_maximizer(seq: QSequence, n: int) -> TruncatedMaximizer:
    """Entropy maximizer over mixtures of letters ``±1..±n``.

    ``lam_n`` solves ``1 + sum_k e_k = sum_k e_k / q_k`` with
    ``e_k = exp(-lam / q_k)``, ``k <= n``.
    """
    inv = seq.inv_q(np.arange(1, n + 1))
    excess = inv - 1.0

    def fn(lam):
        return float(np.dot(excess, np.exp(-lam * inv)))

    if fn(0.0) <= 1.0:
        raise NoSolutionYet(f"no solution for n = {n}: sum(1/q_k - 1) = {fn(0.0):.3g} <= 1")
    hi = 1.0
    while fn(hi) >= 1.0:
        hi *= 2
    lam = bisect_decreasing(fn, 0.0, hi, target=1.0)
    e = np.exp(-lam * inv)
    resid = abs(1.0 + e.sum() - float(np.dot(inv, e)))
    diag = np.concatenate([[1.0], e]) / (1.0 + e.sum())
    per = inv * e
    half = per / (2 * per.sum())
    return TruncatedMaximizer(n, lam, resid, diag, np.concatenate([half, half]))


@dataclass
class CeWitness:
    n: int
    diagonal: np.ndarray
    entropy: float


def ce_witness_path(seq: QSequence, n: int) -> CeWitness:
    """Mixture of letters ``1..n`` with weights ``∝ 1/q_k`` and its entropy.

    The state is ``(1 - n/S)|0><0| + sum_{k<=n} |k><k| / S`` with
    ``S = sum_{k<=n} 1/q_k``; it tends to ``|0><0|`` while its entropy
    tends to 0 only when ``lam* = 0``.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    s = float(np.sum(seq.inv_q(np.arange(1, n + 1))))
    diag = np.full(n + 1, 1.0 / s)
    diag[0] = 1.0 - n / s
    return CeWitness(n, diag, float(ce_witness_entropies(seq, n)[-1]))


def ce_witness_entropies(seq: QSequence, n_max: int) -> np.ndarray:
    """Entropies of the witness states for every ``n = 1..n_max``."""
    n = np.arange(1, n_max + 1, dtype=float)
    s = np.cumsum(seq.inv_q(n))
    x = n / s
    with np.errstate(divide="ignore", invalid="ignore"):
        head = np.where(x < 1, -(1 - x) * np.log1p(-x), 0.0)
    return head + x * np.log(s)


def search_case_c(
    b: float = 10.0,
    c_grid=(0.5, 1.0, 2.0),
    m_grid=(3.0, 4.0, 5.0),
    target: float = 0.9,
) -> QSequence:
    """First loglog sequence in the scan with ``F(lam*) < target``.

    Requires ``m > 2`` so that ``F(lam*)`` is finite.
    """
    for m in m_grid:
        for c in c_grid:
            seq = QSequence("loglog", c=c, b=b, m=m)
            if seq.diverges(seq.lambda_star, weighted=True):
                continue
            if F_value(seq, seq.lambda_star, tol=1e-10).hi < target:
                return seq
    raise ValueError("no case-C parameters in the scanned grid")


def tune_boundary(m: float = 3.0, b: float = 10.0, c_lo: float = 0.05, c_hi: float = 5.0) -> QSequence:
    """loglog sequence with ``F(lam*) = 1``: the B/C boundary.

    At ``lam = c`` the factor ``exp(-lam/q_n)`` does not depend on ``c``, so
    ``F(lam*)`` is decreasing in ``c`` and bisection on ``c`` applies.
    """
    base = QSequence("loglog", c=1.0, b=b, m=m)

    def f(c):
        seq = replace(base, c=c)
        return F_value(seq, seq.lambda_star, tol=1e-12).mid

    c = bisect_decreasing(f, c_lo, c_hi, target=1.0)
    return replace(base, c=c)
