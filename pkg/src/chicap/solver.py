"""Chi-capacity of finite cq channels with a duality-gap certificate.

The capacity equals the smallest divergence radius
``min_sigma max_k H(sigma_k || sigma)``, attained at the output optimal
average state ``omega``. The solver runs the multiplicative update
``p_k <- p_k exp(D_k) / Z`` with ``D_k = H(sigma_k || omega_p)`` and stops
once ``max_k D_k - chi(p)`` (an upper bound on the distance to the true
capacity) drops below the tolerance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .channel import CqChannel, apply, check_distribution
from .errors import AscentViolation, DegenerateChannel, NotConverged
from .spectral import KERNEL_TOL, SUPPORT_TOL, _eigh, density

log = logging.getLogger(__name__)

FREEZE_BELOW = 1e-300
EXPONENT_CAP = 700.0
# omega_p = sum_k p_k sigma_k contains every letter with p_k > 0 in its
# support, and genuine eigenvalues of omega_p can be far below KERNEL_TOL,
# so iterates only treat nonpositive eigenvalues as kernel
ITERATE_KERNEL_TOL = 0.0


@dataclass
class CapacityReport:
    capacity_nats: float
    optimal_p: np.ndarray
    omega: np.ndarray
    per_letter_divergence: np.ndarray
    duality_gap: float
    iterations: int
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def capacity_bits(self) -> float:
        return self.capacity_nats / math.log(2)

    @property
    def upper_bound(self) -> float:
        return self.capacity_nats + self.duality_gap


def letter_divergences(ch: CqChannel, sigma, kernel_tol: float = KERNEL_TOL) -> np.ndarray:
    """``H(sigma_k || sigma)`` for every letter, ``inf`` off the support.

    Eigenvalues of ``sigma`` at or below ``kernel_tol`` span the kernel.
    """
    w, v = _eigh(np.asarray(sigma, dtype=complex))
    kernel = w <= kernel_tol
    logw = np.where(kernel, 0.0, np.log(np.where(kernel, 1.0, w)))
    log_sigma = (v * logw) @ v.conj().T
    cross = ch.traces_with(log_sigma).real
    div = np.maximum(-ch.output_entropies - cross, 0.0)
    if kernel.any():
        vk = v[:, kernel]
        ker_mass = ch.traces_with(vk @ vk.conj().T).real
        div[ker_mass > SUPPORT_TOL] = math.inf
    return div


def _holevo(p, div):
    on = p > 0
    return float(np.dot(p[on], div[on]))


def evaluate(ch: CqChannel, p, iterations: int = 0, converged: bool = False) -> CapacityReport:
    """Certificate quantities at an arbitrary input distribution ``p``."""
    p = check_distribution(p, ch.letters)
    omega = apply(ch, p)
    div = letter_divergences(ch, omega, ITERATE_KERNEL_TOL)
    chi = _holevo(p, div)
    return CapacityReport(
        capacity_nats=chi,
        optimal_p=p,
        omega=omega,
        per_letter_divergence=div,
        duality_gap=float(np.max(div) - chi),
        iterations=iterations,
        converged=converged,
    )


def _all_outputs_equal(ch: CqChannel) -> bool:
    return bool(np.max(np.abs(ch.outputs - ch.outputs[0])) <= 1e-12)


def solve_capacity(
    ch: CqChannel,
    tol: float = 1e-8,
    max_iter: int = 100_000,
    *,
    strict_degenerate: bool = False,
    raise_on_failure: bool = True,
) -> CapacityReport:
    """Certified chi-capacity of ``ch`` by monotone fixed-point ascent.

    Raises :class:`NotConverged` (carrying the last report) when the gap is
    still above ``tol`` after ``max_iter`` updates.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = ch.letters
    if _all_outputs_equal(ch):
        if strict_degenerate:
            raise DegenerateChannel("all outputs coincide; capacity is 0")
        rep = evaluate(ch, np.full(k, 1.0 / k), converged=True)
        rep.capacity_nats, rep.duality_gap = 0.0, 0.0
        rep.per_letter_divergence = np.zeros(k)
        rep.diagnostics["degenerate"] = True
        return rep

    p = np.full(k, 1.0 / k)
    div = letter_divergences(ch, ch.mix(p), ITERATE_KERNEL_TOL)
    chi = _holevo(p, div)
    gap = float(np.max(div) - chi)
    it = 0
    while gap > tol and it < max_iter:
        e = np.minimum(div, EXPONENT_CAP)
        new = p * np.exp(e - np.max(e[p > 0]))
        new[new < FREEZE_BELOW] = 0.0
        new /= new.sum()
        new_div = letter_divergences(ch, ch.mix(new), ITERATE_KERNEL_TOL)
        new_chi = _holevo(new, new_div)
        if new_chi < chi - 1e-12 * max(1.0, chi):
            raise AscentViolation(f"chi decreased from {chi!r} to {new_chi!r} at step {it}")
        p, div, chi = new, new_div, new_chi
        gap = float(np.max(div) - chi)
        it += 1
        if it % 1000 == 0:
            log.debug("iteration %d chi=%.15g gap=%.3e", it, chi, gap)

    omega = density(ch.mix(p))
    rep = CapacityReport(
        capacity_nats=chi,
        optimal_p=p,
        omega=np.array(omega),
        per_letter_divergence=div,
        duality_gap=gap,
        iterations=it,
        converged=gap <= tol,
        diagnostics={"tol": tol, "max_iter": max_iter, "frozen_letters": int(np.sum(p == 0))},
    )
    if not rep.converged and raise_on_failure:
        raise NotConverged(f"gap {gap:.3e} > {tol:.1e} after {it} iterations", rep)
    return rep


def divergence_radius_upper_bound(ch: CqChannel, sigma) -> float:
    """``max_k H(sigma_k || sigma)``; an upper bound on the capacity for every ``sigma``."""
    return float(np.max(letter_divergences(ch, density(sigma))))


class MaximalDistanceCheck(NamedTuple):
    ok: bool
    witnesses: list


def verify_maximal_distance(
    report: CapacityReport, support_tol: float = 1e-6, dist_tol: float = 1e-5
) -> MaximalDistanceCheck:
    """Check that support letters sit at divergence ``C`` and no letter exceeds it."""
    cap = report.capacity_nats
    witnesses = []
    for k, (pk, dk) in enumerate(zip(report.optimal_p, report.per_letter_divergence)):
        if pk > support_tol and abs(dk - cap) > dist_tol:
            witnesses.append({"letter": k, "p": float(pk), "divergence": float(dk), "reason": "support letter off the sphere"})
        elif dk > cap + dist_tol:
            witnesses.append({"letter": k, "p": float(pk), "divergence": float(dk), "reason": "letter outside the ball"})
    return MaximalDistanceCheck(not witnesses, witnesses)
