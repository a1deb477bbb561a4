"""Orbit channels of the cyclic group and their Fourier-coefficient limit.

The orbit channel of a seed state ``sigma`` on ``C^d`` sends group element
``g`` to ``V_g sigma V_g^H`` with ``V_g |j> = |j + g mod d>``. Its
capacity is ``H(sigma || omega)`` for the group average ``omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import CqChannel
from .errors import InvalidRange, NormalizationError, ValidationError
from .spectral import density, relative_entropy, shannon_entropy, von_neumann_entropy

NORM_TOL = 1e-10


def shift(d: int, g: int = 1) -> np.ndarray:
    return np.roll(np.eye(d), g, axis=0)


@dataclass(frozen=True, eq=False)
class OrbitChannel:
    seed: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "seed", density(self.seed))

    @property
    def d(self) -> int:
        return self.seed.shape[0]

    def output(self, g: int) -> np.ndarray:
        # V_g sigma V_g^H permutes rows and columns alike
        return np.roll(np.roll(self.seed, g, axis=0), g, axis=1)

    def as_cq(self) -> CqChannel:
        return CqChannel(np.stack([self.output(g) for g in range(self.d)]))


def group_average(ch: OrbitChannel) -> np.ndarray:
    """Haar average ``(1/d) sum_g V_g sigma V_g^H``: a circulant matrix."""
    d = ch.d
    s = ch.seed
    rows = np.arange(d)
    # entry (i, j) depends on i - j only: average sigma along each wrapped diagonal
    diag_means = np.array([np.mean(s[(rows + k) % d, rows]) for k in range(d)])
    omega = diag_means[(rows[:, None] - rows[None, :]) % d]
    return density(omega)


class OrbitCapacity(NamedTuple):
    capacity: float
    omega: np.ndarray
    h_min: float
    is_ce: bool


def orbit_capacity(ch: OrbitChannel) -> OrbitCapacity:
    """Capacity ``H(sigma || omega)`` with the entropy-difference cross-check.

    ``log omega`` commutes with every shift, so ``Tr sigma log omega`` equals
    ``Tr omega log omega`` and the divergence is ``H(omega) - H(sigma)``.
    In finite dimension the channel is always CE.
    """
    omega = group_average(ch)
    cap = relative_entropy(ch.seed, omega)
    h_sigma = von_neumann_entropy(ch.seed)
    diff = von_neumann_entropy(omega) - h_sigma
    if abs(cap - diff) > 1e-9:
        raise ArithmeticError(f"H(sigma||omega) = {cap!r} but H(omega) - H(sigma) = {diff!r}")
    return OrbitCapacity(cap, omega, h_sigma, True)


@dataclass(frozen=True, eq=False)
class FourierState:
    """Finitely many Fourier coefficients ``phi_k`` of a unit vector in ``L2`` of the circle."""

    coefficients: np.ndarray
    indices: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex).ravel()
        norm = float(np.sum(np.abs(c) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(f"sum |phi_k|^2 = {norm!r}")
        idx = np.arange(c.size) if self.indices is None else np.asarray(self.indices, dtype=int)
        if idx.shape != c.shape or np.unique(idx).size != idx.size:
            raise ValidationError("indices must be distinct and match the coefficients")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "indices", idx)

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2


class FourierCapacity(NamedTuple):
    capacity: float
    omega_eigenvalues: np.ndarray  # in the trigonometric basis, ordered like the coefficients


def fourier_capacity(phi: FourierState) -> FourierCapacity:
    w = phi.weights
    return FourierCapacity(shannon_entropy(w), w)


def discontinuity_state(q: float, n: int) -> FourierState:
    """``phi_n = (sqrt(1 - q), sqrt(q/n), ..., sqrt(q/n))`` with ``n`` equal tail entries."""
    return FourierState(np.concatenate([[math.sqrt(1 - q)], np.full(n, math.sqrt(q / n))]))


def discontinuity_capacity(q: float, n: int) -> float:
    """Closed-form capacity of :func:`discontinuity_state`."""
    return -q * math.log(q) - (1 - q) * math.log1p(-q) + q * math.log(n)


class DemoRow(NamedTuple):
    n: int
    q_n: float
    capacity: float
    coeff_distance: float


def discontinuity_demo(c_target: float, n_values) -> list[DemoRow]:
    """Capacities along ``q_n = C / log n``, which tend to ``C``.

    The states converge in norm to the single-coefficient limit, whose
    channel has capacity 0, so capacity is only lower semicontinuous.
    """
    if c_target <= 0:
        raise InvalidRange("C must be positive")
    rows = []
    for n in n_values:
        n = int(n)
        if n < 2:
            raise InvalidRange(f"n = {n}: log n must be positive")
        q = c_target / math.log(n)
        if not 0 < q < 1:
            raise InvalidRange(f"q_n = {q:g} outside (0, 1) at n = {n}")
        # ||phi_n - phi_*||^2 = (1 - sqrt(1-q))^2 + n (q/n)
        dist = math.hypot(1 - math.sqrt(1 - q), math.sqrt(q))
        rows.append(DemoRow(n, q, discontinuity_capacity(q, n), dist))
    return rows


def limit_state() -> FourierState:
    return FourierState(np.array([1.0]))
