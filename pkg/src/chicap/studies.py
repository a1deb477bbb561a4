"""Convergence tables shared by the command line and the demos."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .channel import CqChannel, spectral_truncation, sup_trace_norm_deviation
from .errors import NoSolutionYet
from .qfamily import family_channel, truncated_maximizer
from .random import rand_distribution
from .solver import solve_capacity


class TruncationRow(NamedTuple):
    n: int
    capacity_n: float
    gap_n: float
    sup_trace_dist_n: float


def truncation_study(ch: CqChannel, tol: float = 1e-10, inputs: int = 100, seed: int = 0, max_iter: int = 100_000):
    """Capacities of the rank-``n`` spectral truncations around the optimal omega.

    Returns the full-channel report and one row per rank. The trace-norm
    column is the maximum over ``inputs`` random input distributions.
    """
    full = solve_capacity(ch, tol=tol, max_iter=max_iter)
    rng = np.random.default_rng(seed)
    ps = np.stack([rand_distribution(ch.letters, rng) for _ in range(inputs)])
    rows = []
    for rank in range(1, ch.dim + 1):
        trunc = spectral_truncation(ch, full.omega, rank)
        rep = solve_capacity(trunc, tol=tol, max_iter=max_iter)
        rows.append(TruncationRow(rank, rep.capacity_nats, rep.duality_gap, sup_trace_norm_deviation(ch, trunc, ps)))
    return full, rows


class FamilyRow(NamedTuple):
    n: int
    lambda_n: float
    entropy_rho_n: float
    capacity_n: float
    gap_n: float


def family_schedule(n_max: int, points: int = 8) -> list[int]:
    grid = np.unique(np.round(np.geomspace(2, max(n_max, 2), points)).astype(int))
    return [int(n) for n in grid if n <= n_max]


def family_convergence(seq, ns, tol: float = 1e-10, max_iter: int = 100_000) -> list[FamilyRow]:
    """``lam_n``, ``H(rho_n)`` and the solver capacity of the truncated channel for each ``n``.

    ``lam_n`` and ``H(rho_n)`` are NaN while the truncated equation has no
    solution.
    """
    rows = []
    for n in ns:
        try:
            tm = truncated_maximizer(seq, n)
            lam, ent = tm.lam, tm.entropy
        except NoSolutionYet:
            lam = ent = float("nan")
        rep = solve_capacity(family_channel(seq, n), tol=tol, max_iter=max_iter)
        rows.append(FamilyRow(n, lam, ent, rep.capacity_nats, rep.duality_gap))
    return rows
