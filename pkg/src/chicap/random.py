"""Seeded random states, unitaries and channels for tests and studies."""

import numpy as np
from scipy.stats import unitary_group

from .channel import CqChannel


def rand_unitary(dim, rng):
    return unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.ones((1, 1), complex)


def rand_density(dim, rng, rank=None):
    """Induced-measure density matrix of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def rand_pure(dim, rng):
    return rand_density(dim, rng, rank=1)


def rand_distribution(size, rng):
    return rng.dirichlet(np.ones(size))


def rand_channel(dim, letters, rng, rank=None):
    """Channel with independent random outputs; ``rank=None`` draws a rank per letter."""
    outs = []
    for _ in range(letters):
        r = rng.integers(1, dim + 1) if rank is None else rank
        outs.append(rand_density(dim, rng, r))
    return CqChannel(np.stack(outs))


def decaying_channel(dim=16, letters=6, ratio=0.3, seed=0):
    """Channel whose outputs concentrate geometrically on low basis levels.

    Each output is ``D G G^H D`` normalized, with ``D = diag(ratio**(j/2))``
    and ``G`` complex Gaussian, so level ``j`` carries weight of order
    ``ratio**j``. Used as the fixed test channel for truncation studies.
    """
    rng = np.random.default_rng(seed)
    scale = np.sqrt(ratio ** np.arange(dim))
    outs = []
    for _ in range(letters):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        m = (scale[:, None] * g) @ (scale[:, None] * g).conj().T
        m = 0.5 * (m + m.conj().T)
        outs.append(m / np.trace(m).real)
    return CqChannel(np.stack(outs))
