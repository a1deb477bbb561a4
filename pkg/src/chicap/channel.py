"""Classical-quantum channels, ensembles and the chi / H-hat functionals.

A cq channel sends letter ``k`` to a fixed output state ``sigma_k``; a
general input state acts only through its diagonal, so inputs are
probability vectors over the letters throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy import sparse

from .errors import DimensionMismatch, InvalidProjector, ValidationError
from .spectral import (
    _eigh,
    density,
    relative_entropy,
    trace_norm,
    von_neumann_entropy,
)

PROB_TOL = 1e-12


def check_distribution(p, size: int | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValidationError("probability vector must be one-dimensional")
    if size is not None and p.shape[0] != size:
        raise DimensionMismatch(f"expected {size} letters, got {p.shape[0]}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > PROB_TOL:
        raise ValidationError("not a probability vector")
    return p


@dataclass(frozen=True, eq=False)
class CqChannel:
    """Letters ``0..K-1`` mapped to output density operators of a common dimension."""

    outputs: np.ndarray = field(repr=False)

    def __post_init__(self):
        outs = [density(s) for s in self.outputs]
        if not outs:
            raise ValidationError("a channel needs at least one letter")
        if len({s.shape for s in outs}) != 1:
            raise DimensionMismatch("outputs have different dimensions")
        arr = np.stack(outs)
        arr.setflags(write=False)
        object.__setattr__(self, "outputs", arr)

    @property
    def letters(self) -> int:
        return self.outputs.shape[0]

    @property
    def dim(self) -> int:
        return self.outputs.shape[1]

    @cached_property
    def flat_outputs(self) -> np.ndarray:
        """Outputs as a ``(K, d*d)`` array, sparse when mostly zero."""
        flat = self.outputs.reshape(self.letters, -1)
        if np.count_nonzero(flat) < 0.05 * flat.size:
            return sparse.csr_array(flat)
        return flat

    def traces_with(self, a) -> np.ndarray:
        """``Tr(sigma_k a)`` for every letter."""
        return self.flat_outputs @ np.asarray(a).T.reshape(-1)

    def mix(self, p) -> np.ndarray:
        return (self.flat_outputs.T @ np.asarray(p, dtype=float)).reshape(self.dim, self.dim)

    @cached_property
    def output_entropies(self) -> np.ndarray:
        return np.array([von_neumann_entropy(s) for s in self.outputs])

    def conjugate(self, u) -> "CqChannel":
        u = np.asarray(u, dtype=complex)
        return CqChannel(np.einsum("ij,kjl,ml->kim", u, self.outputs, u.conj()))

    def permute(self, perm) -> "CqChannel":
        return CqChannel(self.outputs[np.asarray(perm)])


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Finite ensemble of input distributions with mixing weights."""

    weights: np.ndarray
    support: np.ndarray

    def __post_init__(self):
        w = check_distribution(self.weights)
        s = np.atleast_2d(np.asarray(self.support, dtype=float))
        if s.shape[0] != w.shape[0]:
            raise DimensionMismatch("weights and support differ in length")
        for row in s:
            check_distribution(row)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "support", s)

    @property
    def barycenter(self) -> np.ndarray:
        return self.weights @ self.support


class HolevoValue(NamedTuple):
    chi: float
    output_entropy: float  # H(Phi(barycenter))
    hhat: float  # sum_i pi_i H(Phi(p_i))


def apply(ch: CqChannel, p) -> np.ndarray:
    p = check_distribution(p, ch.letters)
    return ch.mix(p)


def chi_of_ensemble(ch: CqChannel, ens: Ensemble) -> HolevoValue:
    """Holevo quantity of an ensemble, cross-checked against the entropy form."""
    if ens.support.shape[1] != ch.letters:
        raise DimensionMismatch("ensemble letters do not match the channel")
    avg = apply(ch, ens.barycenter)
    terms = [
        w * relative_entropy(apply(ch, p), avg)
        for w, p in zip(ens.weights, ens.support)
        if w > 0
    ]
    chi = float(np.sum(terms)) if terms else 0.0
    h_avg = von_neumann_entropy(avg)
    hhat = float(
        sum(w * von_neumann_entropy(apply(ch, p)) for w, p in zip(ens.weights, ens.support) if w > 0)
    )
    if np.isfinite(chi) and abs(chi - (h_avg - hhat)) > 1e-8:
        raise ArithmeticError(
            f"Holevo identity violated: {chi!r} vs {h_avg - hhat!r}"
        )
    return HolevoValue(chi, h_avg, hhat)


def hhat_function(ch: CqChannel, p) -> float:
    """Convex closure of the output entropy at input ``p``.

    For a cq channel the decomposition into letters attains the infimum:
    any other decomposition of ``p`` produces outputs that are mixtures of
    the letter outputs, and entropy is concave.
    """
    p = check_distribution(p, ch.letters)
    return float(p @ ch.output_entropies)


def chi_function(ch: CqChannel, p) -> float:
    return max(von_neumann_entropy(apply(ch, p)) - hhat_function(ch, p), 0.0)


def check_projector(proj, tol: float = 1e-10) -> np.ndarray:
    proj = np.asarray(proj, dtype=complex)
    if np.max(np.abs(proj - proj.conj().T)) > tol or np.max(np.abs(proj @ proj - proj)) > tol:
        raise InvalidProjector("P must satisfy P^2 = P = P^H")
    return proj


def truncate_channel(ch: CqChannel, proj, tau=None) -> CqChannel:
    """Compress outputs onto ``proj`` and dump the lost weight into ``tau``.

    Letter ``k`` goes to ``P sigma_k P + Tr((I - P) sigma_k) tau``. ``tau``
    must live in the range of ``I - P``; it may be omitted when ``P = I``.
    """
    proj = check_projector(proj)
    if proj.shape != (ch.dim, ch.dim):
        raise DimensionMismatch("projector does not act on the output space")
    comp = np.eye(ch.dim) - proj
    lost = np.einsum("ij,kji->k", comp, ch.outputs).real
    if tau is None:
        if np.max(np.abs(comp)) > 1e-10:
            raise ValidationError("tau is required unless P is the identity")
        tau = np.zeros_like(proj)
    else:
        tau = density(tau)
        if np.max(np.abs(proj @ tau)) > 1e-10:
            raise ValidationError("tau must be supported on the complement of P")
    outs = np.einsum("ij,kjl,lm->kim", proj, ch.outputs, proj) + lost[:, None, None] * tau
    return CqChannel(outs)


def spectral_truncation(ch: CqChannel, omega, rank: int) -> CqChannel:
    """Truncate onto the top-``rank`` eigenspace of ``omega``.

    The discarded weight goes to the pure eigenvector right below the cut.
    """
    if not 1 <= rank <= ch.dim:
        raise ValidationError(f"rank must lie in [1, {ch.dim}]")
    _, v = _eigh(np.asarray(omega, dtype=complex))
    top = v[:, :rank]
    proj = top @ top.conj().T
    if rank == ch.dim:
        return truncate_channel(ch, np.eye(ch.dim))
    tau = np.outer(v[:, rank], v[:, rank].conj())
    return truncate_channel(ch, proj, tau)


def sup_trace_norm_deviation(ch: CqChannel, other: CqChannel, inputs) -> float:
    """``max_p ||other(p) - ch(p)||_1`` over the rows of ``inputs`` (raw trace norm)."""
    return max(trace_norm(apply(other, p) - apply(ch, p)) for p in inputs)
