"""Hermitian linear algebra and entropy functionals.

All entropies are in nats. Matrices are plain ``numpy`` arrays; the
validating constructor :func:`density` is the single entry point that
enforces the density-operator invariants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    NonHermitianInput,
    NotADensityOperator,
    UnsupportedTailClass,
)

HERMITIAN_TOL = 1e-12
NEGATIVITY_TOL = 1e-10
TRACE_TOL = 1e-10
# sigma eigenvalues below this are treated as kernel
KERNEL_TOL = 1e-12
# rho weight on the kernel of sigma above this makes H(rho||sigma) infinite
SUPPORT_TOL = 1e-10


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray  # nonincreasing
    eigenvectors: np.ndarray  # columns


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = _as_square(a)
    err = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if err > tol:
        raise NonHermitianInput(f"max |A - A^H| = {err:.3e} exceeds {tol:.0e}")
    return a


def density(a) -> np.ndarray:
    """Validate ``a`` as a density operator and return a read-only copy."""
    a = check_hermitian(a).copy()
    tr = np.trace(a).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotADensityOperator(f"trace {tr!r} differs from 1")
    try:
        # cheap certificate that a + tol*I is positive definite
        np.linalg.cholesky(a + NEGATIVITY_TOL * np.eye(a.shape[0]))
    except np.linalg.LinAlgError:
        lam_min = np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0]
        if lam_min < -NEGATIVITY_TOL:
            raise NotADensityOperator(f"minimum eigenvalue {lam_min:.3e} is negative") from None
    a.setflags(write=False)
    return a


def is_density(a) -> bool:
    try:
        density(a)
    except (NotADensityOperator, NonHermitianInput, DimensionMismatch):
        return False
    return True


def _eigh(a: np.ndarray, method: str = "lapack"):
    """Ascending-free eigendecomposition of a Hermitian matrix (no validation)."""
    a = 0.5 * (a + a.conj().T)
    if method == "lapack":
        w, v = np.linalg.eigh(a)
    elif method == "jacobi":
        w, v = jacobi_eigh(a)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def jacobi_eigh(a, tol: float = 1e-15, max_sweeps: int = 64):
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    Pairs are visited in row-major order (p < q) on every sweep, so the
    result is deterministic. Returns ``(eigenvalues, eigenvectors)`` in
    the order the diagonal ends up in.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                r = abs(b)
                if r <= 1e-300:
                    continue
                phase = b / r
                theta = 0.5 * math.atan2(2.0 * r, a[p, p].real - a[q, q].real)
                c, s = math.cos(theta), math.sin(theta)
                # D = diag(1, conj(phase)) makes the block real; R rotates it
                j = np.array([[c, -s], [s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = j.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ j
    else:
        raise ArithmeticError("Jacobi sweeps did not converge")
    return np.diag(a).real.copy(), v


def hermitian_eig(a, method: str = "lapack") -> Spectrum:
    """Spectrum of a density operator, eigenvalues clamped to ``[0, 1]``."""
    a = density(a)
    w, v = _eigh(a, method)
    w = np.clip(w, 0.0, 1.0)
    return Spectrum(w, v)


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p))) + 0.0  # no negative zero


def eigenvalues(rho) -> np.ndarray:
    """Clamped spectrum of a density operator, without eigenvectors."""
    rho = density(rho)
    return np.clip(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[::-1], 0.0, 1.0)


def von_neumann_entropy(rho) -> float:
    return shannon_entropy(eigenvalues(rho))


def log_on_support(sigma):
    """Eigenvectors, log-eigenvalues and kernel mask of a density operator.

    Kernel directions (eigenvalue below ``KERNEL_TOL``) carry log value 0;
    callers must check the kernel mask.
    """
    w, v = _eigh(np.asarray(sigma, dtype=complex))
    kernel = w < KERNEL_TOL
    logw = np.zeros_like(w)
    logw[~kernel] = np.log(w[~kernel])
    return v, logw, kernel


def relative_entropy(rho, sigma) -> float:
    """Umegaki relative entropy ``Tr rho (log rho - log sigma)``, possibly ``inf``."""
    rho = density(rho)
    sigma = density(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"{rho.shape} vs {sigma.shape}")
    v, logw, kernel = log_on_support(sigma)
    # diagonal of rho in sigma's eigenbasis
    proj = np.einsum("ij,jk,ki->i", v.conj().T, rho, v).real
    if np.sum(proj[kernel]) > SUPPORT_TOL:
        return math.inf
    cross = float(np.dot(proj[~kernel], logw[~kernel]))
    return max(-von_neumann_entropy(rho) - cross, 0.0)


def trace_norm(a) -> float:
    w = np.linalg.eigvalsh(check_hermitian(a, tol=1e-9))
    return float(np.sum(np.abs(w)))


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``."""
    rho = density(rho)
    sigma = density(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"{rho.shape} vs {sigma.shape}")
    return min(0.5 * trace_norm(rho - sigma), 1.0)


@dataclass(frozen=True)
class SpectralTail:
    """Eigenvalue tail of the form ``s_k ∝ exp(-beta * h_k)``.

    ``threshold`` is the convergence abscissa of ``sum_k exp(-t * h_k)``:
    the series converges for ``t > threshold`` and diverges below it.
    """

    threshold: float
    beta: float

    @classmethod
    def geometric(cls, ratio: float) -> "SpectralTail":
        # s_k ∝ ratio**k, h_k = k
        if not 0.0 < ratio < 1.0:
            raise ValueError("ratio must lie in (0, 1)")
        return cls(threshold=0.0, beta=-math.log(ratio))

    @classmethod
    def power(cls, exponent: float) -> "SpectralTail":
        # s_k ∝ k**(-exponent), h_k = log k
        return cls(threshold=1.0, beta=float(exponent))


def decrease_coefficient(tail) -> float:
    """``inf{t > 0 : sum_k s_k**t < inf}`` for an analytic eigenvalue tail."""
    if not isinstance(tail, SpectralTail):
        raise UnsupportedTailClass(f"cannot analyse {type(tail).__name__}")
    if tail.beta <= 0:
        raise UnsupportedTailClass("beta must be positive")
    if math.isinf(tail.threshold):
        raise UnsupportedTailClass("eigenvalue sum diverges for every exponent")
    dc = tail.threshold / tail.beta
    if dc > 1.0 + 1e-12:
        raise NotADensityOperator(f"eigenvalues are not summable (dc = {dc:g})")
    return min(max(dc, 0.0), 1.0)
