"""Autocorrelation matrix of a sensed multichannel signal and its
Hermitian eigendecomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import MultivariateSignal


@dataclass
class EigenSystem:
    """Eigenvalues sorted descending; eigenvectors as orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def autocorrelation(signal: MultivariateSignal) -> np.ndarray:
    """N x N autocorrelation matrix R(n1, n2) = sum_i x_i(n1) conj(x_i(n2)).

    Equivalently R = sum over channels of the outer product of each channel
    with itself, so R is the Gram matrix of the sensed values over time.
    Exact conjugate symmetry is enforced by averaging R with its Hermitian
    transpose; trace(R) equals the total signal energy.
    """
    x = signal.data
    r = x.T @ np.conj(x)
    return 0.5 * (r + r.conj().T)


def hermitian_eig(matrix: np.ndarray, asym_tol: float = 1e-8) -> EigenSystem:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Each eigenvector is phase-normalized so its largest-magnitude entry is
    real and positive, which makes the output deterministic up to degenerate
    eigenvalue subspaces.
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("expected a square matrix")
    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    asym = float(np.max(np.abs(matrix - matrix.conj().T)))
    if asym > asym_tol * max(scale, 1e-300):
        raise ValueError("matrix is not Hermitian")
    values, vectors = np.linalg.eigh(matrix)
    values = values[::-1].copy()
    vectors = vectors[:, ::-1].copy()
    pivots = np.argmax(np.abs(vectors), axis=0)
    cols = np.arange(vectors.shape[1])
    lead = vectors[pivots, cols]
    mags = np.abs(lead)
    safe = np.where(mags > 0.0, mags, 1.0)
    vectors = vectors * np.conj(lead / safe)[None, :]
    return EigenSystem(values, vectors)


def significant_rank(es: EigenSystem, rel_threshold: float) -> int:
    """Number of eigenvalues >= rel_threshold times the largest one."""
    if not 0.0 < rel_threshold < 1.0:
        raise ValueError("rel_threshold must lie in (0, 1)")
    lam1 = es.eigenvalues[0]
    if lam1 <= 0.0:
        return 0
    return int(np.sum(es.eigenvalues >= rel_threshold * lam1))
