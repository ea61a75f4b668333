"""Gaussian kernel evaluation and Gram matrices.

The kernel is parameterized as ``k(x, x') = exp(-sigma * ||x - x'||^2)``, so
that its spectral measure is ``N(0, 2 sigma I)``.
"""

from dataclasses import dataclass

import numpy as np

from . import _core


@dataclass(frozen=True)
class KernelSpec:
    """Gaussian kernel with bandwidth ``sigma`` (inverse squared distance)."""

    sigma: float

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise ValueError(f"sigma must be positive and finite, got {self.sigma!r}")


def _as_matrix(A, name):
    A = np.ascontiguousarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[None, :]
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {A.shape}")
    return A


def eval_kernel(spec, x, x_prime):
    """Kernel value between two vectors."""
    x = np.asarray(x, dtype=np.float64).ravel()
    x_prime = np.asarray(x_prime, dtype=np.float64).ravel()
    if x.shape != x_prime.shape:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {x_prime.shape[0]}")
    d = x - x_prime
    return float(np.exp(-spec.sigma * np.dot(d, d)))


def kernel_matrix(spec, X, Y=None):
    """Cross-Gram matrix ``K[i, j] = k(X[i], Y[j])``.

    Parameters
    ----------
    spec : KernelSpec
    X : array of shape (n, d)
    Y : array of shape (m, d), optional
        Defaults to ``X``; the symmetric path is then used.

    Returns
    -------
    K : ndarray of shape (n, m)
    """
    X = _as_matrix(X, "X")
    if Y is None:
        return _core.gaussian_gram_sym(X, float(spec.sigma))
    Y = _as_matrix(Y, "Y")
    if X.shape[1] != Y.shape[1]:
        raise ValueError(f"dimension mismatch: X has {X.shape[1]} columns, Y has {Y.shape[1]}")
    return _core.gaussian_gram(X, Y, float(spec.sigma))
