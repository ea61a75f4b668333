"""Random feature views: Nystrom maps and random Fourier features."""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from . import _core
from .kernels import KernelSpec, _as_matrix, kernel_matrix

DEFAULT_RANK_TOL = 1e-10


def sample_landmark_pair(X, M, rng):
    """Draw ``2M`` distinct row indices and split them into two views.

    Sampling is uniform without replacement. ``X`` is the data matrix or
    its row count. Returns ``(idx1, idx2)``, each of length ``M``.
    """
    N = int(X) if np.ndim(X) == 0 else len(X)
    if M < 1:
        raise ValueError("M must be at least 1")
    if 2 * M > N:
        raise ValueError(f"need 2M <= N, got M={M}, N={N}")
    idx = rng.choice(N, size=2 * M, replace=False)
    return idx[:M], idx[M:]


@dataclass(frozen=True)
class NystromMap:
    """Fitted Nystrom feature map ``z(x) = D^{-1/2} V^T k(x, landmarks)``."""

    kernel: KernelSpec
    landmarks: np.ndarray
    eigvecs: np.ndarray
    eigvals: np.ndarray
    rank_tol: float = DEFAULT_RANK_TOL

    @property
    def n_features(self):
        return self.eigvals.shape[0]

    @property
    def input_dim(self):
        return self.landmarks.shape[1]

    def transform(self, X):
        return apply_nystrom(self, X)


def fit_nystrom(spec, landmarks, rank_tol=DEFAULT_RANK_TOL):
    """Eigendecompose the landmark Gram matrix and keep the numerically
    nonzero part of its spectrum.

    Eigenpairs with eigenvalue ``<= rank_tol * max eigenvalue`` are
    discarded; the rest are stored in descending order.
    """
    if not 0 < rank_tol < 1:
        raise ValueError("rank_tol must lie in (0, 1)")
    L = _as_matrix(landmarks, "landmarks")
    K_hat = kernel_matrix(spec, L)
    w, V = linalg.eigh(K_hat)
    w = np.maximum(w, 0.0)[::-1]
    V = V[:, ::-1]
    keep = w > rank_tol * w[0]
    if not keep.any():
        raise ValueError("landmark Gram matrix is numerically zero")
    # fix eigenvector signs so that the map is a deterministic function of L
    V = V[:, keep]
    flip = np.sign(V[np.abs(V).argmax(axis=0), np.arange(V.shape[1])])
    V = V * flip
    return NystromMap(spec, L.copy(), np.ascontiguousarray(V), w[keep].copy(), rank_tol)


def apply_nystrom(nmap, X):
    X = _as_matrix(X, "X")
    if X.shape[1] != nmap.input_dim:
        raise ValueError(f"dimension mismatch: expected {nmap.input_dim} columns, got {X.shape[1]}")
    C = kernel_matrix(nmap.kernel, X, nmap.landmarks)
    return (C @ nmap.eigvecs) / np.sqrt(nmap.eigvals)


@dataclass(frozen=True)
class FourierMap:
    """Random Fourier feature map ``sqrt(2/M) cos(W x + b)``."""

    frequencies: np.ndarray
    phases: np.ndarray

    @property
    def n_features(self):
        return self.frequencies.shape[0]

    @property
    def input_dim(self):
        return self.frequencies.shape[1]

    @property
    def scale(self):
        return np.sqrt(2.0 / self.n_features)

    def transform(self, X):
        return apply_fourier(self, X)


def fit_fourier(spec, M, D, rng):
    """Sample frequencies from the Gaussian kernel's spectral measure
    ``N(0, 2 sigma I)`` and phases from ``U[-pi, pi]``."""
    if M < 1 or D < 1:
        raise ValueError(f"M and D must be positive, got M={M}, D={D}")
    W = rng.normal(0.0, np.sqrt(2.0 * spec.sigma), size=(M, D))
    b = rng.uniform(-np.pi, np.pi, size=M)
    return FourierMap(W, b)


def apply_fourier(fmap, X):
    X = _as_matrix(X, "X")
    if X.shape[1] != fmap.input_dim:
        raise ValueError(f"dimension mismatch: expected {fmap.input_dim} columns, got {X.shape[1]}")
    W = np.ascontiguousarray(fmap.frequencies, dtype=np.float64)
    b = np.ascontiguousarray(fmap.phases, dtype=np.float64)
    return _core.cosine_features(X, W, b, float(fmap.scale))
