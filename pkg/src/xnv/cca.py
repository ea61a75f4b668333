"""Regularized canonical correlation analysis between two views."""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

DEFAULT_RELATIVE_REG = 1e-6


@dataclass(frozen=True)
class CcaModel:
    """Paired canonical bases and correlations.

    Attributes
    ----------
    mean1, mean2 : ndarray
        Column means of the training views, removed before projection.
    B1, B2 : ndarray of shape (r1, p), (r2, p)
        Canonical directions, one per column.
    correlations : ndarray of shape (p,)
        Canonical correlations in ``[0, 1]``, descending.
    reg : tuple of float
        Ridge added to each view's covariance.
    """

    mean1: np.ndarray
    mean2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    correlations: np.ndarray
    reg: tuple

    @property
    def n_components(self):
        return self.correlations.shape[0]

    def project(self, view, Z):
        return project(self, view, Z)


def _inv_sqrt(C, eps):
    w, V = linalg.eigh(C)
    w = np.maximum(w + eps, eps)
    return (V / np.sqrt(w)) @ V.T


def fit_cca(Z1, Z2, reg=None):
    """Fit CCA by whitening each view and taking the SVD of the whitened
    cross-covariance.

    Parameters
    ----------
    Z1 : array of shape (N, r1)
    Z2 : array of shape (N, r2)
    reg : float or pair of floats, optional
        Absolute ridge added to each covariance. By default each view gets
        ``1e-6`` times the mean diagonal of its own covariance.

    Returns
    -------
    CcaModel
    """
    Z1 = np.asarray(Z1, dtype=np.float64)
    Z2 = np.asarray(Z2, dtype=np.float64)
    if Z1.ndim != 2 or Z2.ndim != 2 or Z1.shape[0] != Z2.shape[0]:
        raise ValueError(f"views must be 2-D with equal row counts, got {Z1.shape} and {Z2.shape}")
    N, r1 = Z1.shape
    r2 = Z2.shape[1]
    if N <= max(r1, r2):
        raise ValueError(f"need more rows than features: N={N}, r1={r1}, r2={r2}")
    if not (np.isfinite(Z1).all() and np.isfinite(Z2).all()):
        raise ValueError("views contain non-finite values")

    m1, m2 = Z1.mean(0), Z2.mean(0)
    A1, A2 = Z1 - m1, Z2 - m2
    C11 = A1.T @ A1 / N
    C22 = A2.T @ A2 / N
    C12 = A1.T @ A2 / N

    if reg is None:
        # an all-zero view has zero trace; keep the ridge strictly positive
        e1 = DEFAULT_RELATIVE_REG * np.trace(C11) / r1 or DEFAULT_RELATIVE_REG
        e2 = DEFAULT_RELATIVE_REG * np.trace(C22) / r2 or DEFAULT_RELATIVE_REG
    elif np.ndim(reg) == 0:
        e1 = e2 = float(reg)
    else:
        e1, e2 = map(float, reg)
    if e1 <= 0 or e2 <= 0:
        raise ValueError("regularization must be positive")

    W1 = _inv_sqrt(C11, e1)
    W2 = _inv_sqrt(C22, e2)
    U, s, Vt = linalg.svd(W1 @ C12 @ W2, full_matrices=False)
    p = min(r1, r2)
    B1 = W1 @ U[:, :p]
    B2 = W2 @ Vt[:p].T
    lam = np.clip(s[:p], 0.0, 1.0)
    return CcaModel(m1, m2, B1, B2, lam, (e1, e2))


def project(model, view, Z):
    """Map raw view features into the canonical basis: ``(Z - mean) @ B``."""
    if view == 1:
        mean, B = model.mean1, model.B1
    elif view == 2:
        mean, B = model.mean2, model.B2
    else:
        raise ValueError(f"view must be 1 or 2, got {view!r}")
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim == 1:
        Z = Z[None, :]
    if Z.shape[1] != B.shape[0]:
        raise ValueError(f"dimension mismatch: view {view} expects {B.shape[0]} columns, got {Z.shape[1]}")
    return (Z - mean) @ B
