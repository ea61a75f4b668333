"""Supervised fitting procedures used by the pipelines and baselines.

All fitted models expose ``predict(X) -> scores``. Classification models are
trained on labels in ``{-1, +1}`` with squared loss; ``predict_labels``
thresholds scores at zero (ties go to ``+1``).
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .features import apply_nystrom, fit_nystrom
from .kernels import KernelSpec, _as_matrix, kernel_matrix

LAMBDA_FLOOR = 1e-6
SSSL_EXACT_MAX_N = 5000

REGRESSION = "regression"
CLASSIFICATION = "classification"


def _check_task(task):
    if task not in (REGRESSION, CLASSIFICATION):
        raise ValueError(f"unknown task {task!r}")
    return task


def _spd_solve(A, b, what):
    try:
        c = linalg.cho_factor(A, check_finite=True)
    except linalg.LinAlgError as exc:
        raise ValueError(f"{what}: system is singular; use a positive ridge penalty") from exc
    # cho_factor accepts near-singular matrices; reject those explicitly
    d = np.abs(np.diag(c[0]))
    if d.min() <= 1e-7 * d.max():
        raise ValueError(f"{what}: system is numerically singular")
    return linalg.cho_solve(c, b)


def _vec(y, n=None, name="y"):
    y = np.asarray(y, dtype=np.float64).ravel()
    if n is not None and y.shape[0] != n:
        raise ValueError(f"{name} has length {y.shape[0]}, expected {n}")
    if not np.isfinite(y).all():
        raise ValueError(f"{name} contains non-finite values")
    return y


@dataclass(frozen=True)
class CanonicalRidgeModel:
    """Linear model on canonical coordinates penalized by the canonical norm."""

    weights: np.ndarray
    gamma: float
    correlations: np.ndarray
    dropped: np.ndarray
    task: str = REGRESSION
    intercept: float = 0.0

    def predict(self, Zbar):
        Zbar = _as_matrix(Zbar, "Zbar")
        if Zbar.shape[1] != self.weights.shape[0]:
            raise ValueError(f"dimension mismatch: expected {self.weights.shape[0]} columns, got {Zbar.shape[1]}")
        return Zbar @ self.weights + self.intercept


def canonical_penalty(correlations, lam_floor=LAMBDA_FLOOR):
    """Per-coordinate weights ``(1 - lambda) / lambda`` of the squared
    canonical norm; ``inf`` at or below ``lam_floor``."""
    lam = np.asarray(correlations, dtype=np.float64)
    out = np.full(lam.shape, np.inf)
    ok = lam > lam_floor
    out[ok] = (1.0 - lam[ok]) / lam[ok]
    return out


def fit_canonical_ridge(Zbar, y, correlations, gamma, lam_floor=LAMBDA_FLOOR,
                        task=REGRESSION, fit_intercept=False):
    """Minimize ``mean((y - Zbar b)^2) + ||b||_CCA^2 + gamma ||b||^2``.

    Coordinates whose correlation is at most ``lam_floor`` carry an
    infinite canonical penalty and are fixed at zero. The remaining
    coordinates solve ``(Z'Z/n + diag((1-l)/l) + gamma I) b = Z'y/n``.

    With ``fit_intercept`` the labeled rows of ``Zbar`` and ``y`` are centered
    first and the intercept is restored at prediction time.
    """
    Zbar = _as_matrix(Zbar, "Zbar")
    n, p = Zbar.shape
    y = _vec(y, n)
    lam = np.asarray(correlations, dtype=np.float64).ravel()
    if lam.shape[0] != p:
        raise ValueError(f"got {lam.shape[0]} correlations for {p} features")
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    task = _check_task(task)

    if fit_intercept:
        zm, ym = Zbar.mean(0), y.mean()
        Zc, yc = Zbar - zm, y - ym
    else:
        zm, ym = np.zeros(p), 0.0
        Zc, yc = Zbar, y

    pen = canonical_penalty(lam, lam_floor)
    keep = np.isfinite(pen)
    beta = np.zeros(p)
    if keep.any():
        Zk = Zc[:, keep]
        A = Zk.T @ Zk / n
        A[np.diag_indices_from(A)] += pen[keep] + gamma
        beta[keep] = _spd_solve(A, Zk.T @ yc / n, "canonical ridge")
    intercept = float(ym - zm @ beta)
    return CanonicalRidgeModel(beta, float(gamma), lam.copy(), np.flatnonzero(~keep), task, intercept)


def canonical_shrinkage(Zbar, y, correlations):
    """Closed-form shrinkage coefficients ``lambda_j * mean_i(z_ij y_i)``."""
    Zbar = _as_matrix(Zbar, "Zbar")
    n, p = Zbar.shape
    y = _vec(y, n)
    lam = np.asarray(correlations, dtype=np.float64).ravel()
    if lam.shape[0] != p:
        raise ValueError(f"got {lam.shape[0]} correlations for {p} features")
    return lam * (Zbar.T @ y) / n


@dataclass(frozen=True)
class RidgeModel:
    weights: np.ndarray
    intercept: float
    gamma: float
    task: str = REGRESSION

    def predict(self, Z):
        Z = _as_matrix(Z, "Z")
        if Z.shape[1] != self.weights.shape[0]:
            raise ValueError(f"dimension mismatch: expected {self.weights.shape[0]} columns, got {Z.shape[1]}")
        return Z @ self.weights + self.intercept


def fit_ridge(Z, y, gamma, task=REGRESSION, fit_intercept=True):
    """Ridge regression ``w = (Z'Z/n + gamma I)^{-1} Z'y/n`` on (optionally)
    centered data."""
    Z = _as_matrix(Z, "Z")
    n, m = Z.shape
    y = _vec(y, n)
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    task = _check_task(task)
    if fit_intercept:
        zm, ym = Z.mean(0), y.mean()
        Zc, yc = Z - zm, y - ym
    else:
        zm, ym = np.zeros(m), 0.0
        Zc, yc = Z, y
    if m <= n:
        A = Zc.T @ Zc / n
        A[np.diag_indices_from(A)] += gamma
        w = _spd_solve(A, Zc.T @ yc / n, "ridge")
    else:
        # wide problem: solve in the dual, w = Z'(ZZ' + n gamma I)^{-1} y
        G = Zc @ Zc.T
        G[np.diag_indices_from(G)] += n * gamma
        w = Zc.T @ _spd_solve(G, yc, "ridge")
    return RidgeModel(w, float(ym - zm @ w), float(gamma), task)


@dataclass(frozen=True)
class KrrModel:
    dual_weights: np.ndarray
    X_train: np.ndarray
    kernel: KernelSpec
    gamma: float
    intercept: float = 0.0
    task: str = REGRESSION

    def predict(self, X):
        return kernel_matrix(self.kernel, X, self.X_train) @ self.dual_weights + self.intercept


def fit_krr(spec, X, y, gamma, task=REGRESSION, fit_intercept=True):
    """Kernel ridge regression, ``alpha = (K + n gamma I)^{-1} y``."""
    X = _as_matrix(X, "X")
    n = X.shape[0]
    y = _vec(y, n)
    if gamma <= 0:
        raise ValueError("KRR needs gamma > 0")
    task = _check_task(task)
    ym = y.mean() if fit_intercept else 0.0
    K = kernel_matrix(spec, X)
    K[np.diag_indices_from(K)] += n * gamma
    alpha = linalg.solve(K, y - ym, assume_a="pos")
    return KrrModel(alpha, X.copy(), spec, float(gamma), float(ym), task)


@dataclass(frozen=True)
class SsslModel:
    """Regression on a kernel eigenbasis.

    Features of a point ``x`` are ``k(x, basis_points) @ projection``. For the
    exact variant the basis points are all ``N`` training inputs and the
    projection is ``V D^{-1}`` (Nystrom extension of the top-``s``
    eigenvectors of the full Gram matrix). For the ``nystrom_M`` variant the
    basis points are ``M`` sampled landmarks and the projection is
    ``V D^{-1/2}``.
    """

    mode: str
    kernel: KernelSpec
    basis_points: np.ndarray
    projection: np.ndarray
    weights: np.ndarray
    intercept: float
    gamma: float = 0.0
    task: str = REGRESSION

    @property
    def n_basis(self):
        return self.weights.shape[0]

    def features(self, X):
        X = _as_matrix(X, "X")
        if X.shape[1] != self.basis_points.shape[1]:
            raise ValueError(f"dimension mismatch: expected {self.basis_points.shape[1]} columns, got {X.shape[1]}")
        return kernel_matrix(self.kernel, X, self.basis_points) @ self.projection

    def predict(self, X):
        return self.features(X) @ self.weights + self.intercept


def fit_sssl_exact(spec, X_all, labeled, y, s, task=REGRESSION, fit_intercept=True,
                   max_n=SSSL_EXACT_MAX_N, rank_tol=1e-10):
    """Least squares on the top ``s`` eigenvectors of the full Gram matrix,
    restricted to the labeled rows."""
    X_all = _as_matrix(X_all, "X_all")
    N = X_all.shape[0]
    if N > max_n:
        raise ValueError(f"exact SSSL is capped at N={max_n} (got {N}); use fit_sssl_m instead")
    labeled = np.asarray(labeled, dtype=np.intp)
    y = _vec(y, labeled.shape[0])
    if not 1 <= s <= N:
        raise ValueError(f"s must lie in [1, {N}], got {s}")
    task = _check_task(task)

    K = kernel_matrix(spec, X_all)
    w, V = linalg.eigh(K, subset_by_index=[N - s, N - 1])
    w, V = w[::-1], V[:, ::-1]
    if w[-1] <= rank_tol * w[0]:
        rank = int((w > rank_tol * w[0]).sum())
        raise ValueError(f"s={s} exceeds the numerical rank of the Gram matrix (about {rank})")

    Phi = V[labeled]
    if fit_intercept:
        pm, ym = Phi.mean(0), y.mean()
    else:
        pm, ym = np.zeros(s), 0.0
    coef, *_ = linalg.lstsq(Phi - pm, y - ym)
    return SsslModel("exact", spec, X_all.copy(), V / w, coef, float(ym - pm @ coef), 0.0, task)


def fit_sssl_m(spec, X_all, labeled, y, M, gamma, rng, task=REGRESSION, fit_intercept=True):
    """Ridge regression on ``M`` Nystrom features whose landmarks are drawn
    from all training inputs, labeled and unlabeled."""
    X_all = _as_matrix(X_all, "X_all")
    N = X_all.shape[0]
    if not 1 <= M <= N:
        raise ValueError(f"M must lie in [1, {N}], got {M}")
    labeled = np.asarray(labeled, dtype=np.intp)
    idx = rng.choice(N, size=M, replace=False)
    nmap = fit_nystrom(spec, X_all[idx])
    ridge = fit_ridge(apply_nystrom(nmap, X_all[labeled]), y, gamma, task, fit_intercept)
    projection = nmap.eigvecs / np.sqrt(nmap.eigvals)
    return SsslModel("nystrom_M", spec, nmap.landmarks, projection, ridge.weights,
                     ridge.intercept, float(gamma), task)


def predict(model, X):
    """Real-valued scores of any fitted model (or pipeline)."""
    return model.predict(X)


def to_labels(scores):
    """Sign of the scores in ``{-1, +1}``; zero maps to ``+1``."""
    return np.where(np.asarray(scores) >= 0, 1.0, -1.0)


def predict_labels(model, X):
    return to_labels(model.predict(X))
