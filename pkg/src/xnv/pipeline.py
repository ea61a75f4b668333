"""End-to-end correlated random-view pipelines.

``fit_xnv`` builds two Nystrom views from a single draw of ``2M`` landmarks,
``fit_xks`` two random Fourier views from ``2M`` frequencies. Both then fit
CCA on every available input and a canonical ridge model on the labeled
rows of the first view's canonical coordinates.
"""

import io
import json
from dataclasses import dataclass

import numpy as np

from .cca import CcaModel, fit_cca, project
from .estimators import REGRESSION, CanonicalRidgeModel, fit_canonical_ridge, to_labels
from .features import (
    DEFAULT_RANK_TOL,
    FourierMap,
    NystromMap,
    fit_fourier,
    fit_nystrom,
    sample_landmark_pair,
)
from .kernels import KernelSpec, _as_matrix

FORMAT_VERSION = 1


@dataclass(frozen=True)
class XnvPipeline:
    map1: object
    map2: object
    cca: CcaModel
    model: CanonicalRidgeModel
    kernel: KernelSpec

    @property
    def kind(self):
        return "nystrom" if isinstance(self.map1, NystromMap) else "fourier"

    @property
    def task(self):
        return self.model.task

    def transform(self, X):
        """Canonical coordinates of ``X`` in view 1."""
        return project(self.cca, 1, self.map1.transform(X))

    def predict(self, X):
        return self.model.predict(self.transform(X))

    def predict_labels(self, X):
        return to_labels(self.predict(X))


def _fit_views(map1, map2, X_all, labeled, y, gamma, reg, task, fit_intercept, kernel):
    Z1 = map1.transform(X_all)
    Z2 = map2.transform(X_all)
    cca = fit_cca(Z1, Z2, reg)
    Zbar = project(cca, 1, Z1[labeled])
    model = fit_canonical_ridge(Zbar, y, cca.correlations, gamma, task=task,
                                fit_intercept=fit_intercept)
    return XnvPipeline(map1, map2, cca, model, kernel)


def _check_inputs(X_all, labeled, y):
    X_all = _as_matrix(X_all, "X_all")
    labeled = np.asarray(labeled, dtype=np.intp).ravel()
    if labeled.size < 1:
        raise ValueError("need at least one labeled point")
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.shape[0] != labeled.shape[0]:
        raise ValueError(f"{labeled.shape[0]} labeled indices but {y.shape[0]} labels")
    return X_all, labeled, y


def fit_xnv(spec, X_all, labeled, y, M, gamma, rng, reg=None, task=REGRESSION,
            fit_intercept=True, rank_tol=DEFAULT_RANK_TOL):
    """Correlated Nystrom views.

    Parameters
    ----------
    spec : KernelSpec
    X_all : array of shape (N, D)
        Labeled and unlabeled inputs.
    labeled : int array of shape (n,)
        Rows of ``X_all`` that carry labels.
    y : array of shape (n,)
    M : int
        Landmarks per view; ``2M <= N``.
    gamma : float
        Extra ridge penalty in the canonical basis.
    rng : numpy.random.Generator
    reg : float, optional
        CCA covariance ridge (see :func:`xnv.cca.fit_cca`).
    """
    X_all, labeled, y = _check_inputs(X_all, labeled, y)
    i1, i2 = sample_landmark_pair(X_all, M, rng)
    map1 = fit_nystrom(spec, X_all[i1], rank_tol)
    map2 = fit_nystrom(spec, X_all[i2], rank_tol)
    return _fit_views(map1, map2, X_all, labeled, y, gamma, reg, task, fit_intercept, spec)


def fit_xks(spec, X_all, labeled, y, M, gamma, rng, reg=None, task=REGRESSION,
            fit_intercept=True):
    """Correlated kitchen sinks: as :func:`fit_xnv` with random Fourier views."""
    X_all, labeled, y = _check_inputs(X_all, labeled, y)
    D = X_all.shape[1]
    both = fit_fourier(spec, 2 * M, D, rng)
    map1 = FourierMap(both.frequencies[:M].copy(), both.phases[:M].copy())
    map2 = FourierMap(both.frequencies[M:].copy(), both.phases[M:].copy())
    return _fit_views(map1, map2, X_all, labeled, y, gamma, reg, task, fit_intercept, spec)


def pipeline_predict(p, X):
    return p.predict(X)


# -- serialization -----------------------------------------------------------

def _map_arrays(prefix, m):
    if isinstance(m, NystromMap):
        return {f"{prefix}.landmarks": m.landmarks, f"{prefix}.eigvecs": m.eigvecs,
                f"{prefix}.eigvals": m.eigvals}
    return {f"{prefix}.frequencies": m.frequencies, f"{prefix}.phases": m.phases}


def save_pipeline(p, path):
    """Write a pipeline to a self-describing ``.npz`` archive.

    Arrays are stored verbatim, so a reloaded pipeline predicts bit-for-bit
    identically on the same backend.
    """
    meta = {
        "format": "xnv-pipeline",
        "version": FORMAT_VERSION,
        "kind": p.kind,
        "sigma": p.kernel.sigma,
        "rank_tol": getattr(p.map1, "rank_tol", None),
        "cca_reg": list(p.cca.reg),
        "gamma": p.model.gamma,
        "intercept": p.model.intercept,
        "task": p.model.task,
    }
    arrays = {
        **_map_arrays("map1", p.map1),
        **_map_arrays("map2", p.map2),
        "cca.mean1": p.cca.mean1, "cca.mean2": p.cca.mean2,
        "cca.B1": p.cca.B1, "cca.B2": p.cca.B2,
        "cca.correlations": p.cca.correlations,
        "model.weights": p.model.weights,
        "model.dropped": p.model.dropped,
    }
    buf = io.BytesIO()
    np.savez(buf, __meta__=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8), **arrays)
    with open(path, "wb") as fh:
        fh.write(buf.getvalue())


def load_pipeline(path):
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(z["__meta__"].tobytes().decode())
        a = {k: z[k] for k in z.files if k != "__meta__"}
    if meta.get("format") != "xnv-pipeline":
        raise ValueError(f"{path} is not a saved pipeline")
    if meta["version"] > FORMAT_VERSION:
        raise ValueError(f"unsupported pipeline format version {meta['version']}")
    spec = KernelSpec(meta["sigma"])

    def load_map(prefix):
        if meta["kind"] == "nystrom":
            return NystromMap(spec, a[f"{prefix}.landmarks"], a[f"{prefix}.eigvecs"],
                              a[f"{prefix}.eigvals"], meta["rank_tol"])
        return FourierMap(a[f"{prefix}.frequencies"], a[f"{prefix}.phases"])

    cca = CcaModel(a["cca.mean1"], a["cca.mean2"], a["cca.B1"], a["cca.B2"],
                   a["cca.correlations"], tuple(meta["cca_reg"]))
    model = CanonicalRidgeModel(a["model.weights"], meta["gamma"], a["cca.correlations"],
                                a["model.dropped"], meta["task"], meta["intercept"])
    return XnvPipeline(load_map("map1"), load_map("map2"), cca, model, spec)
