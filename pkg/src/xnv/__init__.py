"""Correlated Nystrom Views (XNV) for semi-supervised regression and
classification, with random Fourier (XKS), SSSL and kernel ridge baselines."""

__version__ = "0.1.0"

from ._core import BACKEND  # noqa: E402
from .cca import CcaModel, fit_cca, project  # noqa: E402
from .data import Dataset, SplitPlan, load_csv, make_split, standardize, synth_rkhs  # noqa: E402
from .estimators import (  # noqa: E402
    canonical_shrinkage,
    fit_canonical_ridge,
    fit_krr,
    fit_ridge,
    fit_sssl_exact,
    fit_sssl_m,
    predict,
    predict_labels,
)
from .features import (  # noqa: E402
    apply_fourier,
    apply_nystrom,
    fit_fourier,
    fit_nystrom,
    sample_landmark_pair,
)
from .kernels import KernelSpec, eval_kernel, kernel_matrix  # noqa: E402
from .pipeline import XnvPipeline, fit_xks, fit_xnv, load_pipeline, pipeline_predict, save_pipeline  # noqa: E402

__all__ = [
    "BACKEND", "CcaModel", "Dataset", "KernelSpec", "SplitPlan", "XnvPipeline",
    "apply_fourier", "apply_nystrom", "canonical_shrinkage", "eval_kernel", "fit_canonical_ridge",
    "fit_cca", "fit_fourier", "fit_krr", "fit_nystrom", "fit_ridge", "fit_sssl_exact", "fit_sssl_m",
    "fit_xks", "fit_xnv", "kernel_matrix", "load_csv", "load_pipeline", "make_split", "pipeline_predict",
    "predict", "predict_labels", "project", "sample_landmark_pair", "save_pipeline", "standardize",
    "synth_rkhs",
]
