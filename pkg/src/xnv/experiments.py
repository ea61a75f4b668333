"""Experiment harness: cross-validation, repeated labeled-set sweeps,
metrics, result tables and runtime benchmarks.

Randomness is derived from a master seed through ``numpy`` seed sequences
keyed by the cell identity (method, n, seed), so results do not depend on
execution order and every method sees the same split for a given (n, seed).
"""

import csv
import json
import logging
import time
import zlib
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, _core
from .data import format_params, make_split, standardize, synth_rkhs
from .estimators import (
    CLASSIFICATION,
    REGRESSION,
    fit_krr,
    fit_ridge,
    fit_sssl_exact,
    fit_sssl_m,
    to_labels,
)
from .features import apply_fourier, apply_nystrom, fit_fourier, fit_nystrom
from .kernels import KernelSpec
from .pipeline import fit_xks, fit_xnv

log = logging.getLogger(__name__)

METHODS = ("XNV", "XKS", "SSSL_M", "SSSL_2M", "SSSL_EXACT", "KRR", "RFF_M", "RFF_2M", "NY_RIDGE_M")

DEFAULT_SIGMA_GRID = tuple(2.0 ** e for e in (-6, -4, -2, 0, 2, 4))
DEFAULT_GAMMA_GRID = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1)
DEFAULT_S_GRID = (5, 10, 20, 50, 100)
DEFAULT_N_GRID = tuple(range(100, 1001, 50))

# stream tags, so that split / CV / method draws never share a stream
_SPLIT, _CV_SPLIT, _CV_FIT, _FIT = 1, 2, 3, 4


def _tag(name):
    return zlib.crc32(name.encode())


def _rng(*key):
    return np.random.default_rng([int(k) for k in key])


class _Feature:
    """Ridge on a single random feature view."""

    def __init__(self, fmap, ridge):
        self.fmap, self.ridge = fmap, ridge

    def predict(self, X):
        return self.ridge.predict(self.fmap.transform(X))


def fit_method(method, X_pool, labeled, y, sigma, param, M, rng, task=REGRESSION):
    """Fit one named method.

    ``X_pool`` holds every training input (labeled and unlabeled) and
    ``labeled`` indexes its labeled rows. ``param`` is the ridge penalty,
    or the eigenbasis size ``s`` for ``SSSL_EXACT``.
    """
    spec = KernelSpec(sigma)
    labeled = np.asarray(labeled, dtype=np.intp)
    if method == "XNV":
        return fit_xnv(spec, X_pool, labeled, y, M, param, rng, task=task)
    if method == "XKS":
        return fit_xks(spec, X_pool, labeled, y, M, param, rng, task=task)
    if method == "SSSL_M":
        return fit_sssl_m(spec, X_pool, labeled, y, M, param, rng, task=task)
    if method == "SSSL_2M":
        return fit_sssl_m(spec, X_pool, labeled, y, 2 * M, param, rng, task=task)
    if method == "SSSL_EXACT":
        return fit_sssl_exact(spec, X_pool, labeled, y, int(param), task=task)
    if method == "KRR":
        return fit_krr(spec, X_pool[labeled], y, param, task=task)
    if method in ("RFF_M", "RFF_2M"):
        m = M if method == "RFF_M" else 2 * M
        fmap = fit_fourier(spec, m, X_pool.shape[1], rng)
        return _Feature(fmap, fit_ridge(apply_fourier(fmap, X_pool[labeled]), y, param, task))
    if method == "NY_RIDGE_M":
        # supervised Nystrom: landmarks from the labeled rows only
        m = min(M, labeled.shape[0])
        idx = rng.choice(labeled, size=m, replace=False)
        nmap = fit_nystrom(spec, X_pool[idx])
        return _Feature(nmap, fit_ridge(apply_nystrom(nmap, X_pool[labeled]), y, param, task))
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def evaluate(predictions, truth, task=REGRESSION):
    """Normalized MSE (regression) or misclassification rate (classification).

    The regression normalizer is the population variance of ``truth``, so
    predicting the test mean scores exactly 1.
    """
    p = np.asarray(predictions, dtype=np.float64).ravel()
    t = np.asarray(truth, dtype=np.float64).ravel()
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.shape[0]} predictions, {t.shape[0]} targets")
    if task == CLASSIFICATION:
        return float(np.mean(to_labels(p) != t))
    var = np.mean((t - t.mean()) ** 2)
    if var <= 0:
        raise ValueError("test targets have zero variance")
    return float(np.mean((p - t) ** 2) / var)


@dataclass
class ExperimentConfig:
    methods: tuple = ("XNV", "SSSL_M", "SSSL_2M")
    data_path: str = None
    synth: dict = None
    task: str = REGRESSION
    label_column: int = -1
    M: int = 200
    n_grid: tuple = DEFAULT_N_GRID
    seeds: int = 100
    sigma_grid: tuple = DEFAULT_SIGMA_GRID
    gamma_grid: tuple = DEFAULT_GAMMA_GRID
    s_grid: tuple = DEFAULT_S_GRID
    cv_folds: int = 5
    cv_labeled: int = 1000
    test_fraction: float = 0.2
    standardize: bool = True
    transductive: bool = False
    master_seed: int = 0
    out: str = None
    bench: bool = False
    bench_sizes: tuple = (1000, 2000, 4000)
    bench_repeats: int = 3

    def validate(self):
        if not self.methods:
            raise ValueError("no methods given")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {', '.join(METHODS)}")
        if (self.data_path is None) == (self.synth is None):
            raise ValueError("give exactly one of a data path or a synthetic spec")
        for name in ("n_grid", "sigma_grid", "gamma_grid"):
            if not getattr(self, name):
                raise ValueError(f"{name} is empty")
        if "SSSL_EXACT" in self.methods and not self.s_grid:
            raise ValueError("s_grid is empty")
        if self.seeds < 1 or self.M < 1 or self.cv_folds < 2:
            raise ValueError("seeds and M must be >= 1 and cv_folds >= 2")
        if self.task not in (REGRESSION, CLASSIFICATION):
            raise ValueError(f"unknown task {self.task!r}")

    def param_grid(self, method):
        return self.s_grid if method == "SSSL_EXACT" else self.gamma_grid


def load_dataset(config):
    if config.synth is not None:
        s = dict(config.synth)
        return synth_rkhs(KernelSpec(float(s.pop("sigma", 0.3))), int(s.pop("N", 2500)),
                          int(s.pop("D", 10)), int(s.pop("k", 20)), float(s.pop("noise", 0.1)),
                          int(s.pop("seed", 0)))
    from .data import load_csv
    return load_csv(config.data_path, label_column=config.label_column, task=config.task)


def _prepare(dataset, split, config_standardize=True, transductive=False):
    """Training-pool inputs, labeled positions within the pool, labels, and
    test inputs and targets for one split."""
    pool = split.pool
    params = None
    X = dataset.X
    if config_standardize:
        rows = np.concatenate([pool, split.test]) if transductive else pool
        ds, params = standardize(dataset, rows)
        X = ds.X
    n = split.labeled.shape[0]
    return X[pool], np.arange(n), dataset.y[split.labeled], X[split.test], dataset.y[split.test], params


def cross_validate(method, dataset, sigma_grid, param_grid, folds=5, cv_labeled=1000, seed=0,
                   M=200, test_fraction=0.2, standardize_inputs=True, transductive=False):
    """Pick ``(sigma, param)`` by K-fold CV on a labeled subset.

    A split with ``cv_labeled`` labeled rows (or the whole pool if smaller)
    is drawn; for each fold, the method is fit with the remaining labeled
    rows and every pool input available as unlabeled data, then scored on
    the held-out fold. Ties prefer the larger penalty, then the larger
    ``sigma``. The test rows of the split are never used.

    Returns ``(sigma, param, scores)`` where ``scores`` maps each grid pair to
    its mean validation metric.
    """
    N = dataset.n_samples
    n_test = int(round(test_fraction * N))
    n_lab = min(cv_labeled, N - n_test)
    if n_lab < folds:
        raise ValueError(f"cannot make {folds} folds from {n_lab} labeled rows")
    split = make_split(N, n_lab, test_fraction, [seed, _CV_SPLIT])
    Xp, lab, y, _, _, _ = _prepare(dataset, split, standardize_inputs, transductive)
    order = _rng(seed, _CV_SPLIT, 1).permutation(n_lab)
    parts = np.array_split(order, folds)

    scores = {}
    for sigma in sigma_grid:
        for param in param_grid:
            errs = []
            for f in range(folds):
                tr = np.sort(np.concatenate([parts[j] for j in range(folds) if j != f]))
                va = parts[f]
                try:
                    model = fit_method(method, Xp, lab[tr], y[tr], sigma, param, M,
                                       _rng(seed, _CV_FIT, _tag(method), f), dataset.task)
                    errs.append(evaluate(model.predict(Xp[lab[va]]), y[va], dataset.task))
                except (ValueError, np.linalg.LinAlgError) as exc:
                    log.debug("cv %s sigma=%g param=%g failed: %s", method, sigma, param, exc)
                    errs.append(np.inf)
            scores[(sigma, param)] = float(np.mean(errs))
    # minimize error; ties go to larger penalty (smaller s), then larger sigma
    smooth = (lambda p: -p) if method == "SSSL_EXACT" else (lambda p: p)
    best = min(scores, key=lambda k: (scores[k], -smooth(k[1]), -k[0]))
    if not np.isfinite(scores[best]):
        raise ValueError(f"every grid point failed during CV for {method}")
    return best[0], best[1], scores


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)
    selected: dict = field(default_factory=dict)

    def add(self, **row):
        self.rows.append(row)

    def aggregates(self):
        """Mean, std (ddof=1) and standard error per (method, n) over
        successful rows."""
        out = []
        keys = sorted({(r["method"], r["n"]) for r in self.rows},
                      key=lambda k: (METHODS.index(k[0]) if k[0] in METHODS else 99, k[1]))
        for method, n in keys:
            cell = [r for r in self.rows if r["method"] == method and r["n"] == n]
            vals = np.array([r["metric"] for r in cell if r["status"] == "ok"])
            k = vals.size
            std = float(vals.std(ddof=1)) if k > 1 else float("nan")
            out.append({
                "method": method, "n": n, "count": k, "failures": len(cell) - k,
                "mean": float(vals.mean()) if k else float("nan"),
                "std": std, "stderr": std / np.sqrt(k) if k > 1 else float("nan"),
            })
        return out

    def metrics(self, method, n):
        """Per-seed metric array for one cell, ordered by seed."""
        cell = sorted((r for r in self.rows if r["method"] == method and r["n"] == n),
                      key=lambda r: r["seed"])
        return np.array([r["metric"] if r["status"] == "ok" else np.nan for r in cell])

    def write(self, outdir):
        import os
        os.makedirs(outdir, exist_ok=True)
        rows = sorted(self.rows, key=lambda r: (r["method"], r["n"], r["seed"]))
        with open(os.path.join(outdir, "rows.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["dataset", "method", "n", "seed", "metric", "status"])
            for r in rows:
                w.writerow([r["dataset"], r["method"], r["n"], r["seed"], repr(r["metric"]), r["status"]])
        # wall times vary run to run, so they live apart from the metrics
        with open(os.path.join(outdir, "timings.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["method", "n", "seed", "seconds"])
            for r in rows:
                w.writerow([r["method"], r["n"], r["seed"], f"{r['seconds']:.6f}"])
        with open(os.path.join(outdir, "aggregates.csv"), "w", newline="") as fh:
            aggs = self.aggregates()
            w = csv.DictWriter(fh, fieldnames=["method", "n", "count", "failures", "mean", "std", "stderr"])
            w.writeheader()
            for a in aggs:
                w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in a.items()})


def run_cell(method, dataset, split, sigma, param, M, rng, config_standardize=True, transductive=False):
    """Fit and score one (method, split). Returns ``(metric, seconds)``."""
    Xp, lab, y, Xt, yt, _ = _prepare(dataset, split, config_standardize, transductive)
    t0 = time.perf_counter()
    model = fit_method(method, Xp, lab, y, sigma, param, M, rng, dataset.task)
    seconds = time.perf_counter() - t0
    return evaluate(model.predict(Xt), yt, dataset.task), seconds


def run_experiment(config, dataset=None, progress=None):
    """Run the full protocol described by ``config``.

    For each method, (sigma, param) is chosen once by cross-validation and
    reused for every n. Then for each n and seed a split is drawn (shared
    across methods), the method is fit and scored. Failures are recorded
    with a status message and the run continues.
    """
    config.validate()
    if dataset is None:
        dataset = load_dataset(config)
    master = config.master_seed
    N = dataset.n_samples
    table = ResultTable()

    for method in config.methods:
        try:
            sigma, param, _ = cross_validate(
                method, dataset, config.sigma_grid, config.param_grid(method), config.cv_folds,
                config.cv_labeled, master, config.M, config.test_fraction, config.standardize,
                config.transductive)
            table.selected[method] = {"sigma": sigma, "param": param}
        except ValueError as exc:
            table.selected[method] = {"error": str(exc)}
            sigma = param = None
        for n in config.n_grid:
            for s in range(config.seeds):
                row = dict(dataset=dataset.name, method=method, n=int(n), seed=s,
                           metric=float("nan"), seconds=float("nan"), status="ok")
                try:
                    if sigma is None:
                        raise ValueError("cross-validation failed: " + table.selected[method]["error"])
                    split = make_split(N, int(n), config.test_fraction, [master, _SPLIT, n, s])
                    rng = _rng(master, _FIT, _tag(method), n, s)
                    row["metric"], row["seconds"] = run_cell(
                        method, dataset, split, sigma, param, config.M, rng,
                        config.standardize, config.transductive)
                except (ValueError, np.linalg.LinAlgError) as exc:
                    row["status"] = "failed: " + str(exc).replace("\n", " ")
                table.add(**row)
                if progress:
                    progress(row)
    return table


def write_outputs(config, table, bench=None):
    import os
    outdir = config.out
    table.write(outdir)
    manifest = {
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(config).items()},
        "master_seed": config.master_seed,
        "selected_hyperparameters": table.selected,
        "hyperparameter_selection": "per method (shared selection not used)",
        "xnv_version": __version__,
        "numpy_version": np.__version__,
        "kernel_backend": _core.BACKEND,
    }
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    if bench is not None:
        with open(os.path.join(outdir, "bench.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["method", "N", "seconds"])
            for r in bench:
                w.writerow([r["method"], r["N"], f"{r['seconds']:.6f}"])


def save_standardization(dataset, config, path):
    """Write the standardization parameters of every (n, seed) split as
    ``split.<n>.<seed>.<key> = values`` lines."""
    with open(path, "w") as fh:
        for n in config.n_grid:
            for s in range(config.seeds):
                split = make_split(dataset.n_samples, int(n), config.test_fraction,
                                   [config.master_seed, _SPLIT, n, s])
                rows = np.concatenate([split.pool, split.test]) if config.transductive else split.pool
                _, params = standardize(dataset, rows)
                fh.write(format_params(params, f"split.{n}.{s}."))


def benchmark_runtime(methods=("XNV", "SSSL_2M", "SSSL_EXACT"), sizes=(1000, 2000, 4000),
                      M=200, D=10, sigma=0.3, gamma=1e-3, s=20, n_labeled=100, repeats=3, seed=0):
    """Median fit time of each method on synthetic data of growing size.

    Returns a list of ``{"method", "N", "seconds"}`` rows.
    """
    out = []
    for N in sizes:
        ds = synth_rkhs(KernelSpec(sigma), N, D, 20, 0.1, seed)
        lab = np.arange(min(n_labeled, N))
        y = ds.y[lab]
        for method in methods:
            param = s if method == "SSSL_EXACT" else gamma
            times = []
            for r in range(max(3, repeats)):
                rng = _rng(seed, _FIT, _tag(method), N, r)
                t0 = time.perf_counter()
                fit_method(method, ds.X, lab, y, sigma, param, M, rng)
                times.append(time.perf_counter() - t0)
            out.append({"method": method, "N": N, "seconds": float(np.median(times))})
    return out


def loglog_slope(sizes, seconds):
    """Least-squares slope of log(time) against log(N)."""
    return float(np.polyfit(np.log(sizes), np.log(seconds), 1)[0])
