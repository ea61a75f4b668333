import csv
import json

import numpy as np
import pytest

from xnv import experiments
from xnv.cli import main
from xnv.data import synth_rkhs
from xnv.estimators import CLASSIFICATION
from xnv.experiments import (
    METHODS,
    ExperimentConfig,
    ResultTable,
    benchmark_runtime,
    cross_validate,
    evaluate,
    fit_method,
    loglog_slope,
    run_experiment,
    write_outputs,
)
from xnv.kernels import KernelSpec


@pytest.fixture(scope="module")
def synth():
    return synth_rkhs(KernelSpec(0.5), 400, 3, noise_std=0.1, seed=0)


def _config(**kw):
    base = dict(methods=("KRR",), synth={"N": 400, "D": 3}, M=20, n_grid=(50,), seeds=2,
                sigma_grid=(0.5,), gamma_grid=(1e-3,), cv_labeled=100)
    base.update(kw)
    return ExperimentConfig(**base)


# -- evaluate ----------------------------------------------------------------

def test_evaluate_examples(rng):
    y = rng.normal(size=50)
    assert evaluate(y, y) == 0.0
    assert evaluate(np.full(50, y.mean()), y) == pytest.approx(1.0, abs=1e-14)
    labels = np.where(y > 0, 1.0, -1.0)
    assert evaluate(-labels, labels, CLASSIFICATION) == 1.0
    assert evaluate(labels, labels, CLASSIFICATION) == 0.0


def test_evaluate_errors():
    with pytest.raises(ValueError, match="variance"):
        evaluate([1.0, 2.0], [3.0, 3.0])
    with pytest.raises(ValueError, match="length"):
        evaluate([1.0], [1.0, 2.0])


# -- methods -----------------------------------------------------------------

@pytest.mark.parametrize("method", METHODS)
def test_every_method_fits(synth, method):
    X, y = synth.X[:300], synth.y
    lab = np.arange(60)
    param = 10 if method == "SSSL_EXACT" else 1e-3
    m = fit_method(method, X, lab, y[lab], 0.5, param, 20, np.random.default_rng(0))
    err = evaluate(m.predict(synth.X[300:]), y[300:])
    assert 0 <= err < 1


def test_unknown_method(synth):
    with pytest.raises(ValueError, match="unknown method"):
        fit_method("NOPE", synth.X, [0], [1.0], 1.0, 1e-3, 5, np.random.default_rng(0))


# -- cross validation --------------------------------------------------------

def test_cv_single_point_grid(synth, monkeypatch):
    calls = []
    real = experiments.fit_method

    def counting(*a, **k):
        calls.append(a[0])
        return real(*a, **k)

    monkeypatch.setattr(experiments, "fit_method", counting)
    sigma, gamma, scores = cross_validate("KRR", synth, (0.7,), (1e-2,), folds=4, cv_labeled=80)
    assert (sigma, gamma) == (0.7, 1e-2)
    assert len(calls) == 4 and list(scores) == [(0.7, 1e-2)]


def test_cv_deterministic(synth):
    a = cross_validate("XNV", synth, (0.1, 0.5), (1e-4, 1e-2), 3, 90, seed=5, M=15)
    b = cross_validate("XNV", synth, (0.1, 0.5), (1e-4, 1e-2), 3, 90, seed=5, M=15)
    assert a == b


def test_cv_tie_breaks_towards_smoothing(monkeypatch, synth):
    class Const:
        def predict(self, X):
            return np.zeros(len(X))

    monkeypatch.setattr(experiments, "fit_method", lambda *a, **k: Const())
    sigma, gamma, _ = cross_validate("KRR", synth, (0.1, 1.0), (1e-3, 1e-1), 3, 60)
    assert (sigma, gamma) == (1.0, 1e-1)
    _, s, _ = cross_validate("SSSL_EXACT", synth, (1.0,), (5, 20), 3, 60)
    assert s == 5


def test_cv_infeasible_folds(synth):
    with pytest.raises(ValueError, match="folds"):
        cross_validate("KRR", synth, (1.0,), (1e-3,), folds=5, cv_labeled=3)


@pytest.mark.slow
def test_cv_recovers_planted_bandwidth():
    s0, hits = 1.0, 0
    for s in range(20):
        ds = synth_rkhs(KernelSpec(s0), 1500, 3, noise_std=0.1, seed=s)
        sigma, _, _ = cross_validate("KRR", ds, (s0 / 4, s0, 4 * s0), experiments.DEFAULT_GAMMA_GRID,
                                     5, 1000, seed=s, standardize_inputs=False)
        hits += sigma == s0
    assert hits >= 16


# -- run_experiment ----------------------------------------------------------

def test_table_shape_and_aggregates():
    table = run_experiment(_config())
    assert len(table.rows) == 2
    aggs = table.aggregates()
    assert len(aggs) == 1
    vals = [r["metric"] for r in table.rows]
    assert aggs[0]["mean"] == pytest.approx(np.mean(vals), rel=1e-15)
    assert aggs[0]["std"] == pytest.approx(np.std(vals, ddof=1), rel=1e-12)
    assert aggs[0]["count"] == 2 and aggs[0]["failures"] == 0
    assert table.selected["KRR"] == {"sigma": 0.5, "param": 1e-3}


def test_run_is_deterministic():
    cfg = _config(methods=("XNV", "SSSL_M"), n_grid=(40, 60))
    a, b = run_experiment(cfg), run_experiment(cfg)
    strip = lambda t: [{k: v for k, v in r.items() if k != "seconds"} for r in t.rows]  # noqa: E731
    assert strip(a) == strip(b)


def test_seed_isolation():
    short = run_experiment(_config(methods=("XNV",), seeds=2))
    long = run_experiment(_config(methods=("XNV",), seeds=4))
    got = {r["seed"]: r["metric"] for r in long.rows}
    for r in short.rows:
        assert got[r["seed"]] == r["metric"]


def test_failures_are_recorded():
    # 2M = 1000 landmarks exceed the 320-row pool: every XNV row fails, the run continues
    table = run_experiment(_config(methods=("XNV", "KRR"), M=500))
    xnv = [r for r in table.rows if r["method"] == "XNV"]
    assert all(r["status"].startswith("failed") for r in xnv)
    assert all(r["status"] == "ok" for r in table.rows if r["method"] == "KRR")
    agg = {a["method"]: a for a in table.aggregates()}
    assert agg["XNV"]["count"] == 0 and agg["XNV"]["failures"] == 2


def test_metric_bounds():
    table = run_experiment(_config(methods=("XNV", "KRR"), n_grid=(30,), seeds=3))
    assert all(r["metric"] >= 0 for r in table.rows)


def test_config_validation():
    with pytest.raises(ValueError):
        _config(methods=()).validate()
    with pytest.raises(ValueError, match="unknown methods"):
        _config(methods=("FOO",)).validate()
    with pytest.raises(ValueError):
        _config(data_path="x.csv").validate()
    with pytest.raises(ValueError):
        _config(gamma_grid=()).validate()


def test_write_outputs(tmp_path):
    cfg = _config(out=str(tmp_path / "o"))
    table = run_experiment(cfg)
    write_outputs(cfg, table, bench=[{"method": "KRR", "N": 10, "seconds": 0.1}])
    with open(tmp_path / "o" / "rows.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2 and rows[0]["method"] == "KRR"
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["master_seed"] == 0 and "kernel_backend" in manifest
    for name in ("aggregates.csv", "timings.csv", "bench.csv"):
        assert (tmp_path / "o" / name).exists()


def test_result_table_metrics_order():
    t = ResultTable()
    for s in (2, 0, 1):
        t.add(dataset="d", method="KRR", n=10, seed=s, metric=float(s), seconds=0.0, status="ok")
    np.testing.assert_array_equal(t.metrics("KRR", 10), [0.0, 1.0, 2.0])


def test_csv_dataset_classification(tmp_path, rng):
    X = rng.normal(size=(200, 2))
    y = (X[:, 0] > 0).astype(int)
    p = tmp_path / "c.csv"
    np.savetxt(p, np.column_stack([X, y]), delimiter=",")
    cfg = ExperimentConfig(methods=("XNV",), data_path=str(p), task=CLASSIFICATION, M=10,
                           n_grid=(40,), seeds=2, sigma_grid=(0.5,), gamma_grid=(1e-3,), cv_labeled=80)
    table = run_experiment(cfg)
    assert all(0 <= r["metric"] <= 1 for r in table.rows)


# -- benchmark ---------------------------------------------------------------

def test_benchmark_rows():
    rows = benchmark_runtime(("XNV", "SSSL_EXACT"), sizes=(200, 400), M=10, s=5, n_labeled=20, repeats=1)
    assert [(r["method"], r["N"]) for r in rows] == [("XNV", 200), ("SSSL_EXACT", 200),
                                                    ("XNV", 400), ("SSSL_EXACT", 400)]
    assert all(r["seconds"] > 0 for r in rows)


def test_loglog_slope():
    assert loglog_slope([1, 2, 4], [3, 12, 48]) == pytest.approx(2.0)


# -- CLI ---------------------------------------------------------------------

def test_cli_success(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["--synth", "N=300,D=3,sigma=0.5", "--methods", "XNV,KRR", "--m", "10",
                 "--n-grid", "40", "--seeds", "2", "--sigma-grid", "0.5", "--gamma-grid", "1e-3",
                 "--cv-labeled", "80", "--out", str(out)])
    assert code == 0
    assert (out / "rows.csv").exists() and (out / "standardization.txt").exists()
    assert "XNV" in capsys.readouterr().out


def test_cli_config_errors(tmp_path, capsys):
    assert main(["--synth", "N=100", "--methods", "BOGUS", "--out", str(tmp_path)]) == 2
    assert "unknown methods" in capsys.readouterr().err
    assert main(["--synth", "N=100", "--n-grid", "500", "--out", str(tmp_path)]) == 2
    assert main(["--data", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["--synth", "bad", "--out", str(tmp_path)])
    assert exc.value.code != 0
    with pytest.raises(SystemExit):
        main(["--out", str(tmp_path)])


def test_cli_module_entry(tmp_path):
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "xnv", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "--synth" in r.stdout
