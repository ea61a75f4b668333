"""Command-line experiment runner.

Example::

    xnv --synth N=2500,D=10,sigma=0.3,noise=0.3 --methods XNV,SSSL_M \
        --m 50 --n-grid 100,200 --seeds 10 --out results/
"""

import argparse
import logging
import os
import sys

from .experiments import (
    DEFAULT_GAMMA_GRID,
    DEFAULT_N_GRID,
    DEFAULT_S_GRID,
    DEFAULT_SIGMA_GRID,
    METHODS,
    ExperimentConfig,
    benchmark_runtime,
    load_dataset,
    loglog_slope,
    run_experiment,
    save_standardization,
    write_outputs,
)


def _floats(s):
    return tuple(float(v) for v in s.split(",") if v.strip())


def _ints(s):
    return tuple(int(v) for v in s.split(",") if v.strip())


def _synth(s):
    out = {}
    for item in s.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected key=value in synthetic spec, got {item!r}")
        k, v = item.split("=", 1)
        k = k.strip()
        if k not in ("N", "D", "k", "noise", "sigma", "seed"):
            raise argparse.ArgumentTypeError(f"unknown synthetic key {k!r}")
        out[k] = float(v)
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="xnv", description=__doc__.splitlines()[0])
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", metavar="PATH", help="numeric CSV file; label in the last column")
    src.add_argument("--synth", metavar="SPEC", type=_synth,
                     help="synthetic RKHS data, e.g. N=2500,D=10,k=20,noise=0.1,sigma=0.3,seed=0")
    p.add_argument("--task", choices=("r", "c"), default="r", help="regression or classification")
    p.add_argument("--label-column", type=int, default=-1)
    p.add_argument("--methods", default="XNV,SSSL_M,SSSL_2M",
                   help=f"comma-separated subset of {','.join(METHODS)}")
    p.add_argument("--m", type=int, default=200, help="random features per view")
    p.add_argument("--n-grid", type=_ints, default=DEFAULT_N_GRID)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--sigma-grid", type=_floats, default=DEFAULT_SIGMA_GRID)
    p.add_argument("--gamma-grid", type=_floats, default=DEFAULT_GAMMA_GRID)
    p.add_argument("--s-grid", type=_ints, default=DEFAULT_S_GRID,
                   help="eigenbasis sizes tried for SSSL_EXACT")
    p.add_argument("--cv-folds", type=int, default=5)
    p.add_argument("--cv-labeled", type=int, default=1000)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--transductive", action="store_true",
                   help="include test inputs in standardization statistics")
    p.add_argument("--out", metavar="DIR", required=True)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--bench", action="store_true", help="also time fits at growing N")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    config = ExperimentConfig(
        methods=tuple(m.strip().upper() for m in args.methods.split(",") if m.strip()),
        data_path=args.data, synth=args.synth,
        task="classification" if args.task == "c" else "regression",
        label_column=args.label_column, M=args.m, n_grid=args.n_grid, seeds=args.seeds,
        sigma_grid=args.sigma_grid, gamma_grid=args.gamma_grid, s_grid=args.s_grid,
        cv_folds=args.cv_folds, cv_labeled=args.cv_labeled, test_fraction=args.test_fraction,
        standardize=not args.no_standardize, transductive=args.transductive,
        master_seed=args.master_seed, out=args.out, bench=args.bench,
    )
    try:
        config.validate()
        dataset = load_dataset(config)
        too_big = [n for n in config.n_grid
                   if n + round(config.test_fraction * dataset.n_samples) > dataset.n_samples]
        if too_big:
            raise ValueError(f"n_grid values {too_big} exceed the training pool")
    except (ValueError, OSError) as exc:
        print(f"xnv: error: {exc}", file=sys.stderr)
        return 2

    def progress(row):
        logging.info("%s n=%d seed=%d metric=%.4f %s", row["method"], row["n"], row["seed"],
                     row["metric"], row["status"])

    table = run_experiment(config, dataset, progress)
    bench = None
    if config.bench:
        bench = benchmark_runtime(config.methods, config.bench_sizes, M=config.M,
                                  repeats=config.bench_repeats)
    write_outputs(config, table, bench)
    if config.standardize:
        save_standardization(dataset, config, os.path.join(config.out, "standardization.txt"))

    for a in table.aggregates():
        print(f"{a['method']:>10} n={a['n']:<5d} mean={a['mean']:.4f} std={a['std']:.4f} "
              f"({a['count']} ok, {a['failures']} failed)")
    if bench:
        for m in dict.fromkeys(r["method"] for r in bench):
            rs = [r for r in bench if r["method"] == m]
            slope = loglog_slope([r["N"] for r in rs], [r["seconds"] for r in rs])
            print(f"bench {m:>10} " + " ".join(f"N={r['N']}:{r['seconds']:.3f}s" for r in rs)
                  + f" slope={slope:.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
