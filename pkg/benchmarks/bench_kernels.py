"""Compare the compiled kernel core against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import timeit

import numpy as np

from xnv._core import _fallback

try:
    from xnv._core import _kernels as _compiled
except ImportError:
    _compiled = None


def _cases(rng):
    X = rng.uniform(-1, 1, size=(2000, 10))
    L = rng.uniform(-1, 1, size=(200, 10))
    W = rng.normal(size=(200, 10))
    b = rng.uniform(-np.pi, np.pi, size=200)
    return {
        "gaussian_gram 2000x200": lambda m: m.gaussian_gram(X, L, 0.3),
        "gaussian_gram_sym 2000": lambda m: m.gaussian_gram_sym(X, 0.3),
        "cosine_features 2000x200": lambda m: m.cosine_features(X, W, b, np.sqrt(2 / 200)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)
    backends = {"python": _fallback}
    if _compiled is not None:
        backends["cython"] = _compiled
    else:
        print("compiled core not built; timing the fallback only")
    print(f"{'kernel':<28}" + "".join(f"{b:>12}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    for name, fn in _cases(np.random.default_rng(0)).items():
        t = {b: min(timeit.repeat(lambda: fn(m), number=1, repeat=args.repeats)) for b, m in backends.items()}
        row = f"{name:<28}" + "".join(f"{t[b] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) > 1:
            row += f"   {t['python'] / t['cython']:>6.2f}x"
        print(row)


if __name__ == "__main__":
    main()
