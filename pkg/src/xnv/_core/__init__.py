"""Backend selection for the numerical hot loops.

The compiled Cython module is used when it was built; otherwise the numpy
fallback is loaded. Set ``XNV_BACKEND=python`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("XNV_BACKEND", "").lower() not in ("python", "numpy", "fallback"):
    try:
        from . import _kernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback

gaussian_gram = _impl.gaussian_gram
gaussian_gram_sym = _impl.gaussian_gram_sym
cosine_features = _impl.cosine_features

__all__ = ["BACKEND", "gaussian_gram", "gaussian_gram_sym", "cosine_features"]
