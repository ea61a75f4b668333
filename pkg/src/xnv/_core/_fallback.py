"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def _sq_dists(X, Y):
    d2 = (X * X).sum(1)[:, None] + (Y * Y).sum(1)[None, :] - 2.0 * (X @ Y.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def gaussian_gram(X, Y, sigma):
    return np.exp(-sigma * _sq_dists(X, Y))


def gaussian_gram_sym(X, sigma):
    K = np.exp(-sigma * _sq_dists(X, X))
    # expansion loses exactness on the diagonal; restore symmetry and ones
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 1.0)
    return K


def cosine_features(X, W, b, scale):
    return scale * np.cos(X @ W.T + b)
