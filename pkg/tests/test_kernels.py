import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from xnv import _core
from xnv._core import _fallback
from xnv.kernels import KernelSpec, eval_kernel, kernel_matrix


def test_kernel_spec_rejects_nonpositive():
    for bad in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(ValueError):
            KernelSpec(bad)


def test_eval_kernel_examples():
    assert eval_kernel(KernelSpec(1.0), [0.3, -2.0], [0.3, -2.0]) == 1.0
    assert eval_kernel(KernelSpec(1.0), [0.0, 0.0], [1.0, 0.0]) == pytest.approx(math.exp(-1), abs=1e-15)
    assert eval_kernel(KernelSpec(1.0), [0.0], [1.0]) == pytest.approx(0.3678794, abs=1e-7)
    assert eval_kernel(KernelSpec(0.5), [0, 0], [1, 1]) == pytest.approx(math.exp(-1), abs=1e-15)


def test_eval_kernel_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        eval_kernel(KernelSpec(1.0), [0, 0], [0, 0, 0])
    with pytest.raises(ValueError, match="dimension"):
        kernel_matrix(KernelSpec(1.0), np.zeros((3, 2)), np.zeros((4, 3)))


def test_kernel_matrix_matches_pointwise(rng):
    spec = KernelSpec(0.7)
    X, Y = rng.normal(size=(7, 4)), rng.normal(size=(5, 4))
    K = kernel_matrix(spec, X, Y)
    brute = np.array([[eval_kernel(spec, x, y) for y in Y] for x in X])
    np.testing.assert_allclose(K, brute, rtol=1e-13, atol=0)


def test_gram_symmetric_unit_diagonal_psd(rng):
    spec = KernelSpec(1.3)
    X = rng.normal(size=(200, 5))
    K = kernel_matrix(spec, X)
    np.testing.assert_array_equal(K, K.T)
    np.testing.assert_array_equal(np.diag(K), 1.0)
    w = np.linalg.eigvalsh(K)
    assert w.min() >= -1e-8 * w.max()
    np.testing.assert_allclose(kernel_matrix(spec, X, X), K, rtol=0, atol=1e-12)


def test_three_point_gram_psd(rng):
    X = rng.normal(size=(3, 2))
    assert np.linalg.eigvalsh(kernel_matrix(KernelSpec(2.0), X)).min() >= -1e-10


def test_transpose_symmetry(rng):
    spec = KernelSpec(0.4)
    X, Y = rng.normal(size=(9, 3)), rng.normal(size=(4, 3))
    np.testing.assert_allclose(kernel_matrix(spec, X, Y), kernel_matrix(spec, Y, X).T, rtol=1e-14, atol=0)


def test_gram_deterministic(rng):
    X = rng.normal(size=(50, 6))
    a = kernel_matrix(KernelSpec(0.3), X, X[:20])
    b = kernel_matrix(KernelSpec(0.3), X, X[:20])
    assert a.tobytes() == b.tobytes()


def test_backends_agree(rng):
    X, Y = rng.normal(size=(40, 3)), rng.normal(size=(30, 3))
    np.testing.assert_allclose(_core.gaussian_gram(X, Y, 0.8), _fallback.gaussian_gram(X, Y, 0.8),
                               rtol=0, atol=1e-12)
    np.testing.assert_allclose(_core.gaussian_gram_sym(X, 0.8), _fallback.gaussian_gram_sym(X, 0.8),
                               rtol=0, atol=1e-12)
    W, b = rng.normal(size=(11, 3)), rng.uniform(-np.pi, np.pi, 11)
    np.testing.assert_allclose(_core.cosine_features(X, W, b, 0.5), _fallback.cosine_features(X, W, b, 0.5),
                               rtol=0, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, (4, 3), elements=st.floats(-5, 5)),
    st.floats(1e-3, 10),
)
def test_kernel_range(X, sigma):
    K = kernel_matrix(KernelSpec(sigma), X)
    assert np.all(K > 0) or np.all(K >= 0)
    assert np.all(K <= 1.0)
    np.testing.assert_array_equal(np.diag(K), 1.0)
    off = ~np.eye(4, dtype=bool)
    distinct = np.array([[np.any(X[i] != X[j]) for j in range(4)] for i in range(4)])
    # strictly below one for distinct points unless the distance underflows
    d2 = ((X[:, None] - X[None]) ** 2).sum(-1)
    visible = distinct & off & (sigma * d2 > 1e-12)
    assert np.all(K[visible] < 1.0)
