import numpy as np
import pytest
from scipy import linalg, stats

from xnv.cca import fit_cca, project


def _oracle_correlations(Z1, Z2, eps):
    """Square roots of the eigenvalues of (C11+eI)^-1 C12 (C22+eI)^-1 C21."""
    A1, A2 = Z1 - Z1.mean(0), Z2 - Z2.mean(0)
    N = Z1.shape[0]
    C11, C22, C12 = A1.T @ A1 / N, A2.T @ A2 / N, A1.T @ A2 / N
    I1, I2 = np.eye(C11.shape[0]), np.eye(C22.shape[0])
    T = linalg.solve(C11 + eps * I1, C12) @ linalg.solve(C22 + eps * I2, C12.T)
    w = np.sort(np.real(linalg.eigvals(T)))[::-1]
    return np.sqrt(np.clip(w, 0, None))


def _correlated_views(rng, N, r1, r2, noise=1.0):
    S = rng.normal(size=(N, 3))
    Z1 = S @ rng.normal(size=(3, r1)) + noise * rng.normal(size=(N, r1))
    Z2 = S @ rng.normal(size=(3, r2)) + noise * rng.normal(size=(N, r2))
    return Z1 + 2.0, Z2 - 1.0


def test_identical_views(rng):
    Z = rng.normal(size=(400, 5))
    m = fit_cca(Z, Z, reg=1e-8)
    assert np.all(m.correlations >= 0.999)
    np.testing.assert_allclose(m.correlations, _oracle_correlations(Z, Z, 1e-8), atol=1e-8)


def test_independent_views_null_level():
    rng = np.random.default_rng(1)
    m = fit_cca(rng.normal(size=(10_000, 5)), rng.normal(size=(10_000, 5)))
    assert np.all(m.correlations <= 0.1)


def test_invertible_map_of_view(rng):
    Z = rng.normal(size=(300, 5))
    A = rng.normal(size=(5, 5)) + 3 * np.eye(5)
    base = fit_cca(Z, Z, reg=1e-8).correlations
    np.testing.assert_allclose(fit_cca(Z, Z @ A, reg=1e-8).correlations, base, atol=1e-6)


@pytest.mark.parametrize("r1,r2", [(3, 3), (4, 6), (6, 2)])
def test_orthogonality_and_correlation(rng, r1, r2):
    Z1, Z2 = _correlated_views(rng, 500, r1, r2)
    m = fit_cca(Z1, Z2, reg=1e-10)
    P1, P2 = project(m, 1, Z1), project(m, 2, Z2)
    N, p = Z1.shape[0], m.n_components
    assert p == min(r1, r2)
    np.testing.assert_allclose(P1.T @ P1 / N, np.eye(p), atol=1e-6)
    np.testing.assert_allclose(P2.T @ P2 / N, np.eye(p), atol=1e-6)
    np.testing.assert_allclose(P1.T @ P2 / N, np.diag(m.correlations), atol=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_matches_eigen_oracle(seed):
    rng = np.random.default_rng(seed)
    r1, r2 = rng.integers(1, 7, size=2)
    Z1, Z2 = _correlated_views(rng, int(rng.integers(50, 501)), r1, r2)
    eps = 1e-3
    m = fit_cca(Z1, Z2, reg=eps)
    np.testing.assert_allclose(m.correlations, _oracle_correlations(Z1, Z2, eps)[: m.n_components], atol=1e-8)


def test_orthogonal_invariance(rng):
    Z1, Z2 = _correlated_views(rng, 400, 4, 5)
    Q = linalg.qr(rng.normal(size=(4, 4)))[0]
    a = fit_cca(Z1, Z2, reg=1e-6).correlations
    b = fit_cca(Z1 @ Q, Z2, reg=1e-6).correlations
    np.testing.assert_allclose(a, b, atol=1e-6)


def test_correlations_sorted_and_clamped(rng):
    Z1, Z2 = _correlated_views(rng, 200, 5, 5, noise=0.01)
    lam = fit_cca(Z1, Z2).correlations
    assert np.all(np.diff(lam) <= 0)
    assert np.all((lam >= 0) & (lam <= 1))


def test_default_reg_is_relative(rng):
    Z1, Z2 = _correlated_views(rng, 200, 3, 3)
    m = fit_cca(Z1, Z2)
    c11 = np.cov(Z1.T, bias=True)
    assert m.reg[0] == pytest.approx(1e-6 * np.trace(c11) / 3)


def test_errors(rng):
    with pytest.raises(ValueError, match="more rows"):
        fit_cca(rng.normal(size=(5, 5)), rng.normal(size=(5, 2)))
    bad = rng.normal(size=(20, 2))
    bad[3, 1] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        fit_cca(bad, rng.normal(size=(20, 2)))
    with pytest.raises(ValueError):
        fit_cca(rng.normal(size=(20, 2)), rng.normal(size=(19, 2)))
    m = fit_cca(rng.normal(size=(20, 2)), rng.normal(size=(20, 3)))
    with pytest.raises(ValueError, match="dimension"):
        project(m, 1, np.zeros((1, 3)))
    with pytest.raises(ValueError):
        project(m, 3, np.zeros((1, 2)))


def test_project_is_pure(rng):
    Z1, Z2 = _correlated_views(rng, 100, 3, 3)
    m = fit_cca(Z1, Z2)
    a = project(m, 1, Z1[7])
    b = project(m, 1, Z1[7])
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(project(m, 1, Z1)[7], a[0])


def test_null_correlation_distribution_is_small():
    # first canonical correlation of independent views shrinks like sqrt(r/N)
    lam1 = [fit_cca(*np.random.default_rng(s).normal(size=(2, 2000, 4))).correlations[0] for s in range(10)]
    assert stats.describe(lam1).mean < 0.1
