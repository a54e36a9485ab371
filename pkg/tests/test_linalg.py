import math

import numpy as np
import pytest

from pppca import linalg
from pppca.errors import ConvergenceError, DimensionError, MatrixValidationError


# --- independent oracles ----------------------------------------------------


def naive_column_sums(x):
    rows, cols = x.shape
    out = [0.0] * cols
    for t in range(cols):
        acc = 0.0
        for j in range(rows):
            acc += x[j][t]
        out[t] = acc
    return np.array(out)


def naive_gram(x):
    rows, cols = x.shape
    g = np.zeros((cols, cols))
    for s in range(cols):
        for t in range(cols):
            for j in range(rows):
                g[s, t] += x[j, s] * x[j, t]
    return g


def naive_matmul(a, b):
    n, d = a.shape
    d2, k = b.shape
    assert d == d2
    out = np.zeros((n, k))
    for i in range(n):
        for j in range(k):
            for t in range(d):
                out[i, j] += a[i, t] * b[t, j]
    return out


def cofactor_det(a):
    n = a.shape[0]
    if n == 1:
        return a[0, 0]
    total = 0.0
    for c in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), c, axis=1)
        total += ((-1) ** c) * a[0, c] * cofactor_det(minor)
    return total


def random_symmetric(rng, d, scale=1.0):
    m = rng.normal(size=(d, d)) * scale
    return (m + m.T) / 2


# --- column sums / centering ------------------------------------------------


def test_column_sums_hand():
    assert np.array_equal(linalg.column_sums([[1, 2], [3, 4]]), [4, 6])


def test_column_sums_zero_matrix():
    assert np.array_equal(linalg.column_sums(np.zeros((3, 2))), [0, 0])


def test_column_sums_matches_naive_oracle():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(50, 5)) * 10
    assert np.allclose(linalg.column_sums(x), naive_column_sums(x), atol=1e-12)


def test_center_columns_hand():
    got = linalg.center_columns([[1, 2], [3, 4]], [2, 3])
    assert np.array_equal(got, [[-1, -1], [1, 1]])


def test_center_by_means_zeroes_columns():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(17, 4)) * 5
    centered = linalg.center_columns(x, linalg.column_sums(x) / x.shape[0])
    assert np.max(np.abs(linalg.column_sums(centered))) < 1e-12


def test_center_zero_mean_is_identity():
    x = np.arange(6.0).reshape(3, 2)
    assert np.array_equal(linalg.center_columns(x, [0, 0]), x)


def test_center_length_mismatch():
    with pytest.raises(DimensionError):
        linalg.center_columns([[1, 2]], [1, 2, 3])


def test_matrix_validation():
    with pytest.raises(MatrixValidationError):
        linalg.check_matrix([[1.0, np.nan]])
    with pytest.raises(MatrixValidationError):
        linalg.check_matrix(np.empty((0, 3)))
    with pytest.raises(MatrixValidationError):
        linalg.check_matrix([1.0, 2.0])


# --- gram --------------------------------------------------------------------


def test_gram_identity():
    assert np.array_equal(linalg.gram(np.eye(2)), np.eye(2))


def test_gram_outer_product():
    assert np.array_equal(linalg.gram([[1, 2]]), [[1, 2], [2, 4]])


def test_gram_matches_triple_loop_and_symmetry():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(20, 4)) * 3
    g = linalg.gram(x)
    assert np.array_equal(g, g.T)
    assert np.allclose(g, naive_gram(x), atol=1e-12 * np.abs(g).max())


def test_gram_partition_decomposition():
    # Summing per-partition scatter matrices reproduces the pooled scatter.
    rng = np.random.default_rng(4)
    x = rng.normal(size=(30, 5))
    centered = linalg.center_columns(x, linalg.column_means(x))
    pooled = linalg.gram(centered)
    split = linalg.gram(centered[:11]) + linalg.gram(centered[11:23]) + linalg.gram(
        centered[23:]
    )
    assert np.allclose(pooled, split, atol=1e-12 * max(1.0, np.abs(pooled).max()))


# --- jacobi eigensolver -------------------------------------------------------


def test_jacobi_diagonal_matrix():
    pairs = linalg.jacobi_eigh(np.diag([2.0, 1.0]))
    assert np.allclose(pairs.values, [2, 1])
    assert np.allclose(np.abs(pairs.vectors), np.eye(2))


def test_jacobi_known_2x2():
    pairs = linalg.jacobi_eigh([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(pairs.values, [1, -1], atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_jacobi_residuals_trace_orthonormality(d):
    rng = np.random.default_rng(100 + d)
    c = random_symmetric(rng, d, scale=4.0)
    pairs = linalg.jacobi_eigh(c, tol=1e-12)
    fro = np.linalg.norm(c)
    for j in range(d):
        residual = c @ pairs.vectors[:, j] - pairs.values[j] * pairs.vectors[:, j]
        assert np.linalg.norm(residual) <= 1e-10 * fro
    assert abs(pairs.values.sum() - np.trace(c)) <= 1e-10 * fro
    assert np.allclose(pairs.vectors.T @ pairs.vectors, np.eye(d), atol=1e-10)
    assert np.all(np.diff(pairs.values) <= 1e-15)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_jacobi_determinant_against_cofactor_oracle(d):
    rng = np.random.default_rng(200 + d)
    c = random_symmetric(rng, d)
    pairs = linalg.jacobi_eigh(c)
    det = cofactor_det(c)
    assert math.isclose(np.prod(pairs.values), det, rel_tol=1e-8, abs_tol=1e-12)


def test_jacobi_eigenvalues_match_library_solver():
    rng = np.random.default_rng(7)
    c = random_symmetric(rng, 9, scale=2.0)
    ours = linalg.jacobi_eigh(c).values
    reference = np.sort(np.linalg.eigvalsh(c))[::-1]
    assert np.allclose(ours, reference, atol=1e-10)


def test_jacobi_rejects_non_symmetric():
    with pytest.raises(MatrixValidationError):
        linalg.jacobi_eigh([[1.0, 2.0], [0.5, 1.0]])


def test_jacobi_rejects_non_square():
    with pytest.raises(DimensionError):
        linalg.jacobi_eigh(np.ones((2, 3)))


def test_jacobi_non_convergence_reports_off_diagonal():
    c = random_symmetric(np.random.default_rng(8), 6)
    with pytest.raises(ConvergenceError) as err:
        linalg.jacobi_eigh(c, tol=1e-15, max_sweeps=1)
    assert err.value.off_diagonal_norm is not None
    assert err.value.off_diagonal_norm > 0


def test_jacobi_zero_matrix():
    pairs = linalg.jacobi_eigh(np.zeros((3, 3)))
    assert np.array_equal(pairs.values, np.zeros(3))


# --- top_k_transfer ------------------------------------------------------------


def test_top_k_dominant_axis():
    pairs = linalg.jacobi_eigh(np.diag([2.0, 1.0]))
    t = linalg.top_k_transfer(pairs, 1)
    assert np.allclose(t, [[1.0], [0.0]])


def test_top_k_on_diagonal_3x3():
    pairs = linalg.jacobi_eigh(np.diag([3.0, 2.0, 1.0]))
    t = linalg.top_k_transfer(pairs, 2)
    assert np.allclose(t, np.eye(3)[:, :2])


def test_top_k_orthonormal_columns():
    rng = np.random.default_rng(9)
    pairs = linalg.jacobi_eigh(random_symmetric(rng, 7))
    t = linalg.top_k_transfer(pairs, 4)
    assert np.allclose(t.T @ t, np.eye(4), atol=1e-10)


def test_top_k_sign_flip_invariance():
    rng = np.random.default_rng(10)
    pairs = linalg.jacobi_eigh(random_symmetric(rng, 5))
    flipped = linalg.EigenPairs(
        values=pairs.values, vectors=pairs.vectors * np.array([1, -1, 1, -1, 1])
    )
    assert np.array_equal(
        linalg.top_k_transfer(pairs, 3), linalg.top_k_transfer(flipped, 3)
    )


def test_top_k_rejects_bad_k():
    pairs = linalg.jacobi_eigh(np.diag([2.0, 1.0]))
    with pytest.raises(DimensionError):
        linalg.top_k_transfer(pairs, 0)
    with pytest.raises(DimensionError):
        linalg.top_k_transfer(pairs, 2)


# --- project --------------------------------------------------------------------


def test_project_identity_cases():
    x = np.eye(2)
    assert np.array_equal(linalg.project(x, [[1.0], [0.0]]), [[1.0], [0.0]])
    y = np.random.default_rng(11).normal(size=(4, 3))
    assert np.array_equal(linalg.project(y, np.eye(3)), y)


def test_project_matches_naive_matmul():
    rng = np.random.default_rng(12)
    x = rng.normal(size=(10, 4))
    t = rng.normal(size=(4, 2))
    assert np.allclose(linalg.project(x, t), naive_matmul(x, t), atol=1e-12)


def test_project_dimension_mismatch():
    with pytest.raises(DimensionError):
        linalg.project(np.ones((2, 3)), np.ones((2, 2)))


# --- centralized PCA --------------------------------------------------------------


def test_pca_rank1_line_preserves_distances():
    x = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0], [4.0, 8.0]])
    _, reduced = linalg.centralized_pca(x, 1)
    coords = reduced[:, 0]
    for i in range(4):
        for j in range(4):
            original = np.linalg.norm(x[i] - x[j])
            assert abs(abs(coords[i] - coords[j]) - original) < 1e-10


def test_pca_projection_variance_equals_eigenvalues():
    rng = np.random.default_rng(13)
    x = rng.normal(size=(40, 6)) * [1, 2, 3, 4, 5, 6]
    k = 3
    _, reduced = linalg.centralized_pca(x, k)
    centered = linalg.center_columns(x, linalg.column_means(x))
    cov = linalg.gram(centered) / (x.shape[0] - 1)
    top = linalg.jacobi_eigh(cov).values[:k]
    variances = reduced.var(axis=0, ddof=1)
    assert np.allclose(variances, top, atol=1e-10 * max(1.0, top[0]))


def test_pca_duplicate_rows_match_reweighted_covariance_oracle():
    rng = np.random.default_rng(14)
    unique = rng.normal(size=(6, 4))
    repeats = np.array([3, 1, 2, 4, 1, 2])
    x = np.repeat(unique, repeats, axis=0)
    n = x.shape[0]
    mean = (repeats @ unique) / n
    weighted = np.zeros((4, 4))
    for row, w in zip(unique, repeats):
        delta = row - mean
        weighted += w * np.outer(delta, delta)
    weighted /= n - 1
    centered = linalg.center_columns(x, linalg.column_means(x))
    cov = linalg.gram(centered) / (n - 1)
    assert np.allclose(cov, weighted, atol=1e-12 * max(1.0, np.abs(weighted).max()))
    ours = linalg.top_k_transfer(linalg.jacobi_eigh(cov), 2)
    oracle = linalg.top_k_transfer(linalg.jacobi_eigh(weighted), 2)
    assert np.allclose(ours, oracle, atol=1e-9)


def test_pca_exact_row_permutation_invariance():
    rng = np.random.default_rng(15)
    x = rng.normal(size=(25, 5)) * 7
    perm = rng.permutation(25)
    t1, out1 = linalg.centralized_pca(x, 3)
    t2, out2 = linalg.centralized_pca(x[perm], 3)
    assert np.array_equal(t1, t2)
    assert np.array_equal(out1[perm], out2)


def test_pca_rejects_degenerate_inputs():
    with pytest.raises(DimensionError):
        linalg.centralized_pca(np.ones((1, 3)), 1)
    with pytest.raises(DimensionError):
        linalg.centralized_pca(np.ones((5, 3)), 3)


# --- principal angles ----------------------------------------------------------


def test_principal_angles_identical_and_orthogonal():
    a = np.eye(4)[:, :2]
    assert linalg.largest_principal_angle(a, a) < 1e-12
    b = np.eye(4)[:, 2:]
    assert abs(linalg.largest_principal_angle(a, b) - np.pi / 2) < 1e-12


def test_principal_angles_sign_and_rotation_invariant():
    rng = np.random.default_rng(16)
    q, _ = np.linalg.qr(rng.normal(size=(6, 3)))
    theta = 0.3
    rot = np.array(
        [
            [np.cos(theta), -np.sin(theta), 0],
            [np.sin(theta), np.cos(theta), 0],
            [0, 0, 1],
        ]
    )
    assert linalg.largest_principal_angle(q, q @ rot) < 1e-10
    assert linalg.largest_principal_angle(q, -q) < 1e-10
