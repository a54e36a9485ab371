"""Plaintext linear algebra underlying the private PCA pipeline.

Column statistics, centering, Gram matrices, a deterministic cyclic-Jacobi
eigensolver for symmetric matrices, projection, and the centralized PCA
reference used to verify losslessness.

Column sums and Gram entries are accumulated with ``math.fsum`` so that the
result is the correctly rounded true sum.  This makes ``centralized_pca``
bit-for-bit invariant under row permutations of its input, which the rest of
the package relies on when comparing differently partitioned runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, MatrixValidationError

DEFAULT_EIGH_TOL = 1e-12
DEFAULT_MAX_SWEEPS = 100


def check_matrix(x, name: str = "matrix") -> np.ndarray:
    """Validate and return ``x`` as a 2-D float64 array.

    Requires at least one row and one column and all entries finite.
    """
    a = np.asarray(x, dtype=float)
    if a.ndim != 2:
        raise MatrixValidationError(f"{name} must be 2-D, got ndim={a.ndim}")
    rows, cols = a.shape
    if rows < 1 or cols < 1:
        raise MatrixValidationError(f"{name} must be at least 1x1, got {rows}x{cols}")
    if not np.isfinite(a).all():
        bad = np.argwhere(~np.isfinite(a))[0]
        raise MatrixValidationError(
            f"{name} has a non-finite entry at ({bad[0]}, {bad[1]})"
        )
    return np.ascontiguousarray(a)


def check_vector(v, length: int | None = None, name: str = "vector") -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        raise MatrixValidationError(f"{name} must be 1-D, got ndim={a.ndim}")
    if not np.isfinite(a).all():
        raise MatrixValidationError(f"{name} has a non-finite entry")
    if length is not None and a.shape[0] != length:
        raise DimensionError(f"{name} has length {a.shape[0]}, expected {length}")
    return a


@dataclass(frozen=True)
class EigenPairs:
    """Eigenvalues sorted descending; column j of ``vectors`` pairs with
    ``values[j]``."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def column_sums(x) -> np.ndarray:
    """Exact per-column sums (order independent)."""
    a = check_matrix(x)
    return np.array([math.fsum(a[:, t]) for t in range(a.shape[1])])


def column_means(x) -> np.ndarray:
    a = check_matrix(x)
    return column_sums(a) / a.shape[0]


def center_columns(x, mean) -> np.ndarray:
    """Subtract ``mean[t]`` from every entry of column t."""
    a = check_matrix(x)
    m = check_vector(mean, length=a.shape[1], name="mean")
    return a - m


def gram(x) -> np.ndarray:
    """The scatter matrix X^T X, exactly symmetric by construction.

    The upper triangle is accumulated with ``math.fsum`` and mirrored.
    """
    a = check_matrix(x)
    d = a.shape[1]
    g = np.empty((d, d))
    for s in range(d):
        for t in range(s, d):
            v = math.fsum(a[:, s] * a[:, t])
            g[s, t] = v
            g[t, s] = v
    return g


def _off_diagonal_norm(a: np.ndarray) -> float:
    mask = ~np.eye(a.shape[0], dtype=bool)
    return float(np.sqrt(np.sum(a[mask] ** 2)))


def jacobi_eigh(
    c,
    tol: float = DEFAULT_EIGH_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> EigenPairs:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps run until the Frobenius norm of the off-diagonal part drops below
    ``tol * ||C||_F``, which bounds the per-pair residual ||Cv - lambda v||
    by the same amount.  Deterministic: no pivot search, fixed sweep order.

    Raises ``MatrixValidationError`` for non-symmetric input (relative
    asymmetry above 1e-9) and ``ConvergenceError`` if ``max_sweeps`` cyclic
    sweeps do not reach the tolerance.
    """
    a = check_matrix(c, name="C")
    d = a.shape[0]
    if a.shape[1] != d:
        raise DimensionError(f"C must be square, got {a.shape[0]}x{a.shape[1]}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    norm = float(np.linalg.norm(a))
    asym = float(np.max(np.abs(a - a.T)))
    if asym > 1e-9 * max(norm, 1.0):
        raise MatrixValidationError(
            f"C is not symmetric: max |C - C^T| = {asym:g} exceeds 1e-9 relative"
        )
    a = (a + a.T) / 2.0
    v = np.eye(d)
    if d == 1:
        return EigenPairs(values=a.diagonal().copy(), vectors=v)

    threshold = tol * norm
    for _ in range(max_sweeps):
        if _off_diagonal_norm(a) <= threshold or norm == 0.0:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                cos = 1.0 / math.sqrt(t * t + 1.0)
                sin = t * cos
                rot_p = cos * a[:, p] - sin * a[:, q]
                rot_q = sin * a[:, p] + cos * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = cos * a[p, :] - sin * a[q, :]
                rot_q = sin * a[p, :] + cos * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                # Rotations leave tiny residue off the (p, q) entry; pin the
                # symmetric pair to zero so the matrix stays exactly symmetric.
                a[p, q] = a[q, p] = 0.0
                rot_p = cos * v[:, p] - sin * v[:, q]
                rot_q = sin * v[:, p] + cos * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    else:
        off = _off_diagonal_norm(a)
        if off > threshold:
            raise ConvergenceError(
                f"Jacobi sweep budget of {max_sweeps} exhausted; "
                f"off-diagonal norm {off:g} above threshold {threshold:g}",
                off_diagonal_norm=off,
            )

    values = a.diagonal().copy()
    order = np.argsort(-values, kind="stable")
    return EigenPairs(values=values[order], vectors=v[:, order])


def canonicalize_sign(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive.

    Ties in magnitude resolve to the lowest index (argmax convention).
    """
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        pivot = int(np.argmax(np.abs(col)))
        if col[pivot] < 0:
            out[:, j] = -col
    return out


def top_k_transfer(pairs: EigenPairs, k: int) -> np.ndarray:
    """The d x k matrix of eigenvectors for the k largest eigenvalues.

    Column signs are canonical (largest-magnitude entry positive) so every
    role and the plaintext reference produce comparable matrices.
    """
    d = pairs.dim
    if not 1 <= k < d:
        raise DimensionError(f"k must satisfy 1 <= k < d={d}, got {k}")
    return canonicalize_sign(pairs.vectors[:, :k])


def project(x, transfer) -> np.ndarray:
    """Matrix product X @ T."""
    a = check_matrix(x)
    t = check_matrix(transfer, name="transfer")
    if a.shape[1] != t.shape[0]:
        raise DimensionError(
            f"cannot project {a.shape[0]}x{a.shape[1]} data with "
            f"{t.shape[0]}x{t.shape[1]} transfer matrix"
        )
    return a @ t


def centralized_pca(x, k: int, tol: float = DEFAULT_EIGH_TOL):
    """Reference PCA on pooled plaintext data.

    Centers columns by their means, eigendecomposes X^T X / (n - 1), and
    returns ``(transfer, reduced)`` where ``reduced`` is the centered data
    projected on the top-k eigenvectors.  Deterministic for fixed input.
    """
    a = check_matrix(x)
    n, d = a.shape
    if n < 2:
        raise DimensionError(f"need at least 2 rows for covariance, got {n}")
    if not 1 <= k < d:
        raise DimensionError(f"k must satisfy 1 <= k < d={d}, got {k}")
    centered = center_columns(a, column_means(a))
    cov = gram(centered) / (n - 1)
    transfer = top_k_transfer(jacobi_eigh(cov, tol=tol), k)
    return transfer, project(centered, transfer)


def covariance(x) -> np.ndarray:
    """Sample covariance of pre-centered data: X^T X / (n - 1)."""
    a = check_matrix(x)
    if a.shape[0] < 2:
        raise DimensionError("need at least 2 rows for covariance")
    return gram(a) / (a.shape[0] - 1)


def principal_angles(a, b) -> np.ndarray:
    """Principal angles (radians, ascending) between the column spaces of two
    orthonormal-column matrices.  Zero everywhere means identical subspaces.

    Cosines come from the singular values of A^T B and sines from the part of
    B orthogonal to span(A), so tiny angles do not drown in arccos rounding.
    """
    ma = check_matrix(a, name="a")
    mb = check_matrix(b, name="b")
    if ma.shape != mb.shape:
        raise DimensionError(f"subspace shapes differ: {ma.shape} vs {mb.shape}")
    overlap = ma.T @ mb
    cosines = np.linalg.svd(overlap, compute_uv=False)  # descending
    sines = np.linalg.svd(mb - ma @ overlap, compute_uv=False)  # descending
    # The largest sine pairs with the smallest cosine.
    return np.arctan2(sines[::-1], cosines)


def largest_principal_angle(a, b) -> float:
    return float(np.max(principal_angles(a, b)))


def eigenvalue_gap(values: np.ndarray, k: int) -> float:
    """Relative gap between the k-th and (k+1)-th eigenvalues (descending)."""
    v = np.asarray(values, dtype=float)
    if not 1 <= k < v.shape[0]:
        raise DimensionError(f"k must satisfy 1 <= k < {v.shape[0]}")
    scale = max(abs(float(v[0])), 1e-300)
    return float(v[k - 1] - v[k]) / scale
