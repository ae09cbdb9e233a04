"""Gaussian algebra: density evaluation, quadratic-form merging, moment rules.

Conventions used throughout the package:

  * a quadratic form with weight matrix W is  ||x - m||^2_W = (x-m)' W (x-m),
  * covariance matrices are plain symmetric ndarrays (no wrapper class);
    `symmetrize` both validates near-symmetry and returns the exact
    symmetric average, and `cholesky_pd` is the single positive-definiteness
    gate so every failure raises the same error type.

The two non-trivial operations are `complete_squares`, which merges two
quadratic forms in x into one form in x plus an x-free remainder, and
`isserlis_moment`, the pairing rule for central moments of a multivariate
normal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NotPositiveDefiniteError, SingularCombinationError

# Tolerance table (single source for the whole package).
SYM_TOL = 1e-12  # max relative asymmetry accepted in symmetric inputs
IDENTITY_RTOL = 1e-10  # relative tolerance for exact algebraic identities


def as_vector(value, dim: int | None = None) -> np.ndarray:
    """Coerce a scalar or 1-D sequence to a float vector, checking length."""
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"expected a vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"expected length {dim}, got {arr.shape[0]}")
    return arr


def as_matrix(value, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Coerce a scalar or 2-D sequence to a float matrix, checking shape."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {arr.shape}")
    if shape is not None and arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    return arr


def symmetrize(mat, tol: float = SYM_TOL) -> np.ndarray:
    """Validate that `mat` is symmetric within `tol` and return (M + M')/2.

    The relative asymmetry max|M - M'| / (1 + max|M|) must not exceed `tol`;
    anything larger is a caller error rather than floating-point drift.
    """
    mat = as_matrix(mat)
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    gap = np.max(np.abs(mat - mat.T)) if mat.size else 0.0
    scale = 1.0 + (np.max(np.abs(mat)) if mat.size else 0.0)
    if gap > tol * scale:
        raise ValueError(f"matrix is not symmetric: asymmetry {gap:.3e}")
    return 0.5 * (mat + mat.T)


def cholesky_pd(mat) -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Raises:
        NotPositiveDefiniteError: if the factorization fails.
    """
    mat = symmetrize(mat)
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite: {exc}"
        ) from exc


def min_eig_sym(mat) -> float:
    """Smallest eigenvalue of a symmetric matrix (for diagnostics)."""
    return float(np.linalg.eigvalsh(symmetrize(mat))[0])


def gaussian_density(x, mean, cov):
    """Multivariate normal density N(x; mean, cov).

    Args:
        x: point of shape (n,), or a batch of points of shape (N, n).
           Scalars are accepted when n = 1.
        mean: mean vector, shape (n,).
        cov: covariance, symmetric positive definite, shape (n, n).

    Returns:
        float for a single point, ndarray of shape (N,) for a batch.

    Raises:
        NotPositiveDefiniteError: if cov fails the Cholesky test.
    """
    mean = as_vector(mean)
    n = mean.shape[0]
    chol = cholesky_pd(as_matrix(cov, (n, n)))
    pts = np.asarray(x, dtype=float)
    single = pts.ndim < 2
    pts = np.atleast_2d(pts.reshape(-1, n) if pts.ndim else pts)
    if pts.shape[-1] != n:
        raise ValueError(f"point dimension {pts.shape[-1]} != mean dimension {n}")
    dev = pts - mean
    z = solve_triangular(chol, dev.T, lower=True)
    quad = np.sum(z * z, axis=0)
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    log_pdf = -0.5 * (quad + log_det + n * np.log(2.0 * np.pi))
    out = np.exp(log_pdf)
    return float(out[0]) if single else out


@dataclass(frozen=True)
class QuadFormDecomposition:
    """Result of merging ||x-a||^2_A + ||x-b||^2_B into one form in x.

    The identity is

        ||x-a||^2_A + ||x-b||^2_B
            = ||a-b||^2_cross + ||x - center||^2_combined,

    with cross = A (A+B)^-1 B, center = (A+B)^-1 (A a + B b) and
    combined = A + B.
    """

    cross_weight: np.ndarray
    combined_center: np.ndarray
    combined_weight: np.ndarray


def complete_squares(center_a, weight_a, center_b, weight_b) -> QuadFormDecomposition:
    """Merge two quadratic forms in x into a single form plus a remainder.

    Either weight may be singular (including zero); only the sum A + B has
    to be invertible. All matrices must be symmetric within `SYM_TOL`.

    Args:
        center_a: vector a of shape (n,).
        weight_a: symmetric matrix A of shape (n, n).
        center_b: vector b of shape (n,).
        weight_b: symmetric matrix B of shape (n, n).

    Returns:
        QuadFormDecomposition with cross weight A (A+B)^-1 B (symmetric),
        combined center (A+B)^-1 (A a + B b) and combined weight A + B.

    Raises:
        SingularCombinationError: if A + B cannot be inverted.
    """
    a = as_vector(center_a)
    n = a.shape[0]
    b = as_vector(center_b, n)
    weight_a = symmetrize(as_matrix(weight_a, (n, n)))
    weight_b = symmetrize(as_matrix(weight_b, (n, n)))
    combined = weight_a + weight_b
    try:
        # Solve once for both the x-free cross term and the merged center.
        rhs = np.concatenate([weight_b, (weight_a @ a + weight_b @ b)[:, None]], axis=1)
        sol = np.linalg.solve(combined, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularCombinationError(
            f"combined weight matrix is singular: {exc}"
        ) from exc
    cross = weight_a @ sol[:, :n]
    # A (A+B)^-1 B is symmetric in exact arithmetic; enforce it here.
    cross = 0.5 * (cross + cross.T)
    return QuadFormDecomposition(
        cross_weight=cross,
        combined_center=sol[:, n],
        combined_weight=combined,
    )


def quad_form(x, center, weight) -> float:
    """Evaluate ||x - center||^2_weight for a single point."""
    dev = as_vector(x) - as_vector(center)
    return float(dev @ as_matrix(weight) @ dev)


@dataclass(frozen=True)
class GaussianBelief:
    """A Gaussian state distribution: mean vector and covariance matrix.

    The covariance must be symmetric positive semi-definite; a zero
    covariance is a legal degenerate (point-mass) belief. Filters that
    require strict positive definiteness check it themselves via
    `cholesky_pd`.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = as_vector(self.mean)
        cov = symmetrize(as_matrix(self.cov, (mean.shape[0], mean.shape[0])))
        if cov.size and min_eig_sym(cov) < -SYM_TOL * (1.0 + np.max(np.abs(cov))):
            raise NotPositiveDefiniteError("covariance has a negative eigenvalue")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def variance(self) -> float:
        """Scalar variance; only defined for one-dimensional beliefs."""
        if self.dim != 1:
            raise ValueError("variance is only defined for 1-D beliefs")
        return float(self.cov[0, 0])

    @classmethod
    def scalar(cls, mean: float, variance: float) -> "GaussianBelief":
        return cls(np.array([float(mean)]), np.array([[float(variance)]]))


def isserlis_moment(alpha, cov) -> float:
    """Central moment E[prod_k Z_k^alpha_k] for Z ~ N(0, cov).

    Uses the normal pairing rule
        E[Z_i Z_{k_1} ... Z_{k_M}] = sum_m cov[i, k_m] E[prod_{l != m} Z_{k_l}]
    with memoization on the remaining multiplicities. Odd total order gives
    exactly 0.0.

    Args:
        alpha: multi-index of non-negative integer exponents, length n.
        cov: covariance of shape (n, n), symmetric positive semi-definite.

    Returns:
        The central moment as a float.
    """
    counts = tuple(int(k) for k in alpha)
    if any(k < 0 for k in counts):
        raise ValueError(f"exponents must be non-negative, got {counts}")
    n = len(counts)
    cov = symmetrize(as_matrix(cov, (n, n)))
    if sum(counts) % 2 == 1:
        return 0.0

    memo: dict[tuple[int, ...], float] = {}

    def moment(rem: tuple[int, ...]) -> float:
        if sum(rem) == 0:
            return 1.0
        cached = memo.get(rem)
        if cached is not None:
            return cached
        i = next(k for k, ck in enumerate(rem) if ck > 0)
        rest = list(rem)
        rest[i] -= 1
        acc = 0.0
        for j, cj in enumerate(rest):
            if cj > 0:
                rest[j] -= 1
                acc += cj * cov[i, j] * moment(tuple(rest))
                rest[j] += 1
        memo[rem] = acc
        return acc

    return moment(counts)
