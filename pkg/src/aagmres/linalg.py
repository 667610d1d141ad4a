"""Dense real linear algebra primitives.

Vectors and matrices are plain ``numpy`` float arrays. The helpers here
validate shapes and finiteness, solve rank-deficient least squares problems
through a pivoted Householder QR, and grow orthonormal bases one vector at a
time with a rank decision at every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

DEFAULT_DEP_TOL = 1e-10
DEFAULT_RANK_TOL = 1e-10


class DimensionError(ValueError):
    """Raised when operand shapes are inconsistent."""


def as_vector(v, name="vector") -> np.ndarray:
    """Return ``v`` as a finite 1-D float array (a copy, made read-only)."""
    arr = np.array(v, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def as_matrix(a, name="matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float array (a copy, made read-only)."""
    arr = np.array(a, dtype=float)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def matvec(A: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Matrix-vector product with an explicit dimension check."""
    A = np.asarray(A, dtype=float)
    v = np.asarray(v, dtype=float)
    if A.ndim != 2 or v.ndim != 1 or A.shape[1] != v.shape[0]:
        raise DimensionError(f"cannot multiply {A.shape} by {v.shape}")
    return A @ v


@dataclass(frozen=True)
class QrFactors:
    """Pivoted QR factors ``M[:, perm] = q @ r`` with a numerical rank.

    Attributes
    ----------
    q : ndarray, shape (m, k)
        Orthonormal columns.
    r : ndarray, shape (k, n)
        Upper trapezoidal factor; ``abs(diag(r))`` is non-increasing.
    perm : ndarray of int, shape (n,)
        Column permutation.
    rank : int
        Number of diagonal entries of ``r`` above ``rank_tol * abs(r[0, 0])``.
    """

    q: np.ndarray
    r: np.ndarray
    perm: np.ndarray
    rank: int


def qr_pivoted(M: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> QrFactors:
    """Householder QR with column pivoting and a relative rank cut."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-D array, got shape {M.shape}")
    if M.shape[1] == 0:
        return QrFactors(np.zeros((M.shape[0], 0)), np.zeros((0, 0)), np.zeros(0, dtype=int), 0)
    q, r, perm = scipy.linalg.qr(M, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(diag > rank_tol * diag[0]))
    return QrFactors(q, r, perm, rank)


def least_squares(M: np.ndarray, rhs: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL):
    """Minimum-norm solution of ``min ||rhs - M c||``.

    The numerical rank comes from a column-pivoted QR. When ``M`` is rank
    deficient the trailing block of ``R`` is dropped and the remaining
    ``[R11 R12]`` is reduced once more (a complete orthogonal decomposition),
    which yields the minimum-norm minimizer rather than a basic solution.

    Parameters
    ----------
    M : ndarray, shape (m, n)
    rhs : ndarray, shape (m,)
    rank_tol : float
        Relative threshold on the pivoted diagonal of ``R``.

    Returns
    -------
    coeffs : ndarray, shape (n,)
    residual_norm : float
        ``||rhs - M @ coeffs||``.
    """
    M = np.asarray(M, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if M.ndim != 2 or rhs.ndim != 1 or M.shape[0] != rhs.shape[0]:
        raise DimensionError(f"least squares shape mismatch: {M.shape} vs {rhs.shape}")
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    n = M.shape[1]
    coeffs = np.zeros(n)
    fac = qr_pivoted(M, rank_tol)
    k = fac.rank
    if k > 0:
        c = fac.q[:, :k].T @ rhs
        w = fac.r[:k, :]
        if k == n:
            y = scipy.linalg.solve_triangular(w, c)
        else:
            # W = T^T Z^T with W^T = Z T, so the min-norm solution is Z T^{-T} c
            z, t = np.linalg.qr(w.T)
            y = z @ scipy.linalg.solve_triangular(t, c, trans="T")
        coeffs[fac.perm] = y
    residual_norm = float(np.linalg.norm(rhs - M @ coeffs))
    return coeffs, residual_norm


class Extension(NamedTuple):
    """Result of :func:`orthonormal_extend`."""

    q: np.ndarray | None
    h: np.ndarray
    dependent: bool
    remainder_norm: float


def orthonormal_extend(basis, v: np.ndarray, dep_tol: float = DEFAULT_DEP_TOL) -> Extension:
    """Orthogonalize ``v`` against an orthonormal basis.

    Modified Gram-Schmidt followed by one full reorthogonalization pass.
    ``v`` counts as dependent when the remainder satisfies
    ``||v - sum h_j q_j|| <= dep_tol * ||v||``.

    ``basis`` may be a sequence of vectors or an ``(N, k)`` array whose
    columns are the basis vectors.
    """
    v = np.asarray(v, dtype=float)
    cols = _columns(basis, v.shape[0])
    h = np.zeros(len(cols))
    vnorm = float(np.linalg.norm(v))
    if vnorm == 0.0:
        return Extension(None, h, True, 0.0)
    w = v.copy()
    for _ in range(2):
        for j, qj in enumerate(cols):
            c = qj @ w
            h[j] += c
            w -= c * qj
    rnorm = float(np.linalg.norm(w))
    if rnorm <= dep_tol * vnorm:
        return Extension(None, h, True, rnorm)
    return Extension(w / rnorm, h, False, rnorm)


def _columns(basis, n: int) -> list[np.ndarray]:
    if basis is None:
        return []
    if isinstance(basis, np.ndarray) and basis.ndim == 2:
        if basis.shape[0] != n:
            raise DimensionError(f"basis rows {basis.shape[0]} != vector length {n}")
        return [basis[:, j] for j in range(basis.shape[1])]
    cols = [np.asarray(b, dtype=float) for b in basis]
    for b in cols:
        if b.shape != (n,):
            raise DimensionError(f"basis vector shape {b.shape} != ({n},)")
    return cols


def orthonormal_basis(vectors: Sequence[np.ndarray] | np.ndarray, dep_tol: float = DEFAULT_DEP_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) for the span of ``vectors``.

    Dependent vectors are skipped. A 2-D array is read column by column.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        vecs = [vectors[:, j] for j in range(vectors.shape[1])]
        n = vectors.shape[0]
    else:
        vecs = [np.asarray(x, dtype=float) for x in vectors]
        n = vecs[0].shape[0] if vecs else 0
    qs: list[np.ndarray] = []
    for x in vecs:
        ext = orthonormal_extend(qs, x, dep_tol)
        if not ext.dependent:
            qs.append(ext.q)
    if not qs:
        return np.zeros((n, 0))
    return np.column_stack(qs)


def project_onto_columnspace(M: np.ndarray, v: np.ndarray, dep_tol: float = DEFAULT_DEP_TOL) -> np.ndarray:
    """Orthogonal projection of ``v`` onto ``range(M)``."""
    M = np.asarray(M, dtype=float)
    v = np.asarray(v, dtype=float)
    if M.ndim != 2 or v.ndim != 1 or M.shape[0] != v.shape[0]:
        raise DimensionError(f"projection shape mismatch: {M.shape} vs {v.shape}")
    Q = orthonormal_basis(M, dep_tol)
    if Q.shape[1] == 0:
        return np.zeros_like(v)
    return Q @ (Q.T @ v)


@dataclass(frozen=True)
class KrylovState:
    """Arnoldi data for ``K_n(A, r0)``.

    ``basis`` holds orthonormal columns ``q_1..q_k`` spanning ``K_k`` and
    ``hessenberg`` is the ``(k+1, k)`` upper Hessenberg factor with
    ``A @ basis == [basis, q_{k+1}] @ hessenberg``. When ``invariant`` is True
    the last row of ``hessenberg`` is zero and ``K_k`` is A-invariant.
    """

    basis: np.ndarray
    hessenberg: np.ndarray
    invariant: bool

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def arnoldi(A: np.ndarray, r0: np.ndarray, max_dim: int | None = None,
            dep_tol: float = DEFAULT_DEP_TOL) -> KrylovState:
    """Run Arnoldi until the Krylov space stops growing or reaches ``max_dim``."""
    A = np.asarray(A, dtype=float)
    r0 = np.asarray(r0, dtype=float)
    n = A.shape[0]
    max_dim = n if max_dim is None else min(max_dim, n)
    beta = np.linalg.norm(r0)
    if beta == 0.0:
        return KrylovState(np.zeros((n, 0)), np.zeros((1, 0)), True)
    qs = [r0 / beta]
    H = np.zeros((max_dim + 1, max_dim))
    invariant = False
    k = 0
    while k < max_dim:
        ext = orthonormal_extend(qs, A @ qs[k], dep_tol)
        H[: k + 1, k] = ext.h
        k += 1
        if ext.dependent:
            invariant = True
            break
        H[k, k - 1] = ext.remainder_norm
        qs.append(ext.q)
    return KrylovState(np.column_stack(qs[:k]), H[: k + 1, :k], invariant)
