"""Seeded problem generators.

All randomness goes through ``numpy.random.Generator(PCG64(seed))``, a
portable generator whose streams are reproducible across platforms for a
fixed numpy release.
"""

from __future__ import annotations

import math

import numpy as np

from .solvers import LinearProblem, make_problem

GENERATORS = ("cycle", "random_dense", "shifted_spd", "diag", "stagnating")


def rng_for(seed: int | None) -> np.random.Generator:
    seed = 0 if seed is None else int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.PCG64(seed))


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def cycle_matrix(n: int) -> np.ndarray:
    """Permutation matrix of the cycle ``(1 2 ... n)``: ``e_i -> e_{i+1}``."""
    return np.roll(np.eye(n), 1, axis=0)


def cycle(N: int, k: int = 1) -> LinearProblem:
    if N < 1 or not 1 <= k <= N:
        raise ValueError(f"cycle needs N >= 1 and 1 <= k <= N, got N={N}, k={k}")
    b = np.zeros(N)
    b[k - 1] = 1.0
    return make_problem(cycle_matrix(N), b, np.zeros(N))


def random_dense(N: int, cond: float = 100.0, seed: int | None = 0) -> LinearProblem:
    """``A = U diag(s) V^T`` with log-spaced singular values of ratio ``cond``.

    The spectrum is centred on one in the geometric sense, so
    ``||A|| = ||A^{-1}|| = sqrt(cond)``. ``b`` and ``x0`` are Gaussian with
    unit expected norm.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if not cond >= 1:
        raise ValueError("cond must be >= 1")
    rng = rng_for(seed)
    U = random_orthogonal(N, rng)
    V = random_orthogonal(N, rng)
    half = 0.5 * math.log10(cond)
    s = np.logspace(half, -half, N)
    A = (U * s) @ V.T
    b = rng.standard_normal(N) / math.sqrt(N)
    x0 = rng.standard_normal(N) / math.sqrt(N)
    return make_problem(A, b, x0)


def shifted_spd(N: int, lmin: float = -3.0, lmax: float = -1.0, seed: int | None = 0) -> LinearProblem:
    """Symmetric ``A`` with eigenvalues spread evenly over ``[lmin, lmax]``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if lmin > lmax or lmin * lmax <= 0:
        raise ValueError("shifted_spd needs lmin <= lmax of the same nonzero sign")
    rng = rng_for(seed)
    Q = random_orthogonal(N, rng)
    A = (Q * np.linspace(lmin, lmax, N)) @ Q.T
    A = 0.5 * (A + A.T)
    b = rng.standard_normal(N) / math.sqrt(N)
    return make_problem(A, b, np.zeros(N))


def diag(values, b=None) -> LinearProblem:
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if values.size < 1:
        raise ValueError("diag needs at least one value")
    return make_problem(np.diag(values), np.ones(values.size) if b is None else b, np.zeros(values.size))


def stagnating(N: int, s: int = 1, seed: int | None = 0, max_cond: float = 1e4) -> LinearProblem:
    """Problem whose GMRES iterates repeat exactly once, at step ``s``.

    Built from an Arnoldi decomposition ``A = Q H Q^T`` with ``r0`` along
    ``Q[:, 0]``. ``H`` is random upper Hessenberg with positive subdiagonal
    (so the grade is ``N``), except ``H[s, s]``, which is chosen to make the
    rotated diagonal of column ``s`` vanish. That is exactly the condition
    ``r0 . (I - K_s) A^{s+1} r0 = 0`` for ``x_s = x_{s+1}``.

    Requires ``0 <= s <= N - 2``; draws are repeated until ``cond(A)`` is at
    most ``max_cond``.
    """
    if N < 2 or not 0 <= s <= N - 2:
        raise ValueError(f"stagnating needs N >= 2 and 0 <= s <= N-2, got N={N}, s={s}")
    rng = rng_for(seed)
    for _ in range(1000):
        H = np.triu(rng.standard_normal((N, N)), -1)
        H[np.arange(1, N), np.arange(N - 1)] = 0.5 + rng.random(N - 1)
        H[s, s] = _stagnation_diagonal(H, s)
        if np.linalg.cond(H) > max_cond:
            continue
        Q = random_orthogonal(N, rng)
        A = Q @ H @ Q.T
        b = Q[:, 0] * (0.5 + rng.random())
        return make_problem(A, b, np.zeros(N))
    raise RuntimeError("could not draw a well-conditioned stagnating problem")


def _stagnation_diagonal(H: np.ndarray, s: int) -> float:
    """Value of ``H[s, s]`` that zeroes the rotated diagonal of column ``s``."""

    def rotated(t):
        col = H[: s + 2, s].copy()
        col[s] = t
        for j in range(s):
            c, sn = rots[j]
            col[j], col[j + 1] = c * col[j] + sn * col[j + 1], -sn * col[j] + c * col[j + 1]
        return col[s]

    rots = []
    R = H.copy()
    for j in range(s):
        col = R[: j + 2, j].copy()
        for i in range(j):
            c, sn = rots[i]
            col[i], col[i + 1] = c * col[i] + sn * col[i + 1], -sn * col[i] + c * col[i + 1]
        d = math.hypot(col[j], col[j + 1])
        rots.append((col[j] / d, col[j + 1] / d))
    v0, v1 = rotated(0.0), rotated(1.0)
    return -v0 / (v1 - v0)


def generate_problem(name: str, params: dict | None = None, seed: int | None = 0) -> LinearProblem:
    """Dispatch to a named generator with keyword ``params``."""
    params = dict(params or {})
    if name == "cycle":
        return cycle(int(params.pop("N")), int(params.pop("k", 1)), **_no_extra(params))
    if name == "random_dense":
        return random_dense(int(params.pop("N")), float(params.pop("cond", 100.0)), seed, **_no_extra(params))
    if name == "shifted_spd":
        return shifted_spd(int(params.pop("N")), float(params.pop("lmin", -3.0)),
                           float(params.pop("lmax", -1.0)), seed, **_no_extra(params))
    if name == "diag":
        return diag(params.pop("values"), **_no_extra(params))
    if name == "stagnating":
        return stagnating(int(params.pop("N")), int(params.pop("s", 1)), seed, **_no_extra(params))
    raise ValueError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")


def _no_extra(params: dict) -> dict:
    if params:
        raise ValueError(f"unexpected generator parameters: {', '.join(sorted(params))}")
    return {}
