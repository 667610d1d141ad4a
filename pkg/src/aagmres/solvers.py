"""Iterative solvers for the affine problem ``A x + b = 0``.

Every solver returns a :class:`SolverTrace` holding the full iterate history,
so that the diagnostics can compare methods step by step. Indexing follows
one convention throughout: step ``n`` maps ``x_n`` to ``x_{n+1}`` and uses
``betas[n]``, ``alphas[n]`` and produces ``predicted[n]`` (the predicted
iterate ``xbar_{n+1}``).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .linalg import (
    DEFAULT_DEP_TOL,
    DEFAULT_RANK_TOL,
    DimensionError,
    as_matrix,
    as_vector,
    least_squares,
    orthonormal_extend,
)

DIVERGENCE_FACTOR = 1e12


class SingularMatrixError(ValueError):
    pass


class ScheduleTooShortError(ValueError):
    pass


class Termination(str, enum.Enum):
    RESIDUAL_TOL_MET = "residual_tol_met"
    MAX_ITER = "max_iter"
    STAGNATION_DETECTED = "stagnation_detected"
    BREAKDOWN = "breakdown"


@dataclass(frozen=True)
class SolveConfig:
    """Stopping and rank-decision tolerances shared by all solvers.

    ``residual_tol`` is absolute on ``||A x + b||``; ``rank_tol`` drives the
    least squares rank cut and ``dep_tol`` the linear dependence and
    stagnation tests.
    """

    max_iter: int = 500
    residual_tol: float = 1e-10
    rank_tol: float = DEFAULT_RANK_TOL
    dep_tol: float = DEFAULT_DEP_TOL

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        for name in ("residual_tol", "rank_tol", "dep_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True, eq=False)
class LinearProblem:
    """The triple ``(A, b, x0)`` with cached ``r0 = A x0 + b`` and ``x* = -A^{-1} b``.

    ``x_star`` comes from a dense LU solve and is only meant as a reference
    for tests and diagnostics; no iterative method reads it.
    """

    A: np.ndarray
    b: np.ndarray
    x0: np.ndarray
    r0: np.ndarray
    x_star: np.ndarray

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.A @ x + self.b

    def same_as(self, other: "LinearProblem") -> bool:
        return other is self or (
            self.A.shape == other.A.shape
            and np.array_equal(self.A, other.A)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.x0, other.x0)
        )


def make_problem(A, b, x0=None, rank_tol: float = DEFAULT_RANK_TOL) -> LinearProblem:
    """Validate ``(A, b, x0)`` and precompute ``r0`` and the exact solution.

    ``x0`` defaults to the zero vector. Raises :class:`SingularMatrixError`
    when the LU factorization has a pivot below ``rank_tol`` times the
    largest pivot.
    """
    A = as_matrix(A, "A")
    b = as_vector(b, "b")
    n = b.shape[0]
    x0 = as_vector(np.zeros(n) if x0 is None else x0, "x0")
    if A.shape != (n, n) or x0.shape != (n,):
        raise DimensionError(f"inconsistent shapes A{A.shape}, b{b.shape}, x0{x0.shape}")
    with warnings.catch_warnings():
        # an exactly zero pivot is reported below as SingularMatrixError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.max() == 0.0 or pivots.min() <= rank_tol * pivots.max():
        raise SingularMatrixError("singular matrix")
    x_star = scipy.linalg.lu_solve((lu, piv), -b)
    r0 = A @ x0 + b
    for arr in (r0, x_star):
        arr.setflags(write=False)
    return LinearProblem(A, b, x0, r0, x_star)


@dataclass(frozen=True)
class MixingSchedule:
    """The sequence of mixing parameters ``beta_0, beta_1, ...``.

    Build instances with :meth:`constant`, :meth:`explicit` or
    :meth:`optimized`.
    """

    kind: str
    values: tuple[float, ...] = ()
    min_abs_beta: float = 1e-12

    def __post_init__(self):
        if self.kind not in ("constant", "explicit", "optimized"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.min_abs_beta <= 0:
            raise ValueError("min_abs_beta must be positive")
        if self.kind == "constant" and len(self.values) != 1:
            raise ValueError("constant schedule needs exactly one value")
        if self.kind == "explicit" and not self.values:
            raise ValueError("explicit schedule needs at least one value")
        for beta in self.values:
            if not math.isfinite(beta) or abs(beta) < self.min_abs_beta:
                raise ValueError(f"zero mixing parameter ({beta!r})")

    @classmethod
    def constant(cls, beta: float, min_abs_beta: float = 1e-12) -> "MixingSchedule":
        return cls("constant", (float(beta),), min_abs_beta)

    @classmethod
    def explicit(cls, betas: Sequence[float], min_abs_beta: float = 1e-12) -> "MixingSchedule":
        return cls("explicit", tuple(float(x) for x in betas), min_abs_beta)

    @classmethod
    def optimized(cls) -> "MixingSchedule":
        return cls("optimized")

    def beta(self, n: int) -> float:
        if self.kind == "constant":
            return self.values[0]
        if self.kind == "explicit":
            if n >= len(self.values):
                raise ScheduleTooShortError(
                    f"schedule too short: step {n} needs beta but only {len(self.values)} given")
            return self.values[n]
        raise ValueError("optimized schedule has no precomputed betas")


@dataclass(frozen=True, eq=False)
class SolverTrace:
    """Complete history of one solver run.

    Attributes
    ----------
    method : str
        One of ``fixed``, ``simple``, ``gmres``, ``anderson``, ``opt-anderson``.
    iterates, residuals : ndarray, shape (K+1, N)
        ``x_n`` and ``A x_n + b`` for ``n = 0..K``.
    residual_norms : ndarray, shape (K+1,)
    predicted : ndarray, shape (K, N) or None
        ``predicted[n]`` is the predicted iterate ``xbar_{n+1}`` (Anderson
        methods only).
    alphas : tuple of ndarray or None
        ``alphas[n]`` are the mixing weights of step ``n``; they sum to one.
    betas : ndarray, shape (K,) or None
        Mixing parameter used by step ``n``.
    """

    method: str
    problem: LinearProblem
    iterates: np.ndarray
    residuals: np.ndarray
    residual_norms: np.ndarray
    termination: Termination
    config: SolveConfig
    predicted: np.ndarray | None = None
    alphas: tuple[np.ndarray, ...] | None = None
    betas: np.ndarray | None = None
    window: float | None = None
    info: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.iterates.shape[0]

    @property
    def steps(self) -> int:
        return self.iterates.shape[0] - 1

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]

    def xbar(self, n: int) -> np.ndarray:
        """Predicted iterate ``xbar_n`` for ``n >= 1``."""
        if self.predicted is None:
            raise ValueError(f"{self.method} trace has no predicted iterates")
        if n < 1:
            raise IndexError("predicted iterates start at n = 1")
        return self.predicted[n - 1]


class _Recorder:
    def __init__(self, method: str, problem: LinearProblem, cfg: SolveConfig, predicted=False):
        self.method = method
        self.problem = problem
        self.cfg = cfg
        self.xs = [np.array(problem.x0)]
        self.rs = [np.array(problem.r0)]
        self.norms = [float(np.linalg.norm(problem.r0))]
        self.xbars: list[np.ndarray] | None = [] if predicted else None
        self.alphas: list[np.ndarray] | None = [] if predicted else None
        self.betas: list[float] = []

    def push(self, x: np.ndarray, beta=None, xbar=None, alpha=None) -> float:
        r = self.problem.residual(x)
        self.xs.append(x)
        self.rs.append(r)
        self.norms.append(float(np.linalg.norm(r)))
        if beta is not None:
            self.betas.append(float(beta))
        if self.xbars is not None:
            self.xbars.append(xbar)
            self.alphas.append(alpha)
        return self.norms[-1]

    def finish(self, termination: Termination, window=None, **info) -> SolverTrace:
        def frozen(rows):
            arr = np.array(rows, dtype=float)
            arr.setflags(write=False)
            return arr

        n = self.problem.n
        predicted = alphas = None
        if self.xbars is not None:
            predicted = frozen(self.xbars) if self.xbars else np.zeros((0, n))
            alphas = tuple(self.alphas)
        return SolverTrace(
            method=self.method,
            problem=self.problem,
            iterates=frozen(self.xs),
            residuals=frozen(self.rs),
            residual_norms=frozen(self.norms),
            termination=termination,
            config=self.cfg,
            predicted=predicted,
            alphas=alphas,
            betas=None if self.method == "gmres" else frozen(self.betas),
            window=window,
            info=info,
        )


def _close(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    return float(np.linalg.norm(a - b)) <= tol * (1.0 + float(np.linalg.norm(b)))


def fixed_point_run(p: LinearProblem, cfg: SolveConfig = SolveConfig()) -> SolverTrace:
    """Plain fixed-point iteration ``x_{n+1} = x_n + A x_n + b``."""
    return _mixing_loop(p, 1.0, cfg, "fixed")


def simple_mixing_run(p: LinearProblem, beta: float, cfg: SolveConfig = SolveConfig()) -> SolverTrace:
    """Damped iteration ``x_{n+1} = x_n + beta (A x_n + b)``.

    Stops on the residual tolerance, after ``cfg.max_iter`` steps, or with
    ``breakdown`` once the residual grows beyond ``1e12 * ||r0||``.
    """
    if beta == 0 or not math.isfinite(beta):
        raise ValueError("zero mixing parameter")
    return _mixing_loop(p, float(beta), cfg)


def _mixing_loop(p: LinearProblem, beta: float, cfg: SolveConfig, method="simple") -> SolverTrace:
    rec = _Recorder(method, p, cfg)
    r0norm = rec.norms[0]
    if r0norm <= cfg.residual_tol:
        return rec.finish(Termination.RESIDUAL_TOL_MET)
    x, r = p.x0, p.r0
    for _ in range(cfg.max_iter):
        x = x + beta * r
        rnorm = rec.push(x, beta=beta)
        r = rec.rs[-1]
        if rnorm <= cfg.residual_tol:
            return rec.finish(Termination.RESIDUAL_TOL_MET)
        if not math.isfinite(rnorm) or rnorm > DIVERGENCE_FACTOR * r0norm:
            return rec.finish(Termination.BREAKDOWN)
    return rec.finish(Termination.MAX_ITER)


def beta_star(r0: np.ndarray, Ar0: np.ndarray) -> float:
    """Minimizer of ``||r0 + beta A r0||`` over scalar ``beta``.

    Returns ``-(r0 . Ar0) / ||Ar0||^2``; zero for ``r0 = 0``.
    """
    r0 = np.asarray(r0, dtype=float)
    Ar0 = np.asarray(Ar0, dtype=float)
    if not np.any(r0):
        return 0.0
    denom = float(Ar0 @ Ar0)
    if denom == 0.0:
        raise ValueError("A r0 vanishes for nonzero r0; the matrix is singular")
    return -float(r0 @ Ar0) / denom


def gmres_run(p: LinearProblem, cfg: SolveConfig = SolveConfig()) -> SolverTrace:
    """Full (unrestarted) GMRES, recording ``x_n`` after every Arnoldi step.

    The Hessenberg least squares problem is kept in triangular form with
    Givens rotations. A dependent Arnoldi vector (happy breakdown) means the
    current Krylov space contains the solution; the run then ends with
    ``residual_tol_met``.
    """
    rec = _Recorder("gmres", p, cfg)
    A, N = p.A, p.n
    beta = rec.norms[0]
    if beta <= cfg.residual_tol:
        return rec.finish(Termination.RESIDUAL_TOL_MET)
    m = min(cfg.max_iter, N)
    Q = np.zeros((N, m + 1))
    Q[:, 0] = p.r0 / beta
    R = np.zeros((m + 1, m))
    g = np.zeros(m + 1)
    g[0] = -beta
    cs = np.zeros(m)
    sn = np.zeros(m)
    for j in range(m):
        ext = orthonormal_extend(Q[:, : j + 1], A @ Q[:, j], cfg.dep_tol)
        col = np.zeros(j + 2)
        col[: j + 1] = ext.h
        col[j + 1] = 0.0 if ext.dependent else ext.remainder_norm
        if not ext.dependent:
            Q[:, j + 1] = ext.q
        for i in range(j):
            a, c = col[i], col[i + 1]
            col[i] = cs[i] * a + sn[i] * c
            col[i + 1] = -sn[i] * a + cs[i] * c
        denom = math.hypot(col[j], col[j + 1])
        if denom == 0.0:
            return rec.finish(Termination.BREAKDOWN, krylov_basis=Q[:, : j + 1].copy())
        cs[j], sn[j] = col[j] / denom, col[j + 1] / denom
        col[j], col[j + 1] = denom, 0.0
        R[: j + 2, j] = col
        g[j + 1] = -sn[j] * g[j]
        g[j] = cs[j] * g[j]
        y = scipy.linalg.solve_triangular(R[: j + 1, : j + 1], g[: j + 1])
        x = p.x0 + Q[:, : j + 1] @ y
        rnorm = rec.push(x)
        if ext.dependent or rnorm <= cfg.residual_tol:
            return rec.finish(Termination.RESIDUAL_TOL_MET, krylov_basis=Q[:, : j + 1].copy(),
                              happy_breakdown=bool(ext.dependent))
    return rec.finish(Termination.MAX_ITER, krylov_basis=Q[:, :m].copy())


def anderson_coefficients(residual_columns: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Weights ``alpha`` with ``sum(alpha) = 1`` minimizing ``||F @ alpha||``.

    The constraint is eliminated by substitution: ``alpha_0 = 1 - sum_{i>0}
    alpha_i`` leaves the unconstrained problem
    ``min ||f_0 + sum_i alpha_i (f_i - f_0)||``, solved in the minimum-norm
    sense so that dependent columns get zero weight cleanly.
    """
    F = np.asarray(residual_columns, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    if F.ndim != 2 or F.shape[1] < 1:
        raise DimensionError("need at least one residual column")
    alpha = np.empty(F.shape[1])
    if F.shape[1] == 1:
        alpha[0] = 1.0
        return alpha
    tail, _ = least_squares(F[:, 1:] - F[:, :1], -F[:, 0], rank_tol)
    alpha[1:] = tail
    alpha[0] = 1.0 - math.fsum(tail)
    return alpha


def anderson_run(p: LinearProblem, schedule: MixingSchedule, window: int | float | None = None,
                 cfg: SolveConfig = SolveConfig()) -> SolverTrace:
    """Anderson mixing with window ``m`` (``None`` or ``inf`` for full history).

    Step ``k`` takes the last ``m_k = min(m, k) + 1`` iterates, computes the
    weights from their residuals, forms ``xbar_{k+1} = sum alpha_i x_i`` and
    ``x_{k+1} = sum alpha_i (x_i + beta_k f_i)``. Stagnation is declared when
    either the iterates or the predicted iterates repeat (at
    ``dep_tol * (1 + ||x||)``) on two consecutive steps.
    """
    if schedule.kind == "optimized":
        raise ValueError("use optimized_anderson_run for the optimized schedule")
    m = math.inf if window is None else window
    if m < 1:
        raise ValueError("window must be >= 1")
    rec = _Recorder("anderson", p, cfg, predicted=True)
    if rec.norms[0] <= cfg.residual_tol:
        return rec.finish(Termination.RESIDUAL_TOL_MET, window=m)
    xs, fs = rec.xs, rec.rs
    x_streak = xbar_streak = 0
    for k in range(cfg.max_iter):
        beta = schedule.beta(k)
        start = k - int(min(m, k))
        X = np.array(xs[start:]).T
        F = np.array(fs[start:]).T
        alpha = anderson_coefficients(F, cfg.rank_tol)
        # differences against the oldest entry keep the combination well scaled
        xbar = X[:, 0] + (X[:, 1:] - X[:, :1]) @ alpha[1:]
        fbar = F[:, 0] + (F[:, 1:] - F[:, :1]) @ alpha[1:]
        x_new = xbar + beta * fbar
        prev_x = xs[-1]
        prev_xbar = rec.xbars[-1] if rec.xbars else None
        rnorm = rec.push(x_new, beta=beta, xbar=xbar, alpha=alpha)
        if rnorm <= cfg.residual_tol:
            return rec.finish(Termination.RESIDUAL_TOL_MET, window=m)
        x_streak = x_streak + 1 if _close(x_new, prev_x, cfg.dep_tol) else 0
        if prev_xbar is not None:
            xbar_streak = xbar_streak + 1 if _close(xbar, prev_xbar, cfg.dep_tol) else 0
        if x_streak >= 2 or xbar_streak >= 2:
            return rec.finish(Termination.STAGNATION_DETECTED, window=m)
    return rec.finish(Termination.MAX_ITER, window=m)


def optimized_anderson_run(p: LinearProblem, cfg: SolveConfig = SolveConfig()) -> SolverTrace:
    """Full-history Anderson mixing with the residual-minimizing ``beta_n``.

    After the weights give ``xbar_{n+1}`` with residual ``rbar``, the mixing
    parameter is ``-(rbar . A rbar) / ||A rbar||^2`` (zero once ``rbar``
    meets the residual tolerance). When ``|beta_n| <= dep_tol`` the iterates
    can no longer move and the run stops.
    """
    rec = _Recorder("opt-anderson", p, cfg, predicted=True)
    if rec.norms[0] <= cfg.residual_tol:
        return rec.finish(Termination.RESIDUAL_TOL_MET, window=math.inf)
    xs, fs = rec.xs, rec.rs
    for n in range(cfg.max_iter):
        if n == 0:
            alpha = np.ones(1)
            xbar = p.x0
        else:
            X = np.array(xs).T
            F = np.array(fs).T
            alpha = anderson_coefficients(F, cfg.rank_tol)
            xbar = X[:, 0] + (X[:, 1:] - X[:, :1]) @ alpha[1:]
        rbar = p.residual(xbar)
        if np.linalg.norm(rbar) <= cfg.residual_tol:
            beta = 0.0
        else:
            beta = beta_star(rbar, p.A @ rbar)
        x_new = xbar + beta * rbar
        rnorm = rec.push(x_new, beta=beta, xbar=xbar, alpha=alpha)
        if rnorm <= cfg.residual_tol:
            return rec.finish(Termination.RESIDUAL_TOL_MET, window=math.inf)
        if abs(beta) <= cfg.dep_tol:
            return rec.finish(Termination.STAGNATION_DETECTED, window=math.inf)
    return rec.finish(Termination.MAX_ITER, window=math.inf)
