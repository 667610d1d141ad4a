"""Index computations and relation checks tying Anderson mixing to GMRES.

Three integers describe a linear problem and a starting point:

* the grade ``nu``: the first ``n`` at which ``r0, A r0, ..., A^n r0`` are
  linearly dependent (GMRES terminates exactly there);
* the Anderson index ``kappa``: the first ``n`` at which the differences
  ``x_1 - x0, ..., x_{n+1} - x0`` of an Anderson run are dependent;
* the GMRES stagnation index ``eta``: the first ``n`` with ``x_n = x_{n+1}``.

Either ``kappa == nu`` and Anderson reaches the exact solution, or
``kappa < nu``, GMRES stagnates once at ``eta = kappa - 1`` and Anderson locks
onto a wrong point. The ``verify_*`` functions evaluate each of the
associated identities on concrete traces and return :class:`RelationCheck`
records instead of raising, so that a report can list every outcome.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .linalg import DEFAULT_DEP_TOL, arnoldi, orthonormal_extend, project_onto_columnspace
from .solvers import (
    LinearProblem,
    MixingSchedule,
    SolveConfig,
    SolverTrace,
    Termination,
    anderson_run,
    beta_star,
    gmres_run,
    optimized_anderson_run,
)

DEFAULT_VERIFY_TOL = 1e-8
WRONG_SOLUTION_GAP = 1e-6
SUITES = ("all", "equivalence", "structure", "optimized", "projections")


class Case(str, enum.Enum):
    CONVERGES = "i"
    STAGNATES = "ii"


@dataclass(frozen=True)
class RelationCheck:
    """Outcome of one relation evaluated over a range of steps.

    For ``kind == "eq"`` the check passes when ``value <= threshold``
    (``value`` is the largest deviation). For ``kind == "gt"`` it passes when
    ``value > threshold`` (``value`` is the smallest margin).
    """

    relation: str
    value: float
    threshold: float
    kind: str = "eq"
    detail: str = ""

    @property
    def passed(self) -> bool:
        if math.isnan(self.value):
            return False
        if self.kind == "gt":
            return self.value > self.threshold
        return self.value <= self.threshold

    def row(self) -> str:
        op = "<=" if self.kind == "eq" else ">"
        status = "PASS" if self.passed else "FAIL"
        return f"{self.relation:<34} {self.value:>12.3e} {op} {self.threshold:<9.1e} {status}  {self.detail}".rstrip()


def _eq(relation, deviations, threshold, detail="") -> RelationCheck:
    deviations = list(deviations)
    if not deviations:
        return RelationCheck(relation, 0.0, threshold, "eq", detail or "vacuous")
    return RelationCheck(relation, float(max(deviations)), threshold, "eq", detail)


def _gt(relation, margins, threshold, detail="") -> RelationCheck:
    margins = list(margins)
    if not margins:
        return RelationCheck(relation, math.inf, threshold, "gt", detail or "vacuous")
    return RelationCheck(relation, float(min(margins)), threshold, "gt", detail)


def _flag(relation, ok: bool, detail="") -> RelationCheck:
    return RelationCheck(relation, 0.0 if ok else 1.0, 0.5, "eq", detail)


def _rel(a: np.ndarray, ref: np.ndarray) -> float:
    return float(np.linalg.norm(a - ref)) / (1.0 + float(np.linalg.norm(ref)))


@dataclass
class DiagnosticsReport:
    """Indices, case and relation outcomes for one problem."""

    grade: int | None
    anderson_index: int | None
    stagnation_index: int | None
    case: Case | None
    beta_star: float
    checks: list[RelationCheck] = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    anderson_index_observed: bool = True
    traces: dict = field(default_factory=dict, repr=False)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary_line(self) -> str:
        def fmt(v):
            return "undefined" if v is None else str(v)

        case = "undefined" if self.case is None else self.case.value
        return (f"nu={fmt(self.grade)} kappa_A={fmt(self.anderson_index)} "
                f"eta_G={fmt(self.stagnation_index)} case={case}")

    def to_text(self) -> str:
        lines = [self.summary_line(), f"beta_star={self.beta_star:.17g}"]
        lines.append("tolerances: " + ", ".join(f"{k}={v:g}" for k, v in self.tolerances.items()))
        if self.checks:
            lines.append(f"{'relation':<34} {'value':>12}    {'threshold':<9} status")
            lines.extend(c.row() for c in self.checks)
        return "\n".join(lines)


# -- indices -----------------------------------------------------------------

def grade(A: np.ndarray, r0: np.ndarray, dep_tol: float = DEFAULT_DEP_TOL) -> int:
    """Grade of ``r0`` with respect to ``A``, found with Arnoldi."""
    r0 = np.asarray(r0, dtype=float)
    if not np.any(r0):
        raise ValueError("grade undefined for zero residual")
    return arnoldi(A, r0, dep_tol=dep_tol).dim


class AndersonIndex(NamedTuple):
    value: int
    observed: bool


def anderson_index(trace: SolverTrace, dep_tol: float = DEFAULT_DEP_TOL) -> AndersonIndex:
    """First ``n`` at which ``x_{n+1} - x0`` depends on the earlier differences.

    A zero first difference counts as ``n = 1``. When the trace ends before
    any dependence shows, the trace length is returned with
    ``observed=False``; the exception is a run that ended on the residual
    tolerance, whose next iterate would repeat the last one, so the index is
    the number of differences.
    """
    if trace.method not in ("anderson", "opt-anderson"):
        raise ValueError(f"anderson_index needs an Anderson trace, got {trace.method}")
    if len(trace) < 2:
        raise ValueError("trace needs at least two iterates")
    x0 = trace.problem.x0
    basis: list[np.ndarray] = []
    for i in range(1, len(trace)):
        ext = orthonormal_extend(basis, trace.iterates[i] - x0, dep_tol)
        if ext.dependent:
            return AndersonIndex(max(1, i - 1), True)
        basis.append(ext.q)
    converged = trace.termination == Termination.RESIDUAL_TOL_MET
    return AndersonIndex(len(trace) - 1, converged)


def gmres_stagnation_index(trace: SolverTrace, dep_tol: float = DEFAULT_DEP_TOL) -> int | None:
    """First ``n`` with ``x_n == x_{n+1}`` (at ``dep_tol * (1 + ||x_n||)``).

    A run that ended on the residual tolerance repeats its last iterate
    forever, so its last index counts as a repeat.
    """
    if trace.method != "gmres":
        raise ValueError(f"expected a gmres trace, got {trace.method}")
    xs = trace.iterates
    for n in range(len(xs) - 1):
        if np.linalg.norm(xs[n + 1] - xs[n]) <= dep_tol * (1.0 + np.linalg.norm(xs[n])):
            return n
    if trace.termination == Termination.RESIDUAL_TOL_MET:
        return len(xs) - 1
    return None


def _gmres_at(gmres: SolverTrace, n: int):
    """``(x_n, r_n)`` of a GMRES trace, extended past convergence."""
    last = len(gmres) - 1
    if n > last and gmres.termination != Termination.RESIDUAL_TOL_MET:
        raise IndexError(f"gmres trace stops at n={last}, needed {n}")
    n = min(n, last)
    return gmres.iterates[n], gmres.residuals[n]


def _gmres_norm(gmres: SolverTrace, n: int) -> float:
    return float(np.linalg.norm(_gmres_at(gmres, n)[1]))


def _check_same(a: SolverTrace, b: SolverTrace):
    if not a.problem.same_as(b.problem):
        raise ValueError("traces belong to different problems")


def residual_chain(norms: np.ndarray, tol: float, residual_tol: float = 0.0):
    """Evaluate the two residual-chain predicates on GMRES residual norms.

    Returns ``(strict_to_zero, plateau_index)``. ``strict_to_zero`` is True
    when the norms fall strictly (margin ``tol * ||r0||``) at every step and
    end at zero. ``plateau_index`` is the first ``k`` with
    ``||r_{k-1}|| == ||r_k|| > 0`` after a strictly falling prefix, else None.
    """
    norms = np.asarray(norms, dtype=float)
    scale = norms[0]
    zero = max(residual_tol, tol * scale)
    for n in range(1, len(norms)):
        drop = norms[n - 1] - norms[n]
        if drop > tol * scale:
            continue
        plateau = abs(drop) <= tol * scale and norms[n] > zero
        return False, (n if plateau else None)
    return bool(norms[-1] <= zero), None


# -- relation checks ---------------------------------------------------------

def verify_equivalence(anderson: SolverTrace, gmres: SolverTrace, tol: float = DEFAULT_VERIFY_TOL,
                       dep_tol: float | None = None) -> list[RelationCheck]:
    """Anderson iterates expressed through GMRES iterates, for the detected case.

    Up to the Anderson index, ``x_{n+1} = x^G_n + beta_n (A x^G_n + b)`` and
    ``xbar_{n+1} = x^G_n``. Past it, the iterates either sit at the solution
    (``kappa == nu``) or keep mixing from the frozen ``x^G_{kappa-1}``.
    """
    _check_same(anderson, gmres)
    dep_tol = anderson.config.dep_tol if dep_tol is None else dep_tol
    p = anderson.problem
    if len(anderson) < 2 or not np.any(p.r0):
        return [_eq("anderson_step_from_gmres", [], tol), _eq("predicted_equals_gmres", [], tol)]
    nu = grade(p.A, p.r0, dep_tol)
    kappa = anderson_index(anderson, dep_tol).value
    steps = anderson.steps
    step_dev, pred_dev = [], []
    for n in range(min(kappa + 1, steps)):
        xg, rg = _gmres_at(gmres, n)
        step_dev.append(_rel(anderson.iterates[n + 1], xg + anderson.betas[n] * rg))
        pred_dev.append(_rel(anderson.xbar(n + 1), xg))
    checks = [
        _eq("anderson_step_from_gmres", step_dev, tol, f"n<={kappa}"),
        _eq("predicted_equals_gmres", pred_dev, tol, f"n<={kappa}"),
    ]
    if kappa >= nu:
        tail = range(nu, steps)
        checks.append(_eq("converged_tail", (_rel(anderson.iterates[n + 1], p.x_star) for n in tail),
                          tol, f"n>={nu}"))
        checks.append(_eq("predicted_converged_tail", (_rel(anderson.xbar(n + 1), p.x_star) for n in tail),
                          tol, f"n>={nu}"))
    else:
        xg, rg = _gmres_at(gmres, kappa - 1)
        tail = range(kappa, steps)
        checks.append(_eq("stagnated_tail",
                          (_rel(anderson.iterates[n + 1], xg + anderson.betas[n] * rg) for n in tail),
                          tol, f"n>={kappa}"))
        checks.append(_eq("predicted_stagnated_tail", (_rel(anderson.xbar(n + 1), xg) for n in tail),
                          tol, f"n>={kappa}"))
    return checks


def verify_prop_structure(anderson: SolverTrace, gmres: SolverTrace, nu: int, kappa: int,
                          tol: float = DEFAULT_VERIFY_TOL) -> list[RelationCheck]:
    """Mixing weights and GMRES residuals before and at the Anderson index.

    Before ``kappa`` the newest weight is nonzero and GMRES strictly
    reduces the residual. At ``kappa < nu`` the newest weight vanishes, the
    predicted residual is orthogonal to ``A (x_{kappa+1} - x0)``, five
    iterates coincide and the GMRES residual norm repeats.
    """
    _check_same(anderson, gmres)
    p = anderson.problem
    r0n = float(np.linalg.norm(p.r0))
    last_alpha = [abs(a[-1]) for a in anderson.alphas]
    early = range(1, min(kappa, len(last_alpha)))
    checks = [
        _gt("alpha_last_nonzero", (last_alpha[n] for n in early), tol, f"1<=n<{kappa}"),
        _gt("gmres_strict_decrease",
            ((_gmres_norm(gmres, n - 1) - _gmres_norm(gmres, n)) / r0n for n in range(1, kappa)),
            tol, f"1<=n<{kappa}, relative to ||r0||"),
    ]
    if kappa >= nu:
        return checks
    k = kappa
    if anderson.steps < k + 2:
        checks.append(RelationCheck("stagnation_structure", math.nan, tol, "eq",
                                    f"trace too short: needs {k + 2} steps, has {anderson.steps}"))
        return checks
    checks.append(_eq("alpha_last_zero", [last_alpha[k]], tol, f"n={k}"))
    rbar = p.residual(anderson.xbar(k))
    w = p.A @ (anderson.iterates[k + 1] - p.x0)
    scale = float(np.linalg.norm(rbar) * np.linalg.norm(w)) or 1.0
    checks.append(_eq("stagnation_orthogonality", [abs(float(rbar @ w)) / scale], tol, f"n={k}"))
    xg_prev, _ = _gmres_at(gmres, k - 1)
    xg_k, _ = _gmres_at(gmres, k)
    group = [xg_prev, anderson.xbar(k), anderson.xbar(k + 1), xg_k, anderson.xbar(k + 2)]
    checks.append(_eq("five_way_coincidence", (_rel(v, xg_k) for v in group), tol, f"n={k}"))
    checks.append(_eq("residual_plateau",
                      [abs(_gmres_norm(gmres, k - 1) - _gmres_norm(gmres, k)) / r0n], tol, f"n={k}"))
    return checks


def verify_optimized(opt: SolverTrace, gmres: SolverTrace, kappa: int, eta: int | None,
                     tol: float = DEFAULT_VERIFY_TOL) -> list[RelationCheck]:
    """Relations between the optimized run, GMRES and the Anderson index.

    The optimized parameter is nonzero exactly before the GMRES stagnation
    index ``eta``. Before ``eta`` the optimized iterate is one mixing step
    from ``x^G_n`` and its residual is squeezed between consecutive GMRES
    residuals; from ``eta`` on it equals ``x^G_eta``. Every step satisfies the
    exact residual reduction identity of the closed-form parameter.
    A parameter counts as nonzero when it exceeds the run's ``dep_tol``,
    the same threshold the solver uses to freeze. If GMRES has converged at
    ``eta`` only the parameters before ``eta`` are checked.
    """
    _check_same(opt, gmres)
    p = opt.problem
    if eta is None:
        eta = len(gmres) - 1
    steps = opt.steps
    r0n = float(np.linalg.norm(p.r0))
    betas = opt.betas
    step_dev, pred_dev, lower, upper, ident, bound, strict, weak = [], [], [], [], [], [], [], []
    for n in range(steps):
        x_next = opt.iterates[n + 1]
        xbar = opt.xbar(n + 1)
        rbar = p.residual(xbar)
        Arbar = p.A @ rbar
        rn_next = float(np.linalg.norm(opt.residuals[n + 1]))
        rn_prev = float(np.linalg.norm(opt.residuals[n]))
        rbar_n = float(np.linalg.norm(rbar))
        if n < eta:
            xg, rg = _gmres_at(gmres, n)
            step_dev.append(_rel(x_next, xg + betas[n] * rg))
            pred_dev.append(_rel(xbar, xg))
            g_now, g_next = _gmres_norm(gmres, n), _gmres_norm(gmres, n + 1)
            lower.append((g_next - rn_next) / r0n)
            upper.append((g_now - rn_next) / g_now)
            strict.append((rbar_n - rn_next) / rbar_n)
        else:
            xg, _ = _gmres_at(gmres, eta)
            step_dev.append(_rel(x_next, xg))
            pred_dev.append(_rel(xbar, xg))
        if n < kappa:
            weak.append((rbar_n - rn_prev) / (rn_prev or 1.0))
        drop = betas[n] ** 2 * float(Arbar @ Arbar)
        ident.append(abs(rn_next ** 2 - (rbar_n ** 2 - drop)) / (rbar_n ** 2 or 1.0))
        bound.append((rn_next ** 2 - (rn_prev ** 2 - drop)) / (rn_prev ** 2 or 1.0))
    nonzero = [abs(b) > opt.config.dep_tol for b in betas]
    # When GMRES has converged at eta the residual left from then on is
    # rounding noise, so the parameter built from it carries no information.
    converged = _gmres_norm(gmres, eta) <= gmres.config.residual_tol
    mismatches = sum(nz != (n < eta) for n, nz in enumerate(nonzero) if n < eta or not converged)
    freeze = max((n for n, nz in enumerate(nonzero) if nz), default=-1)
    freeze_ok = (freeze >= eta - 1) if converged else (freeze == eta - 1)
    return [
        _eq("opt_step_from_gmres", step_dev, tol, f"eta={eta}"),
        _eq("opt_predicted_equals_gmres", pred_dev, tol, f"eta={eta}"),
        _eq("opt_sandwich_lower", lower, tol, "n<eta, gmres below optimized"),
        _gt("opt_sandwich_upper", upper, tol, "n<eta, optimized below previous gmres"),
        _eq("opt_residual_identity", ident, tol, "all n"),
        _eq("opt_residual_bound", bound, tol, "all n"),
        _eq("opt_beta_boundary", [mismatches], 0.0, "beta_n != 0 exactly for n < eta"),
        _flag("opt_freeze_index", freeze_ok and min(freeze, eta - 1) + 1 <= kappa,
              f"last nonzero beta at n={freeze}, eta={eta}, kappa={kappa}"),
        _gt("opt_descent_strict", strict, tol, "n<eta"),
        _eq("opt_descent_weak", weak, tol, f"n<{kappa}"),
    ]


def verify_projection_identities(p: LinearProblem, gmres: SolverTrace, tol: float = DEFAULT_VERIFY_TOL,
                                 anderson: SolverTrace | None = None,
                                 dep_tol: float = DEFAULT_DEP_TOL) -> list[RelationCheck]:
    """Residuals as complements of orthogonal projections.

    ``A x^G_n + b = (I - K_n) r0`` with ``K_n`` the projector onto
    ``A K_n``; for an Anderson trace ``A xbar_{n+1} + b = (I - L_n) r0`` and
    ``A x_{n+1} + b = (I + beta_n A)(I - L_n) r0`` with ``L_n`` the projector
    onto ``A span{x_i - x0 : 1 <= i <= n}``.
    """
    if not gmres.problem.same_as(p):
        raise ValueError("trace belongs to a different problem")
    r0n = float(np.linalg.norm(p.r0)) or 1.0
    checks = []
    kry = arnoldi(p.A, p.r0, dep_tol=dep_tol) if np.any(p.r0) else None
    devs = []
    for n in range(len(gmres)):
        if n == 0 or kry is None:
            proj = np.zeros_like(p.r0)
        else:
            proj = project_onto_columnspace(p.A @ kry.basis[:, : min(n, kry.dim)], p.r0, dep_tol)
        devs.append(float(np.linalg.norm(gmres.residuals[n] - (p.r0 - proj))) / r0n)
    checks.append(_eq("gmres_projection", devs, tol, f"0<=n<={len(gmres) - 1}"))
    if anderson is not None:
        if not anderson.problem.same_as(p):
            raise ValueError("trace belongs to a different problem")
        pred, mixed = [], []
        for n in range(anderson.steps):
            if n == 0:
                proj = np.zeros_like(p.r0)
            else:
                D = (anderson.iterates[1: n + 1] - p.x0).T
                proj = project_onto_columnspace(p.A @ D, p.r0, dep_tol)
            comp = p.r0 - proj
            pred.append(float(np.linalg.norm(p.residual(anderson.xbar(n + 1)) - comp)) / r0n)
            mixed.append(float(np.linalg.norm(anderson.residuals[n + 1]
                                              - (comp + anderson.betas[n] * (p.A @ comp)))) / r0n)
        checks.append(_eq("anderson_projection", pred, tol, "predicted residuals"))
        checks.append(_eq("anderson_mixed_projection", mixed, tol, "iterate residuals"))
    return checks


def verify_convergence(anderson: SolverTrace, kappa: int, nu: int,
                       tol: float = DEFAULT_VERIFY_TOL) -> list[RelationCheck]:
    """The run settles within ``kappa + 1`` steps, at ``x*`` only if ``kappa == nu``.

    Settling is only meaningful for a constant mixing parameter, since the
    frozen tail still moves with ``beta_n`` otherwise.
    """
    p = anderson.problem
    checks = []
    betas = anderson.betas
    if betas is not None and len(betas) and np.all(betas == betas[0]):
        ref = anderson.iterates[min(kappa + 1, anderson.steps)]
        checks.append(_eq("anderson_settles",
                          (_rel(x, ref) for x in anderson.iterates[kappa + 1:]), tol,
                          f"n>={kappa + 1}"))
    gap = _rel(anderson.final, p.x_star)
    if kappa >= nu:
        checks.append(_eq("anderson_final_exact", [gap], tol, "final iterate vs x*"))
    else:
        checks.append(_gt("anderson_final_wrong", [gap], WRONG_SOLUTION_GAP, "final iterate vs x*"))
    return checks


# -- drivers -------------------------------------------------------------------

def classify(p: LinearProblem, cfg: SolveConfig = SolveConfig(), tol: float = DEFAULT_VERIFY_TOL) -> DiagnosticsReport:
    """Compute the three indices and decide which of the two cases holds.

    GMRES supplies the grade check and the stagnation index; an Anderson run
    with ``beta = 1`` supplies the Anderson index. The residual-chain
    predicates of GMRES are evaluated independently and any disagreement
    with the index comparison is recorded as a failed check.
    """
    tols = {"tol": tol, "residual_tol": cfg.residual_tol, "dep_tol": cfg.dep_tol, "rank_tol": cfg.rank_tol}
    if not np.any(p.r0):
        return DiagnosticsReport(None, None, None, Case.CONVERGES, 0.0, [], tols)
    cfg = SolveConfig(max(cfg.max_iter, p.n + 5), cfg.residual_tol, cfg.rank_tol, cfg.dep_tol)
    gm = gmres_run(p, cfg)
    nu = grade(p.A, p.r0, cfg.dep_tol)
    eta = gmres_stagnation_index(gm, cfg.dep_tol)
    aa = anderson_run(p, MixingSchedule.constant(1.0), None, cfg)
    kappa, observed = anderson_index(aa, cfg.dep_tol)
    bstar = beta_star(p.r0, p.A @ p.r0)
    case = Case.CONVERGES if kappa >= nu else Case.STAGNATES
    strict_to_zero, plateau = residual_chain(gm.residual_norms, tol, cfg.residual_tol)
    checks = [
        _flag("anderson_index_observed", observed, "dependence seen within the trace"),
        _flag("kappa_le_nu", kappa <= nu, f"kappa={kappa}, nu={nu}"),
    ]
    if case is Case.CONVERGES:
        checks.append(_flag("residual_chain_case", strict_to_zero and plateau is None and len(gm) - 1 == nu,
                            f"strict decrease to zero at n={len(gm) - 1}"))
        checks.append(_flag("stagnation_index_relation", eta == nu, f"eta={eta}, nu={nu}"))
    else:
        checks.append(_flag("residual_chain_case", plateau == kappa and not strict_to_zero,
                            f"first plateau at n={plateau}"))
        checks.append(_flag("stagnation_index_relation", eta is not None and kappa == eta + 1,
                            f"kappa={kappa}, eta={eta}"))
    # kappa = 1 also happens when nu = 1 and Anderson converges in one step,
    # so the equivalence is with immediate stagnation, kappa = 1 < nu
    zero_beta = abs(bstar) <= cfg.dep_tol
    stalls_at_once = kappa == 1 and kappa < nu
    checks.append(_flag("beta_star_boundary", zero_beta == (eta == 0) == stalls_at_once,
                        f"beta*={bstar:.3g}, eta={eta}, kappa={kappa}"))
    checks.extend(verify_convergence(aa, kappa, nu, tol))
    report = DiagnosticsReport(nu, kappa, eta, case, bstar, checks, tols, observed)
    report.traces.update(gmres=gm, anderson=aa)
    return report


def run_verification(p: LinearProblem, suite: str = "all", cfg: SolveConfig = SolveConfig(),
                     tol: float = DEFAULT_VERIFY_TOL) -> DiagnosticsReport:
    """Classify ``p`` and append the relation checks of the chosen suite."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    report = classify(p, cfg, tol)
    if report.grade is None:
        return report
    gm, aa = report.traces["gmres"], report.traces["anderson"]
    nu, kappa, eta = report.grade, report.anderson_index, report.stagnation_index
    if suite in ("all", "equivalence"):
        report.checks.extend(verify_equivalence(aa, gm, tol, cfg.dep_tol))
    if suite in ("all", "structure"):
        report.checks.extend(verify_prop_structure(aa, gm, nu, kappa, tol))
    if suite in ("all", "optimized"):
        run_cfg = SolveConfig(max(cfg.max_iter, p.n + 5), cfg.residual_tol, cfg.rank_tol, cfg.dep_tol)
        opt = optimized_anderson_run(p, run_cfg)
        report.traces["optimized"] = opt
        report.checks.extend(verify_optimized(opt, gm, kappa, eta, tol))
    if suite in ("all", "projections"):
        report.checks.extend(verify_projection_identities(p, gm, tol, aa, cfg.dep_tol))
    return report
