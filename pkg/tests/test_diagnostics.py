import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aagmres.diagnostics import (
    Case,
    RelationCheck,
    anderson_index,
    classify,
    gmres_stagnation_index,
    grade,
    residual_chain,
    run_verification,
    verify_equivalence,
    verify_optimized,
    verify_projection_identities,
    verify_prop_structure,
)
from aagmres.generators import cycle, diag, random_dense, shifted_spd, stagnating
from aagmres.solvers import (
    MixingSchedule,
    SolveConfig,
    anderson_run,
    gmres_run,
    make_problem,
    optimized_anderson_run,
)


def by_name(checks):
    return {c.relation: c for c in checks}


# -- indices -----------------------------------------------------------------

def test_grade_examples():
    assert grade(cycle(7, 3).A, np.eye(7)[2]) == 7
    assert grade(-np.eye(4), np.array([1.0, 2.0, 0.0, -1.0])) == 1
    assert grade(np.diag([1.0, 2.0, 3.0]), np.array([1.0, 1.0, 0.0])) == 2
    with pytest.raises(ValueError, match="grade undefined"):
        grade(np.eye(2), np.zeros(2))


def test_grade_matches_krylov_rank():
    rng = np.random.default_rng(6)
    A = np.diag([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    r0 = np.zeros(6)
    r0[[0, 2, 5]] = rng.standard_normal(3)
    K = np.column_stack([np.linalg.matrix_power(A, j) @ r0 for j in range(6)])
    assert grade(A, r0) == np.linalg.matrix_rank(K) == 3


def test_anderson_index_examples():
    p = cycle(8, 1)
    assert anderson_index(anderson_run(p, MixingSchedule.constant(1.0))) == (1, True)
    assert anderson_index(optimized_anderson_run(p)).value == 1


def test_anderson_index_equals_grade_on_strict_decrease():
    p = random_dense(5, 10.0, seed=1)
    g = gmres_run(p)
    assert np.all(np.diff(g.residual_norms) < 0)
    a = anderson_run(p, MixingSchedule.constant(1.0))
    assert anderson_index(a) == (grade(p.A, p.r0), True)


def test_anderson_index_unobserved_on_truncated_trace():
    p = random_dense(8, 10.0, seed=1)
    a = anderson_run(p, MixingSchedule.constant(1.0), cfg=SolveConfig(max_iter=3))
    assert anderson_index(a) == (3, False)


def test_anderson_index_errors():
    p = random_dense(4, 10.0, seed=1)
    with pytest.raises(ValueError):
        anderson_index(gmres_run(p))
    with pytest.raises(ValueError):
        gmres_stagnation_index(anderson_run(p, MixingSchedule.constant(1.0)))


def test_stagnation_index_examples():
    assert gmres_stagnation_index(gmres_run(cycle(6, 1))) == 0
    p = random_dense(6, 10.0, seed=2)
    assert gmres_stagnation_index(gmres_run(p)) == 6


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1), st.floats(0.2, 1.5), st.floats(-1.5, -0.2))
def test_kappa_bounded_by_grade_and_schedule_invariant(N, seed, b1, b2):
    p = random_dense(N, 10.0, seed)
    nu = grade(p.A, p.r0)
    k1 = anderson_index(anderson_run(p, MixingSchedule.constant(b1))).value
    k2 = anderson_index(anderson_run(p, MixingSchedule.constant(b2))).value
    assert k1 <= nu and k1 == k2


def test_residual_chain_predicates():
    assert residual_chain(np.array([1.0, 0.5, 0.1, 0.0]), 1e-8) == (True, None)
    assert residual_chain(np.array([1.0, 0.5, 0.5, 0.1, 0.0]), 1e-8) == (False, 2)
    assert residual_chain(np.array([1.0, 1.0, 1.0, 0.0]), 1e-8) == (False, 1)


# -- classification ------------------------------------------------------------

def test_classify_cycle():
    r = classify(cycle(9, 1))
    assert (r.grade, r.anderson_index, r.stagnation_index, r.case) == (9, 1, 0, Case.STAGNATES)
    assert r.beta_star == 0.0 and r.passed
    assert r.summary_line() == "nu=9 kappa_A=1 eta_G=0 case=ii"


def test_classify_negative_identity():
    r = classify(make_problem(-np.eye(3), [1.0, 2.0, 3.0]))
    assert (r.grade, r.anderson_index, r.case) == (1, 1, Case.CONVERGES)
    assert r.passed


def test_classify_random_dense_generic_case():
    r = classify(random_dense(8, 10.0, seed=3))
    assert r.case is Case.CONVERGES and r.anderson_index == r.grade == 8
    assert by_name(r.checks)["residual_chain_case"].passed


def test_classify_zero_residual():
    r = classify(make_problem(-np.eye(2), [1.0, 1.0], [1.0, 1.0]))
    assert r.grade is None and r.case is Case.CONVERGES
    assert r.summary_line() == "nu=undefined kappa_A=undefined eta_G=undefined case=i"


def test_classify_constructed_stagnation():
    r = classify(stagnating(8, 3, seed=1))
    assert (r.anderson_index, r.stagnation_index, r.case) == (4, 3, Case.STAGNATES)
    assert r.passed


# -- relation checks -------------------------------------------------------------

def test_relation_check_semantics():
    assert RelationCheck("x", 1e-9, 1e-8).passed
    assert not RelationCheck("x", 2e-8, 1e-8).passed
    assert RelationCheck("x", 2e-8, 1e-8, "gt").passed
    assert not RelationCheck("x", float("nan"), 1e-8).passed
    assert "FAIL" in RelationCheck("x", 1.0, 0.5).row()


def test_equivalence_case_one():
    p = random_dense(7, 10.0, seed=4)
    checks = by_name(verify_equivalence(anderson_run(p, MixingSchedule.constant(1.0)), gmres_run(p)))
    for name in ("anderson_step_from_gmres", "predicted_equals_gmres", "converged_tail", "predicted_converged_tail"):
        assert checks[name].value <= 1e-8


def test_equivalence_cycle_tail_is_exact():
    p = cycle(6, 2)
    a = anderson_run(p, MixingSchedule.constant(0.5))
    checks = by_name(verify_equivalence(a, gmres_run(p)))
    assert checks["stagnated_tail"].value == 0.0
    assert checks["predicted_stagnated_tail"].value == 0.0


def test_equivalence_rejects_mismatched_problems():
    a = anderson_run(random_dense(5, 10.0, seed=1), MixingSchedule.constant(1.0))
    with pytest.raises(ValueError, match="different problems"):
        verify_equivalence(a, gmres_run(random_dense(5, 10.0, seed=2)))


def test_structure_case_one_has_no_stagnation_checks():
    p = random_dense(6, 10.0, seed=5)
    checks = verify_prop_structure(anderson_run(p, MixingSchedule.constant(1.0)), gmres_run(p), 6, 6)
    assert [c.relation for c in checks] == ["alpha_last_nonzero", "gmres_strict_decrease"]
    assert all(c.passed for c in checks)


def test_structure_cycle_at_stagnation():
    p = cycle(6, 1)
    checks = by_name(verify_prop_structure(anderson_run(p, MixingSchedule.constant(1.0)), gmres_run(p), 6, 1))
    assert checks["alpha_last_zero"].value == 0.0
    assert checks["stagnation_orthogonality"].value <= 1e-10
    assert checks["five_way_coincidence"].passed and checks["residual_plateau"].passed


def test_optimized_cycle_frozen():
    p = cycle(6, 1)
    checks = verify_optimized(optimized_anderson_run(p), gmres_run(p), 1, 0)
    assert all(c.passed for c in checks)
    assert by_name(checks)["opt_step_from_gmres"].value == 0.0


def test_optimized_negative_identity():
    p = make_problem(-np.eye(3), [1.0, 2.0, 2.0])
    checks = by_name(verify_optimized(optimized_anderson_run(p), gmres_run(p), 1, 1))
    assert checks["opt_residual_identity"].value <= 1e-15
    assert all(c.passed for c in checks.values())


def test_optimized_sandwich_small_problem():
    p = shifted_spd(6, -3.0, -1.0, seed=2)
    g = gmres_run(p)
    checks = by_name(verify_optimized(optimized_anderson_run(p), g, 6, gmres_stagnation_index(g)))
    assert checks["opt_sandwich_upper"].value > 1e-8
    assert checks["opt_sandwich_lower"].passed


def test_projection_examples():
    p = cycle(6, 3)
    g = gmres_run(p)
    checks = by_name(verify_projection_identities(p, g))
    assert checks["gmres_projection"].value == 0.0
    for n in range(6):
        np.testing.assert_array_equal(g.residuals[n], p.r0)


def test_projection_random_problem():
    p = random_dense(7, 10.0, seed=8)
    a = anderson_run(p, MixingSchedule.constant(1.0))
    checks = verify_projection_identities(p, gmres_run(p), anderson=a)
    assert all(c.value <= 1e-9 for c in checks)


def test_run_verification_suites():
    p = cycle(5, 1)
    names = {s: {c.relation for c in run_verification(p, s).checks} for s in ("equivalence", "optimized")}
    assert "predicted_equals_gmres" in names["equivalence"]
    assert "opt_beta_boundary" in names["optimized"] and "predicted_equals_gmres" not in names["optimized"]
    with pytest.raises(ValueError):
        run_verification(p, "nope")


def test_report_text_lists_every_check():
    r = run_verification(diag([-1.0, -2.0]))
    text = r.to_text()
    assert text.splitlines()[0] == "nu=2 kappa_A=2 eta_G=2 case=i"
    assert all(c.relation in text for c in r.checks)
