import json

import numpy as np
import pytest

from aagmres.fileio import (
    CSV_HEADER,
    MatrixMarketError,
    ProblemSpec,
    export_trace,
    format_trace,
    load_trace_export,
    parse_matrix_market,
    parse_problem_spec,
    read_matrix_market,
    read_vector,
    write_matrix_market,
    write_vector,
)
from aagmres.generators import cycle, random_dense
from aagmres.solvers import MixingSchedule, SolveConfig, anderson_run, gmres_run, make_problem


def test_array_identity():
    text = "%%MatrixMarket matrix array real general\n% comment\n2 2\n1\n0\n0\n1\n"
    np.testing.assert_array_equal(parse_matrix_market(text), np.eye(2))


def test_array_is_column_major():
    text = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"
    np.testing.assert_array_equal(parse_matrix_market(text), [[1, 3], [2, 4]])


def test_coordinate_duplicates_are_summed():
    text = "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 0.5\n1 1 0.5\n2 2 3\n"
    A = parse_matrix_market(text)
    assert A[0, 0] == 1.0 and A[1, 1] == 3.0 and A[0, 1] == 0.0


def test_symmetric_storage_is_expanded():
    coord = "%%MatrixMarket matrix coordinate real symmetric\n3 3 2\n2 1 4\n3 3 1\n"
    A = parse_matrix_market(coord)
    assert A[0, 1] == A[1, 0] == 4.0 and A[2, 2] == 1.0
    arr = "%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n"
    np.testing.assert_array_equal(parse_matrix_market(arr), [[1, 2], [2, 3]])


@pytest.mark.parametrize("text, line", [
    ("%%MatrixMarket matrix array complex general\n1 1\n1\n", 1),
    ("%%MatrixMarket vector array real general\n1 1\n1\n", 1),
    ("%%MatrixMarket matrix array real general\n2 2\n1\n2\nx\n4\n", 5),
    ("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n", 5),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", 3),
    ("%%MatrixMarket matrix array real general\n10001 1\n", 2),
    ("%%MatrixMarket matrix coordinate real general\n2 2\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(MatrixMarketError) as info:
        parse_matrix_market(text)
    assert info.value.line == line
    assert f"{line}:" in str(info.value)


def test_round_trip_is_exact(tmp_path):
    A = np.random.default_rng(0).standard_normal((5, 5))
    write_matrix_market(tmp_path / "A.mtx", A)
    np.testing.assert_array_equal(read_matrix_market(tmp_path / "A.mtx"), A)
    S = A + A.T
    write_matrix_market(tmp_path / "S.mtx", S, symmetric=True)
    np.testing.assert_array_equal(read_matrix_market(tmp_path / "S.mtx"), S)
    write_vector(tmp_path / "v.mtx", A[0])
    np.testing.assert_array_equal(read_vector(tmp_path / "v.mtx"), A[0])


def test_problem_spec_generators():
    p = parse_problem_spec("cycle:N=6,k=2").build()
    np.testing.assert_array_equal(p.r0, np.eye(6)[1])
    p = parse_problem_spec("diag:values=-1;-2;-4", rhs="1,1,1").build()
    np.testing.assert_allclose(p.x_star, [1.0, 0.5, 0.25])
    p = parse_problem_spec("random_dense:N=4,cond=10", seed=3).build()
    np.testing.assert_array_equal(p.A, random_dense(4, 10.0, seed=3).A)


def test_problem_spec_x0_forms():
    spec = parse_problem_spec("diag:values=-1;-2", x0="random(5)")
    a, b = spec.build(), spec.build()
    np.testing.assert_array_equal(a.x0, b.x0)
    assert np.any(a.x0)
    assert not np.any(parse_problem_spec("random_dense:N=3", x0="zero").build().x0)
    np.testing.assert_array_equal(parse_problem_spec("diag:values=-1;-2", x0="3,4").build().x0, [3, 4])


def test_problem_spec_files(tmp_path):
    write_matrix_market(tmp_path / "A.mtx", -np.eye(3))
    write_vector(tmp_path / "b.mtx", [1.0, 2.0, 3.0])
    spec = parse_problem_spec(str(tmp_path / "A.mtx"), rhs=str(tmp_path / "b.mtx"))
    assert isinstance(spec, ProblemSpec)
    np.testing.assert_allclose(spec.build().x_star, [1, 2, 3])


@pytest.mark.parametrize("text, kwargs", [
    ("nonesuch:N=3", {}),
    ("cycle:N", {}),
    ("diag:values=-1;-2", {"rhs": "1,2,3"}),
    ("cycle:N=3", {"seed": -1}),
])
def test_problem_spec_errors(text, kwargs):
    with pytest.raises(ValueError):
        parse_problem_spec(text, **kwargs).build()


def test_csv_export_single_iterate():
    p = make_problem(-np.eye(2), [1.0, 1.0], [1.0, 1.0])
    lines = format_trace(gmres_run(p), "csv").splitlines()
    assert lines == [",".join(CSV_HEADER), "0,0,,,0"]


def test_csv_export_cycle_gmres(tmp_path):
    export_trace(gmres_run(cycle(20, 1)), "csv", tmp_path / "t.csv")
    rows = load_trace_export(tmp_path / "t.csv")["rows"]
    assert len(rows) == 21
    assert [r["residual_norm"] for r in rows] == [1.0] * 20 + [0.0]


def test_json_round_trip(tmp_path):
    p = random_dense(6, 10.0, seed=1)
    t = anderson_run(p, MixingSchedule.constant(0.8))
    export_trace(t, "json", tmp_path / "t.json")
    data = load_trace_export(tmp_path / "t.json")
    assert data["metadata"]["method"] == "anderson" and data["metadata"]["N"] == 6
    assert data["metadata"]["kappa_A"] == 6 and data["metadata"]["nu"] == 6
    np.testing.assert_array_equal([r["residual_norm"] for r in data["rows"]], t.residual_norms)
    assert len(data["rows"]) == len(t)


def test_csv_uses_seventeen_digits(tmp_path):
    t = anderson_run(random_dense(5, 10.0, seed=2), MixingSchedule.constant(0.3), cfg=SolveConfig(max_iter=3))
    export_trace(t, "csv", tmp_path / "t.csv")
    rows = load_trace_export(tmp_path / "t.csv")["rows"]
    np.testing.assert_array_equal([r["residual_norm"] for r in rows], t.residual_norms)
    assert rows[1]["beta"] == 0.3 and rows[-1]["stagnated"] is False


def test_export_errors(tmp_path):
    t = gmres_run(cycle(3, 1))
    with pytest.raises(ValueError):
        format_trace(t, "xml")
    with pytest.raises(OSError):
        export_trace(t, "csv", tmp_path / "missing" / "t.csv")


def test_json_is_plain_json():
    text = format_trace(gmres_run(cycle(4, 1)), "json")
    data = json.loads(text)
    assert data["metadata"]["eta_G"] == 0 and data["rows"][0]["beta"] is None
