"""Matrix Market files, problem strings and trace export.

Only the dense real subset of Matrix Market is handled: ``array`` and
``coordinate`` layouts with ``general`` or ``symmetric`` symmetry. Numbers
are written with 17 significant digits so that float64 values survive a
write/read round trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .diagnostics import anderson_index, gmres_stagnation_index, grade
from .generators import GENERATORS, generate_problem, rng_for
from .solvers import LinearProblem, SolverTrace, Termination, make_problem

MAX_DIMENSION = 10000
CSV_HEADER = ("n", "residual_norm", "beta", "alpha_last", "stagnated")


class MatrixMarketError(ValueError):
    """Malformed Matrix Market input; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None, path=None):
        parts = [str(p) for p in (path, line) if p is not None]
        super().__init__(":".join(parts) + ": " + message if parts else message)
        self.line = line


def _num(x: float) -> str:
    return format(float(x), ".17g")


# -- Matrix Market -------------------------------------------------------------

def parse_matrix_market(text: str, path=None) -> np.ndarray:
    """Parse Matrix Market ``text`` into a dense float array."""
    lines = text.splitlines()
    if not lines:
        raise MatrixMarketError("empty file", 1, path)
    head = lines[0].split()
    if len(head) != 5 or head[0] != "%%MatrixMarket" or head[1].lower() != "matrix":
        raise MatrixMarketError("expected '%%MatrixMarket matrix <layout> real <symmetry>'", 1, path)
    layout, fieldname, symmetry = (h.lower() for h in head[2:])
    if layout not in ("array", "coordinate"):
        raise MatrixMarketError(f"unsupported layout {layout!r}", 1, path)
    if fieldname != "real":
        raise MatrixMarketError(f"unsupported field {fieldname!r}; only real is read", 1, path)
    if symmetry not in ("general", "symmetric"):
        raise MatrixMarketError(f"unsupported symmetry {symmetry!r}", 1, path)

    body = [(i + 1, ln.split()) for i, ln in enumerate(lines)
            if i > 0 and ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise MatrixMarketError("missing size line", len(lines), path)
    size_no, size = body[0]
    want = 3 if layout == "coordinate" else 2
    if len(size) != want:
        raise MatrixMarketError(f"size line needs {want} integers", size_no, path)
    try:
        dims = [int(s) for s in size]
    except ValueError:
        raise MatrixMarketError("size line needs integers", size_no, path) from None
    rows, cols = dims[0], dims[1]
    if rows < 1 or cols < 1 or any(d < 0 for d in dims):
        raise MatrixMarketError("dimensions must be positive", size_no, path)
    if rows > MAX_DIMENSION or cols > MAX_DIMENSION:
        raise MatrixMarketError(f"dimension exceeds {MAX_DIMENSION}", size_no, path)
    if symmetry == "symmetric" and rows != cols:
        raise MatrixMarketError("symmetric matrix must be square", size_no, path)

    def value(line_no, tok):
        try:
            v = float(tok)
        except ValueError:
            raise MatrixMarketError(f"bad number {tok!r}", line_no, path) from None
        if not math.isfinite(v):
            raise MatrixMarketError(f"non-finite entry {tok!r}", line_no, path)
        return v

    A = np.zeros((rows, cols))
    entries = body[1:]
    if layout == "array":
        if symmetry == "symmetric":
            slots = [(i, j) for j in range(cols) for i in range(j, rows)]
        else:
            slots = [(i, j) for j in range(cols) for i in range(rows)]
        if len(entries) != len(slots):
            last = entries[-1][0] if entries else size_no
            raise MatrixMarketError(f"expected {len(slots)} entries, found {len(entries)}", last, path)
        for (line_no, toks), (i, j) in zip(entries, slots):
            if len(toks) != 1:
                raise MatrixMarketError("array entries take one value per line", line_no, path)
            A[i, j] = value(line_no, toks[0])
            if symmetry == "symmetric":
                A[j, i] = A[i, j]
        return A

    nnz = dims[2]
    if len(entries) != nnz:
        last = entries[-1][0] if entries else size_no
        raise MatrixMarketError(f"expected {nnz} entries, found {len(entries)}", last, path)
    for line_no, toks in entries:
        if len(toks) != 3:
            raise MatrixMarketError("coordinate entries need 'row col value'", line_no, path)
        try:
            i, j = int(toks[0]) - 1, int(toks[1]) - 1
        except ValueError:
            raise MatrixMarketError("bad index", line_no, path) from None
        if not (0 <= i < rows and 0 <= j < cols):
            raise MatrixMarketError(f"index ({i + 1}, {j + 1}) out of range", line_no, path)
        if symmetry == "symmetric" and i < j:
            raise MatrixMarketError("symmetric storage must be lower triangular", line_no, path)
        v = value(line_no, toks[2])
        A[i, j] += v
        if symmetry == "symmetric" and i != j:
            A[j, i] += v
    return A


def read_matrix_market(path) -> np.ndarray:
    """Read a dense matrix (or a column vector, as an ``(n, 1)`` array)."""
    path = Path(path)
    return parse_matrix_market(path.read_text(), path)


def format_matrix_market(A, symmetric: bool = False) -> str:
    """Array-layout Matrix Market text with 17-digit entries."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    rows, cols = A.shape
    if symmetric:
        if rows != cols or not np.array_equal(A, A.T):
            raise ValueError("matrix is not symmetric")
        vals = [A[i, j] for j in range(cols) for i in range(j, rows)]
    else:
        vals = A.flatten(order="F")
    out = [f"%%MatrixMarket matrix array real {'symmetric' if symmetric else 'general'}",
           f"{rows} {cols}"]
    out.extend(_num(v) for v in vals)
    return "\n".join(out) + "\n"


def write_matrix_market(path, A, symmetric: bool = False) -> None:
    Path(path).write_text(format_matrix_market(A, symmetric))


def read_vector(path) -> np.ndarray:
    M = read_matrix_market(path)
    if M.shape[1] != 1:
        raise MatrixMarketError(f"expected a column vector, got shape {M.shape}", None, path)
    return M[:, 0]


def write_vector(path, v) -> None:
    write_matrix_market(path, np.asarray(v, dtype=float).reshape(-1, 1))


# -- problem strings -------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    """Where a problem comes from: a generator or Matrix Market files.

    ``x0`` is ``None`` (use the source's default), ``"zero"``,
    ``"random(seed)"`` or a literal vector.
    """

    generator: str | None = None
    params: dict = field(default_factory=dict)
    matrix_path: str | None = None
    rhs: str | None = None
    x0: object = None
    seed: int = 0

    def build(self) -> LinearProblem:
        if self.generator is not None:
            p = generate_problem(self.generator, _typed_params(self.generator, self.params), self.seed)
            if self.rhs is not None:
                p = make_problem(p.A, _vector_arg(self.rhs, p.n, "b"), p.x0)
        else:
            A = read_matrix_market(self.matrix_path)
            n = A.shape[0]
            b = np.ones(n) if self.rhs is None else _vector_arg(self.rhs, n, "b")
            p = make_problem(A, b, None)
        if self.x0 is not None:
            p = make_problem(p.A, p.b, _x0_arg(self.x0, p.n))
        return p


def _typed_params(name: str, params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if name == "diag" and k == "values":
            out[k] = [float(s) for s in str(v).split(";") if s.strip()]
        else:
            out[k] = v
    return out


def _vector_arg(arg, n: int, name: str) -> np.ndarray:
    if isinstance(arg, str) and os.path.exists(arg):
        v = read_vector(arg)
    else:
        try:
            v = np.array([float(s) for s in str(arg).replace(";", ",").split(",") if s.strip()])
        except ValueError:
            raise ValueError(f"{name}: neither a file nor a numeric list: {arg!r}") from None
    if v.shape != (n,):
        raise ValueError(f"{name} has length {v.size}, expected {n}")
    return v


def _x0_arg(arg, n: int) -> np.ndarray:
    if isinstance(arg, str):
        s = arg.strip()
        if s == "zero":
            return np.zeros(n)
        if s.startswith("random(") and s.endswith(")"):
            return rng_for(int(s[7:-1])).standard_normal(n) / math.sqrt(n)
        return _vector_arg(s, n, "x0")
    v = np.asarray(arg, dtype=float)
    if v.shape != (n,):
        raise ValueError(f"x0 has length {v.size}, expected {n}")
    return v


def parse_problem_spec(text: str, rhs: str | None = None, x0=None, seed: int = 0) -> ProblemSpec:
    """Parse ``name:key=value,...`` or a Matrix Market path.

    List-valued parameters separate entries with ``;``, as in
    ``diag:values=-1;-2;-3``.
    """
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    name, sep, rest = text.partition(":")
    if sep and name in GENERATORS:
        params = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, val = item.partition("=")
            if not eq or not key:
                raise ValueError(f"generator parameter {item!r} is not key=value")
            params[key.strip()] = val.strip()
        return ProblemSpec(generator=name, params=params, rhs=rhs, x0=x0, seed=seed)
    if sep and not os.path.exists(text):
        raise ValueError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")
    return ProblemSpec(matrix_path=text, rhs=rhs, x0=x0, seed=seed)


# -- trace export ------------------------------------------------------------

def trace_rows(trace: SolverTrace) -> list[dict]:
    """One row per iterate. ``beta`` and ``alpha_last`` belong to the step into ``n``."""
    stagnated = trace.termination == Termination.STAGNATION_DETECTED
    rows = []
    for n in range(len(trace)):
        beta = alpha = None
        if n >= 1 and trace.betas is not None:
            beta = float(trace.betas[n - 1])
        if n >= 1 and trace.alphas is not None:
            alpha = float(trace.alphas[n - 1][-1])
        rows.append({
            "n": n,
            "residual_norm": float(trace.residual_norms[n]),
            "beta": beta,
            "alpha_last": alpha,
            "stagnated": stagnated and n == len(trace) - 1,
        })
    return rows


def trace_metadata(trace: SolverTrace) -> dict:
    p = trace.problem
    cfg = trace.config
    meta = {"method": trace.method, "N": p.n, "termination": trace.termination.value,
            "nu": None, "kappa_A": None, "eta_G": None,
            "tolerances": {"residual_tol": cfg.residual_tol, "dep_tol": cfg.dep_tol,
                           "rank_tol": cfg.rank_tol}}
    if np.any(p.r0):
        meta["nu"] = grade(p.A, p.r0, cfg.dep_tol)
    if trace.method in ("anderson", "opt-anderson") and len(trace) >= 2:
        idx = anderson_index(trace, cfg.dep_tol)
        meta["kappa_A"] = idx.value if idx.observed else None
    if trace.method == "gmres":
        meta["eta_G"] = gmres_stagnation_index(trace, cfg.dep_tol)
    return meta


def format_trace(trace: SolverTrace, fmt: str) -> str:
    rows = trace_rows(trace)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r["n"], _num(r["residual_norm"]),
                        "" if r["beta"] is None else _num(r["beta"]),
                        "" if r["alpha_last"] is None else _num(r["alpha_last"]),
                        int(r["stagnated"])])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps({"metadata": trace_metadata(trace), "rows": rows}, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}; use csv or json")


def export_trace(trace: SolverTrace, fmt: str, path) -> None:
    """Write the trace as CSV or JSON; I/O failures raise ``OSError``."""
    text = format_trace(trace, fmt)
    Path(path).write_text(text)


def load_trace_export(path) -> dict:
    """Read an exported trace back as ``{"metadata": ..., "rows": [...]}``.

    CSV exports carry no metadata, so it comes back as ``None``.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return json.loads(text)
    rows = []
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    for r in reader:
        rows.append({
            "n": int(r["n"]),
            "residual_norm": float(r["residual_norm"]),
            "beta": float(r["beta"]) if r["beta"] else None,
            "alpha_last": float(r["alpha_last"]) if r["alpha_last"] else None,
            "stagnated": r["stagnated"] == "1",
        })
    return {"metadata": None, "rows": rows}
