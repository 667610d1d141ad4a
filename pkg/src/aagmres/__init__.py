"""Anderson mixing, GMRES and their equivalence diagnostics for ``A x + b = 0``."""

from .diagnostics import (
    Case,
    DiagnosticsReport,
    RelationCheck,
    anderson_index,
    classify,
    gmres_stagnation_index,
    grade,
    run_verification,
)
from .fileio import (
    MatrixMarketError,
    export_trace,
    parse_problem_spec,
    read_matrix_market,
    read_vector,
    write_matrix_market,
    write_vector,
)
from .generators import cycle, generate_problem, random_dense, rng_for, shifted_spd, stagnating
from .linalg import (
    KrylovState,
    QrFactors,
    arnoldi,
    least_squares,
    matvec,
    orthonormal_extend,
    project_onto_columnspace,
    qr_pivoted,
)
from .solvers import (
    LinearProblem,
    MixingSchedule,
    ScheduleTooShortError,
    SingularMatrixError,
    SolveConfig,
    SolverTrace,
    Termination,
    anderson_coefficients,
    anderson_run,
    beta_star,
    fixed_point_run,
    gmres_run,
    make_problem,
    optimized_anderson_run,
    simple_mixing_run,
)

__version__ = "0.1.0"
