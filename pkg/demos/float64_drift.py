"""How far a full-window Anderson run drifts from GMRES in double precision.

The difference basis of an Anderson run becomes ill-conditioned as fast as
the monomial Krylov basis, so the equivalence with GMRES holds only to a
precision that degrades with ``N``. This prints the worst step deviation as
the dimension grows.
"""

import numpy as np

from aagmres import MixingSchedule, SolveConfig, anderson_run, gmres_run, random_dense

for N in (5, 8, 11, 14, 17, 20, 25, 30):
    p = random_dense(N, 100.0, seed=12)
    cfg = SolveConfig(max_iter=N + 5)
    g = gmres_run(p, cfg)
    worst = {}
    for beta in (1.0, -0.3):
        a = anderson_run(p, MixingSchedule.constant(beta), cfg=cfg)
        devs = [np.linalg.norm(a.xbar(n + 1) - g.iterates[n]) / (1 + np.linalg.norm(g.iterates[n]))
                for n in range(min(a.steps, g.steps))]
        worst[beta] = max(devs)
    print(f"N={N:2d}  beta=1: {worst[1.0]:.1e}  beta=-0.3: {worst[-0.3]:.1e}")
