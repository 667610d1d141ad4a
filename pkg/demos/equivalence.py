"""Anderson mixing with a full window reproduces GMRES on a small problem.

The iterate after the mixing step equals ``x^G_n + beta_n r^G_n`` and the
predicted iterate equals ``x^G_n``, so both deviations sit at rounding level.
"""

import numpy as np

from aagmres import MixingSchedule, anderson_run, gmres_run, random_dense

p = random_dense(8, 100.0, seed=3)
g = gmres_run(p)
a = anderson_run(p, MixingSchedule.constant(0.7))
for n in range(g.steps):
    xg, rg = g.iterates[n], g.residuals[n]
    step = np.linalg.norm(a.iterates[n + 1] - (xg + 0.7 * rg)) / (1 + np.linalg.norm(xg))
    pred = np.linalg.norm(a.xbar(n + 1) - xg) / (1 + np.linalg.norm(xg))
    print(f"n={n}  step deviation {step:.1e}  predicted deviation {pred:.1e}")
