"""A cyclic permutation system on which GMRES makes no progress for N steps.

With ``A`` the cyclic shift and ``b = e_k`` the initial residual is orthogonal
to ``A r0``, so GMRES repeats ``x0`` until the Krylov space is complete.
Anderson mixing detects this after one step and freezes, and the optimized
mixing parameter is exactly zero.
"""

from aagmres import MixingSchedule, anderson_index, anderson_run, classify, cycle, gmres_run, optimized_anderson_run

p = cycle(8, 1)
g = gmres_run(p)
print("GMRES residual norms:", " ".join(f"{r:.3g}" for r in g.residual_norms))

a = anderson_run(p, MixingSchedule.constant(1.0))
print("Anderson index:", anderson_index(a).value, "termination:", a.termination.value)

o = optimized_anderson_run(p)
print("optimized beta_0:", o.betas[0])

print(classify(p).summary_line())
