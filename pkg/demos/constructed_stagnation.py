"""A problem whose GMRES residual repeats once, at a chosen step ``s``.

The Anderson index is then ``s + 1`` and the last Anderson coefficient
vanishes at the stagnation step.
"""

from aagmres import classify, stagnating

p = stagnating(8, 3, seed=1)
report = classify(p)
print(report.summary_line())
print("GMRES residual norms:", " ".join(f"{r:.4g}" for r in report.traces["gmres"].residual_norms))
for check in report.checks:
    print(check.row())
