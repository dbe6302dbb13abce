"""Closed-form bounds, and the same numbers through the command line.

Every bound is a plain function; ``bounds.evaluate`` also records which branch
of a case split applied. The ``densint`` command exposes the same registry and
the benchmark experiments, writing JSON or CSV.

Run: ``python demos/06_bounds_and_cli.py``
"""

import subprocess
import sys

from densint import bounds
from densint.estimators import delta_star

for name, kw in [
    ("lower_bound_fc", dict(n=1024, C=8)),
    ("lower_bound_fc", dict(n=10, C=1e6)),
    ("upper_bound_simple", dict(n=1024, C=8)),
    ("lower_bound_nonadaptive", dict(n=256, d=2, alpha=6.0)),
    ("conductance_lb_unit_ball", dict(d=3, alpha=2.0, delta=0.5)),
    ("error_const_metropolis", dict(d=1, delta=2**-0.5, alpha=0.0)),
]:
    b = bounds.evaluate(name, **kw)
    print(f"{name:26s} {kw}  ->  {b.value:.6g}  [{b.regime}]")

# %% The tractability ceiling dominates the Metropolis constant at the tuned step
print("\n  d  alpha   constant at delta*    ceiling")
for d in (1, 5, 20):
    for alpha in (0, 10, 100):
        c = bounds.error_const_metropolis(d, delta_star(d, alpha), alpha)
        print(f"{d:3d}  {alpha:5d}   {c:18.6g}   {bounds.tract_ceiling(d, alpha):.6g}")

# %% The command line
cmd = [sys.executable, "-m", "densint", "bounds", "lower_bound_fc", "n=1024", "C=8", "--format", "csv"]
print("\n$ densint bounds lower_bound_fc n=1024 C=8 --format csv")
print(subprocess.run(cmd, capture_output=True, text=True).stdout)
