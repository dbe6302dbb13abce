"""Simple Monte Carlo on densities with bounded sup/inf ratio.

For densities with ``sup rho / inf rho <= C`` the best possible error of any
method using ``n`` values is of order ``sqrt(C/n)``, and simple Monte Carlo
attains it up to a constant factor. The lower bound comes from a prior over
two-level densities; averaging the simple estimator's error over that prior
should land between the two bounds and grow like ``sqrt(C)``.

Run: ``python demos/03_ratio_bounded_class.py``
"""

import math

from densint import bounds
from densint.estimators import SimpleMC, prior_averaged_rmse
from densint.instances import sample_fc_prior
from densint.rng import derive_seed

print("   C     n    lower     RMSE     upper    RMSE/sqrt(C)")
for i, C in enumerate((2.0, 4.0, 8.0, 32.0, 128.0)):
    for j, n in enumerate((256, 1024)):
        res = prior_averaged_rmse(lambda rng: sample_fc_prior(n, C, rng), SimpleMC(), n, 100, 30, derive_seed(1, i, j))
        lo, hi = bounds.lower_bound_fc(n, C), bounds.upper_bound_simple(n, C)
        print(f"{C:5g} {n:5d}   {lo:.4f}   {res.rmse:.4f}   {hi:.4f}   {res.rmse / math.sqrt(C):.4f}")

# %% In the regime C >> n no method can do much better than the trivial answer
print("\nlower bound with n = 10 values and C = 1e6:", round(bounds.lower_bound_fc(10, 1e6), 5))
print("with n = 1e15 and C = 1e20:", round(bounds.lower_bound_fc(10**15, 1e20), 5))
