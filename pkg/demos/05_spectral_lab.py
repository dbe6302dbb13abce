"""Exact spectral checks on small discretized chains.

Discretizing the 1-D Metropolis ball walk into N cells gives a reversible
N x N kernel. Its second eigenvalue, exact conductance (by enumerating all
2^(N-1) cuts) and the Cheeger inequality ``1 - beta >= phi^2 / 2`` can then be
checked exactly, and the asymptotic error law ``n e^2 -> (1+beta)/(1-beta)``
can be checked by simulation.

Run: ``python demos/05_spectral_lab.py``
"""

import numpy as np

from densint import bounds
from densint.rng import RngStream
from densint.spectral import (
    asymptotic_error_law,
    ball_walk_reference,
    discretize_1d,
    local_conductance_exact_1d,
    spectral_report,
    two_state,
)

print(" N  alpha  delta   beta     phi      phi^2/2   1-beta   thm bound")
for N in (8, 16):
    for alpha in (0.0, 2.0, 4.0):
        for delta in (0.25, 0.5):
            ch = discretize_1d(lambda X, a=alpha: np.exp(-a * X[:, 0]), delta, N)
            l = local_conductance_exact_1d(ball_walk_reference(N, delta))
            ref = bounds.conductance_lb_metropolis(l, delta, 2.0, 1, alpha)
            r = spectral_report(ch, reference_bound=ref)
            print(f"{N:2d}  {alpha:4.1f}  {delta:5.2f}   {r.beta:.4f}   {r.conductance:.4f}   "
                  f"{r.conductance**2 / 2:.5f}   {r.lam:.4f}   {ref:.5f}")

# %% The error law on the two-state chain
ch = two_state(0.25)
rows = asymptotic_error_law(ch, schedule=(10, 100, 1000, 10_000), replications=5000, rng=RngStream(1))
print("\ntwo-state chain, p = 0.25, f = beta-eigenvector; limit (1+beta)/(1-beta) =", rows[0]["limit"])
for row in rows:
    print(f"  n={row['n']:6d}  n e^2 = {row['e2n']:.3f} +- {row['stderr']:.3f}")
