"""Simple Monte Carlo against the Metropolis ball walk.

Both estimators target ``S(f, rho) = int f rho / int rho`` without knowing the
normalizing constant. Simple Monte Carlo averages over uniform points; the
Metropolis estimator averages ``f`` along a ball walk filtered by
``min(1, rho(y)/rho(x))``. Here ``rho(x) = exp(-2x)`` and ``f(x) = x`` on
``[-1, 1]``, whose truth is ``1/2 - coth 2``.

Run: ``python demos/02_estimators.py``
"""

import math

from densint.chains import run_chain
from densint.estimators import Metropolis, SimpleMC, batch_means_se, delta_star, measure_rmse
from densint.instances import ProblemInstance, tilted_interval_instance
from densint.rng import RngStream

inst = tilted_interval_instance(2.0)
delta = delta_star(1, 2.0)
print(f"truth {inst.truth:.6f}, tuned step size delta* = {delta}")

# %% RMSE over 200 replications as the sample size grows
print("\n    n   simple RMSE   Metropolis RMSE")
for n in (64, 256, 1024, 4096):
    a = measure_rmse(inst, SimpleMC(), n, 200, seed=1)
    b = measure_rmse(inst, Metropolis(delta), n, 200, seed=1)
    print(f"{n:5d}   {a.rmse:.4f}        {b.rmse:.4f}")

# %% A single long chain with a batch-means error bar
run = run_chain(None, 200_000, body=inst.body, delta=delta, rho=inst.rho.evaluate, rng=RngStream(7))
x = run.trajectory[:, 0]
print(f"\none chain of 2e5 steps: {x.mean():.5f} +- {batch_means_se(x):.5f}")
print("oracle cost:", run.budget.as_dict())

# %% Multiplying rho by a constant changes nothing, bit for bit, for the chain
scaled = ProblemInstance(inst.body, inst.f, inst.rho.scaled(1000.0), inst.truth)
r1 = measure_rmse(inst, Metropolis(delta), 512, 20, seed=3).values
r2 = measure_rmse(scaled, Metropolis(delta), 512, 20, seed=3).values
print("\nMetropolis output unchanged under rho -> 1000 rho:", bool((r1 == r2).all()))
r1 = measure_rmse(inst, SimpleMC(), 512, 20, seed=3).values
r2 = measure_rmse(scaled, SimpleMC(), 512, 20, seed=3).values
print("simple MC max change under rho -> 1000 rho:", float(abs(r1 - r2).max()))
