"""Geometry and problem instances.

The estimators only ever see two oracles, ``f`` and ``rho``, plus a membership
oracle for the domain. This script builds the pieces: unit-ball volumes, the
grid packing used by the hard log-concave family, and the two adversarial
families together with their exact reference values.

Run: ``python demos/01_geometry_and_instances.py``
"""

import math

import numpy as np

from densint.geometry import ConvexBody, gamma_half_ratio, packing_on_ball, vol_unit_ball
from densint.instances import fad_family, make_fc_instance, make_smooth_instance, sample_fc_prior
from densint.rng import RngStream

# %% Volumes and the Gamma-ratio inequality behind the local-conductance floor
print("d   vol(B^d)      Gamma(z+1/2)/Gamma(z) <= sqrt(z), z=(d+1)/2")
for d in (1, 2, 3, 5, 10, 20):
    z = (d + 1) / 2
    print(f"{d:<3} {vol_unit_ball(d):<13.6g} {gamma_half_ratio(z):.4f} <= {math.sqrt(z):.4f}")

# %% Uniform sampling on the ball: |X|^d is uniform on [0, 1]
X = ConvexBody.ball(3).sample(RngStream(0), 100_000)
print("\nmean of |X|^3 for uniform X in B^3:", round(float(np.mean(np.linalg.norm(X, axis=1) ** 3)), 4), "(exact 0.5)")

# %% Grid packing: m disjoint balls of radius m^(-1/d)/2 inside B^d
p = packing_on_ball(8, 2)
print(f"\npacking of 8 balls in the disk, radius {p.radius:.4f}:")
print(np.round(p.centers, 4))

# %% The two-level hard family on [0, 1]: rho = C on l of the 2n cells
inst = make_fc_instance(2, 5.0, I=[1], eps=[1])
print(f"\nhard instance n=2, C=5: l={inst.l}, c_ml={inst.c_ml}, truth={inst.truth}")
draw = sample_fc_prior(16, 8.0, RngStream(1))
print(f"a prior draw with n=16, C=8: cells {list(draw.I)}, signs {list(draw.eps)}, truth {draw.truth:+.4f}")

# %% The log-concave packing family: rho_i peaks at center y_i, f_i is a scaled bump
fam = fad_family(2, 6.0, p)
print("\nlog-concave family on B^2, alpha=6, 16 instances (index, sign, truth):")
for inst in fam[:6]:
    print(f"  {inst.meta['index']}  {inst.meta['sign']:+d}  {inst.truth:+.6f}")
z = np.array([[0.1234, 0.0567]])
vals = [fam[2 * i].rho(z)[0] for i in range(p.m)]
print("one rho value at a generic point identifies the index:", len(set(vals)) == p.m)

# %% A benign instance with quadrature truth
g = make_smooth_instance("gaussian-like", alpha=2.0)
print(f"\ngaussian-like instance on B^2, f = x_1: truth {g.truth:+.2e} (odd symmetry gives 0)")
