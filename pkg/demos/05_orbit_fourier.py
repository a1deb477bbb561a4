"""
Orbit channels and a capacity jump
==================================

A seed state moved around by cyclic shifts has capacity H(sigma||omega),
and since log(omega) commutes with the shifts this is H(omega) - H(sigma).

Letting the group become the circle, the capacity is the Shannon entropy
of |phi_k|^2. Coefficient vectors phi_n with q_n = C / log n converge in
norm to a single coefficient (capacity 0), while their capacities stay
above C.
"""

import numpy as np

from chicap.orbit import OrbitChannel, discontinuity_demo, fourier_capacity, limit_state, orbit_capacity
from chicap.random import rand_density
from chicap.solver import solve_capacity
from chicap.spectral import von_neumann_entropy

rng = np.random.default_rng(5)
for d in (2, 4, 8, 16):
    ch = OrbitChannel(rand_density(d, rng))
    r = orbit_capacity(ch)
    rep = solve_capacity(ch.as_cq(), tol=1e-10)
    diff = von_neumann_entropy(r.omega) - r.h_min
    print(f"d = {d:>2}  H(s||w) = {r.capacity:.12f}  H(w) - H(s) = {diff:.12f}  solver = {rep.capacity_nats:.12f}")

print("\n       n      q_n    capacity   ||phi_n - phi||")
for row in discontinuity_demo(1.0, [10**2, 10**4, 10**6, 10**12, 10**50]):
    print(f"{row.n:>8.0e}  {row.q_n:.4f}   {row.capacity:.6f}   {row.coeff_distance:.4f}")
print(f"limit capacity {fourier_capacity(limit_state()).capacity}")
# capacity - C is the binary entropy of q_n: it vanishes, but only like log log n / log n
