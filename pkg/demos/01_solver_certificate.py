"""
Certified capacity of a random cq channel
=========================================

The solver returns a lower bound (chi at the final input distribution)
and an upper bound (largest letter divergence from omega). Their
difference is the duality gap.
"""

import numpy as np

from chicap.random import rand_channel
from chicap.solver import solve_capacity, verify_maximal_distance

rng = np.random.default_rng(3)
ch = rand_channel(4, 7, rng)

# tight tolerance so the KKT check below is meaningful
rep = solve_capacity(ch, tol=1e-10)
print(f"capacity  {rep.capacity_nats:.12f} nats  ({rep.capacity_bits:.12f} bits)")
print(f"gap       {rep.duality_gap:.2e} after {rep.iterations} iterations")

# letters carrying weight sit on the sphere of radius C around omega
print("letter  p_k        D_k")
for k, (p, d) in enumerate(zip(rep.optimal_p, rep.per_letter_divergence)):
    print(f"{k:>6}  {p:.6f}  {d:.10f}")

check = verify_maximal_distance(rep, support_tol=1e-6, dist_tol=1e-5)
print("maximal distance property:", "holds" if check.ok else check.witnesses)
