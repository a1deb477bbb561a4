"""
Finding a sequence in the third regime
======================================

For q_n = c / (L + m log L) with L = log(n + b) the convergence abscissa
is lambda* = c and F(lambda*) is finite once m > 2. At lambda = c the
factor exp(-lambda / q_n) = 1 / ((n + b) L^m) does not depend on c, so
F(lambda*) = A / c - B decreases in c.

This script scans (c, m), reports the fixture used by the tests and the
regression value of its capacity margin, and tunes c so that
F(lambda*) = 1 exactly.
"""

from chicap.qfamily import F_value, QSequence, classify, search_case_c, tune_boundary

B = 10.0

print("F(lambda*) over the grid")
print("  m \\ c " + "".join(f"{c:>9}" for c in (0.5, 0.75, 1.0, 1.5, 2.0)))
for m in (2.5, 3.0, 4.0, 5.0):
    vals = [F_value(QSequence("loglog", c=c, b=B, m=m), c).mid for c in (0.5, 0.75, 1.0, 1.5, 2.0)]
    print(f"  {m:<5} " + "".join(f"{v:>9.4f}" for v in vals))

seq = search_case_c(b=B)
an = classify(seq)
print(f"\nfirst hit: c = {seq.c}, m = {seq.m}, b = {seq.b}")
print(f"  case {an.case}, F(lambda*) = {an.F_at_lambda_star!r}")
print(f"  capacity - H(omega) = {an.capacity_nats - an.omega_entropy!r}")
print(f"  lambda* (1 - h_*)   = {an.lambda_star * (1 - an.h_star)!r}")

edge = tune_boundary(m=3.0, b=B)
e = classify(edge)
print(f"\nboundary: c = {edge.c!r}, F(lambda*) = {e.F_at_lambda_star!r}, case {e.case}, dc = {e.dc_omega}")
