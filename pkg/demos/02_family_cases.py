"""
The four regimes of the q_n family
==================================

Each sequence gives letters +-k sending to pure qubit-like states that
lean towards |k> with weight q_k. The decay of q_n decides whether the
capacity is finite, whether omega is attained, and how heavy its
spectral tail is.
"""

from chicap.qfamily import QSequence, classify, truncated_maximizer

fixtures = {
    "1/n": QSequence("power", c=1, a=1),
    "1/log(n+1)": QSequence("log", c=1, b=1),
    "1/(L + 3 log L), L = log(n+10)": QSequence("loglog", c=1, b=10, m=3),
    "1/log log(n+2)": QSequence("iterlog", c=1, b=2),
}

print(f"{'q_n':<32} case  lambda*   F(lambda*)  capacity    H(omega)    dc")
for label, seq in fixtures.items():
    an = classify(seq)
    dc = "n.a." if an.dc_omega is None else f"{an.dc_omega:.4f}"
    print(
        f"{label:<32} {an.case:^4}  {an.lambda_star:<8.4g}  {an.F_at_lambda_star:<10.6g}"
        f"  {an.capacity_nats:<10.6g}  {an.omega_entropy:<10.6g}  {dc}"
    )

# in the third regime the capacity exceeds H(omega): omega is a limit
# of outputs, not an output
an = classify(fixtures["1/(L + 3 log L), L = log(n+10)"])
print(f"\ncapacity - H(omega) = {an.capacity_nats - an.omega_entropy:.10f}")

# truncated entropy maximizers climb to the capacity
seq = fixtures["1/log(n+1)"]
cap = classify(seq).capacity_nats
for n in (10, 100, 1000, 10**4, 10**5, 10**6):
    tm = truncated_maximizer(seq, n)
    print(f"n = {n:>7}  lambda_n = {tm.lam:.8f}  H(rho_n) = {tm.entropy:.8f}  gap to C {cap - tm.entropy:.2e}")
