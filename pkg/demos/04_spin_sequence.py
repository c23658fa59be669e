"""
Weak readings between strong spin measurements
==============================================

Strong sigma_alpha, weak (sigma_alpha, sigma_beta), strong sigma_beta, weak
pair again, strong sigma_alpha. Grouped by the strong outcomes on either
side, each weak reading agrees with both the past and the future strong
results: the weak value between an alpha-up and a beta-up state is +1 for
sigma_alpha and +1 for sigma_beta at the same time.
"""
import math

from weaklab.scenarios import run_spin_sequence

rep = run_spin_sequence(alpha=0.0, beta=math.pi / 2, m=100_000, lam=10.0, rng=5)
for key, e in rep.estimates.items():
    print(f"{key:<14} {e.value:+.3f} +- {e.std_error:.3f}   weak value {rep.truth[key]:+.3f}")
print("strong outcome triples:", rep.counts)
