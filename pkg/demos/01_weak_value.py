"""
Weak values from post-selected pointer readings
===============================================

A spin prepared along +x, weakly coupled through sigma_z and then
post-selected on 0.6|z+> - 0.4|z->, has weak value 5: outside the
eigenvalue range of sigma_z. Averaging many individual pointer readings
of the surviving particles recovers it.
"""
import numpy as np

from weaklab.hilbert import PureState, pauli, spin_state
from weaklab.pointer import couple, mean_shift
from weaklab.statkit import estimate
from weaklab.tsvf import TwoStateVector, postselected_readouts, weak_value

sz = pauli((0, 0, 1))
pre = spin_state((1, 0, 0), +1)
post = PureState(("z+", "z-"), [0.6, -0.4])
tsv = TwoStateVector(pre, post)

print("weak value:", weak_value(sz, tsv))

# %%
# The exact conditioned pointer shift approaches eps * A_w as the coupling
# shrinks relative to the pointer width.
for eps in (0.5, 0.1, 0.01, 0.001):
    print(f"eps = {eps:<6} shift / eps = {mean_shift(couple(pre, sz, eps), post) / eps:.6f}")

# %%
# Monte Carlo: read every pointer, keep the runs that pass post-selection.
ledger, attempts = postselected_readouts(sz, tsv, epsilon=0.01, sigma=1.0, n_accept=200_000,
                                         rng=np.random.default_rng(1))
e = estimate(ledger)
print(f"{len(ledger)} of {attempts} survived; estimate {e.value:.3f} +- {e.std_error:.3f}")
