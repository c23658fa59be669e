"""
Slicing the ledger
==================

Every reading is stored individually, so the same photons can be regrouped
afterwards. Any random tenth of them still estimates the transmission, and
throwing away the few readings flagged as collapses changes nothing.
"""
import numpy as np

from weaklab.scenarios import run_michelson_weak, scaled
from weaklab.statkit import slice

rep = run_michelson_weak(0.556789, 100_000, scaled(3), rng=11)
res = slice(rep.ledgers["mirror_R"], 10, np.random.default_rng(0))

for i, e in enumerate(res.estimates):
    print(f"slice {i}: {e.value:+.3f} +- {e.std_error:.3f}")
print("size-weighted mean of slices:", res.weighted_mean())
print("full estimate:", res.full.value)
print("flagged readings:", res.n_collapsed, " dark-port photons:", rep.counts["dark"])
print("estimate without flagged readings:", res.without_collapsed.value)
