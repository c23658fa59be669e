"""
A photon cycling through a three-way splitter
=============================================

Weak detectors sit on two of the three outgoing paths and get a fresh
pointer each pass; the third port is inferred from normalization. The
number of passes is chosen from the error budget for a standard error of
0.02 at eps = 0.1.
"""
import math

from weaklab.pointer import readout_std
from weaklab.scenarios import run_multiport

c, eps = (0.5, 0.3, 0.2), 0.1
noise = (readout_std(1.0) / eps) ** 2
# the inferred port carries the noise of both detectors
n_cycles = math.ceil((2 * noise + 0.8 * 0.2) / 0.02**2)

rep = run_multiport(c, n_cycles, epsilon=eps, rng=4)
print(rep.summary())

# %%
# Cross-check with a detector on every path.
check = run_multiport(c, 20_000, epsilon=0.5, rng=4, detect_all=True)
print("sum of three measured ports:", check.estimates["sum"])
print(check.warnings[0])
