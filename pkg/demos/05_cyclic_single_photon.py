"""
One photon, many passes
=======================

A single photon makes N round trips through the interferometer. Each pass
shifts a single persistent pointer by 1/N on the R branch, so after N
passes the pointer has moved by T on average while the photon almost
surely keeps returning to the source.
"""
from weaklab.plots import trajectory_figure
from weaklab.scenarios import end_only_trajectory, run_cyclic

n = 1000
survival, q = end_only_trajectory(0.5, n, 1.0 / n, 1.0)
for m in (0, 1, 10, 100, 500, 1000):
    print(f"after {m:>4} passes: <Q> = {q[m]:.6f}  (m/2N = {m / (2 * n):.6f}), survival {survival[m]:.6f}")

# %%
# Repeat the whole experiment with fresh photons to see the final reading
# distribution; one reading alone cannot resolve 0.5 against sigma = 1.
rep = run_cyclic(0.5, n, readout_policy="end_only", rng=2, n_runs=10_000)
print("mean final reading:", rep.estimates["transmission"])

# %%
# Away from T = 0.5 the mean conditioned on survival is no longer exactly
# m T / N: escapes remove the two branches unequally. At this coupling the
# departure is tiny.
_, q3 = end_only_trajectory(0.3, n, 1.0 / n, 1.0)
print(f"T = 0.3 final <Q> - T = {q3[-1] - 0.3:.2e}")

trajectory_figure(rep).save("cyclic_trajectory.svg")
