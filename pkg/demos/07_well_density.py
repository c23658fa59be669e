"""
Mapping a particle's density with weak position readings
========================================================

A single particle in the ground state of an infinite well. 99 weak
detectors along the well each take 1000 readings of their cell's
projector; the persistent state is updated after every reading.

The average reading gives the density. With eps = 0.02 the state barely
changes (the accumulated infidelity stays well below one half), but the
readings are then so noisy that 1000 of them cannot show the arch. That
tension is printed below.
"""
from weaklab.plots import well_figure
from weaklab.scenarios import run_well
from weaklab.scenarios.well import error_budget

rep = run_well(bins=99, readings_per_detector=1000, epsilon=0.02, rng=42)
d = rep.diagnostics
print(f"rmse {d['rmse']:.1f} (95% budget {d['rmse_budget_95']:.1f})")
print(f"max infidelity {d['max_infidelity']:.3f}, edge restarts {d['edge_restarts']}")
print(f"argmax at x = {d['argmax_x']:.2f}")
print(f"predicted error per detector at the centre: {error_budget(99, 1000, 0.02, 1.0)[49]:.1f}"
      " against a peak density of 2")

for eps in (0.02, 0.05, 0.2):
    r = run_well(bins=99, readings_per_detector=200, epsilon=eps, rng=1)
    print(f"eps = {eps:<5} max infidelity {r.diagnostics['max_infidelity']:.3f}"
          f", rmse {r.diagnostics['rmse']:.2f}")

well_figure(rep).save("well_density.svg")
