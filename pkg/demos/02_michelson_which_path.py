"""
Which-path information without destroying interference
======================================================

Each photon entering the Michelson interferometer has its arm-R mirror
weakly coupled to a fresh pointer. Individually the readings are noise, but
their average recovers the transmission coefficient, while nearly every
photon still returns to the source port.
"""
import numpy as np

from weaklab.pointer import wrong_port_probability
from weaklab.scenarios import fixed, run_michelson_weak, scaled

T = 0.556789

rep = run_michelson_weak(T, 1_000_000, fixed(0.1), rng=np.random.default_rng(7))
print(rep.summary())

# %%
# In the scaled regime (eps = lambda / sqrt(N)) the expected number of
# dark-port photons does not grow with N.
for n in (10**4, 10**5, 10**6):
    p = wrong_port_probability(3 / np.sqrt(n), 1.0, T)
    print(f"N = {n:>8}: expected dark-port photons {n * p:.4f}")

# %%
# Removing the splitter after the readings turns the exits into a strong
# which-path measurement; with the same seed the weak readings are unchanged.
rem = run_michelson_weak(T, 200_000, scaled(3), delayed_choice="remove_bs", rng=3)
keep = run_michelson_weak(T, 200_000, scaled(3), delayed_choice="keep_bs", rng=3)
print("strong R fraction:", rem.estimates["strong_which_path_R"])
print("weak estimate, removed vs kept:", rem.estimates["transmission"].value,
      keep.estimates["transmission"].value)
