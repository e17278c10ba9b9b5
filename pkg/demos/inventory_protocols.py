"""
Singulating many tags
=====================

Framed slotted ALOHA against the adaptive Q algorithm.
"""
# %%
import math

import numpy as np

from ugbackscatter.mac_inventory import expected_successes, fsa_monte_carlo, q_protocol_inventory

# %%
# One frame of F slots and n tags: a tag gets through when nobody else picks
# its slot.  Simulation and closed form agree closely.
for n, f in ((10, 16), (100, 128), (256, 256)):
    mc = fsa_monte_carlo(n, f, 10_000, seed=1).mean_successes
    print(f"n={n:3d} F={f:3d}  simulated {mc:7.3f}  expected {expected_successes(n, f):7.3f}")

# %%
# Throughput per slot peaks when the frame is as long as the population, at
# about 1/e.
n = 128
frames = 2 ** np.arange(3, 11)
eff = [expected_successes(n, int(f)) / int(f) for f in frames]
print({int(f): round(float(e), 3) for f, e in zip(frames, eff)}, "1/e =", round(1 / math.e, 3))

# %%
# The Q algorithm does not need to know n.  It nudges the frame size up after
# collisions and down after empty slots until everything is read.
for tags in (16, 64, 256):
    slots = [q_protocol_inventory(tags, 4.0, 100_000, s).slots_used for s in range(20)]
    print(f"{tags:3d} tags: {np.mean(slots):7.1f} slots on average ({tags / np.mean(slots):.3f} tags/slot)")
