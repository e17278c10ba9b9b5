"""
How moisture shapes the buried-tag channel
==========================================

A short walk through the soil channel model, from soil permittivity to the
loss terms of a link between an antenna 30 cm above the ground and a tag
2.5 cm below it.
"""
# %%
# Soil permittivity
# -----------------
# A loam with 30 % clay and 50 % sand.  Both parts of the permittivity climb
# with water content; the imaginary part is what eats the signal.
import numpy as np

from ugbackscatter.soil_channel import (Direction, LinkGeometry, SoilProfile, path_loss_components,
                                        propagation_constants, soil_complex_permittivity)

base = SoilProfile(vwc=0.05, clay_fraction=0.30, sand_fraction=0.50)
for vwc in (0.05, 0.10, 0.15, 0.20, 0.25):
    eps = soil_complex_permittivity(base.with_vwc(vwc))
    alpha, beta = propagation_constants(eps, 915e6)
    print(f"vwc={vwc:.2f}  eps={eps.eps_real:6.2f} - j{eps.eps_imag:5.2f}  "
          f"alpha={alpha:5.2f} Np/m  beta={beta:6.2f} rad/m")

# %%
# Loss budget along the track
# ---------------------------
# Soil bends the ray almost straight down, so the soil leg is just the burial
# depth.  Almost all of the distance is in air, yet 2.5 cm of soil costs
# several dB.
geom = LinkGeometry(tx_height=0.3, tag_depth=0.025)
soil = base.with_vwc(0.15)
print("offset  above  under  refr  (dB, downlink)")
for x in np.arange(0.0, 2.01, 0.5):
    ag, ug, refr = path_loss_components(geom.with_offset(x), soil, Direction.AG2UG)
    print(f"{x:5.1f}  {ag:6.2f} {ug:6.2f} {refr:5.2f}")

# %%
# The two directions are not quite symmetric: crossing into the denser medium
# and crossing out of it transmit slightly different power fractions.
for d in Direction:
    print(d.value, round(sum(path_loss_components(geom.with_offset(1.0), soil, d)), 3))
