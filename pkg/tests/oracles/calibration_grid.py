"""Coarse grid search over the trial loss modifiers (reference for the fitted fixture).

Screens a 1 dB x 5 mm grid with 5 seeds, then re-scores the closest few
points with the full 20-seed average.  Run directly:

    python3 tests/oracles/calibration_grid.py
"""
import itertools

from ugbackscatter.device_profiles import preset
from ugbackscatter.field_sim import LossModifiers, mean_success_rate, trial_preset

TARGET = 0.539


def grid_search(seed=2024):
    layout, rig = trial_preset()
    device = preset("RFID-UHF")
    screened = []
    for canopy, jitter in itertools.product(range(0, 21), (0.0, 0.005, 0.01, 0.015, 0.02)):
        mods = LossModifiers(float(canopy), jitter)
        screened.append((abs(mean_success_rate(layout, rig, device, mods, seed, 5) - TARGET), mods))
    screened.sort(key=lambda t: t[0])
    scored = []
    for _, mods in screened[:4]:
        rate = mean_success_rate(layout, rig, device, mods, seed, 20)
        scored.append((abs(rate - TARGET), rate, mods))
    return min(scored, key=lambda t: t[0])


if __name__ == "__main__":
    err, rate, mods = grid_search()
    print(mods, rate, "within 0.02:", err <= 0.02)
