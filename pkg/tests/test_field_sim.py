import json
from importlib import resources

import pytest

from ugbackscatter import reporting
from ugbackscatter.device_profiles import preset
from ugbackscatter.field_sim import (FieldLayout, LossModifiers, ModifierBounds, ReaderRig, TagPosition,
                                     UncoveredRowError, calibrate_modifiers, disable_thresholds, disable_transmit,
                                     load_calibrated_modifiers, mean_success_rate, moisture_map_from_zones,
                                     passes_needed, simulate_pass, trial_preset)
from ugbackscatter.soil_channel import SoilProfile

RFID = preset("RFID-UHF")
AIOT = preset("AIOT-BL")


@pytest.fixture(scope="module")
def trial():
    return trial_preset()


def test_trial_preset(trial):
    layout, rig = trial
    assert layout.n_tags == 288 and layout.rows == 12 and layout.tags_per_row == 24
    assert {t.depth for t in layout.tag_positions} == {0.025}
    assert rig.antenna_count == 6 and rig.rows_per_pass == 4 and rig.antennas_per_row == 2
    assert passes_needed(layout, rig) == 3


def test_zones_single():
    zones = moisture_map_from_zones([((1, 12), 0.15)])
    assert len(set(zones.values())) == 1 and zones[7].vwc == 0.15


def test_zones_three_bands():
    zones = moisture_map_from_zones([((1, 4), 0.05), ((5, 8), 0.15), ((9, 12), 0.25)])
    assert [zones[r].vwc for r in (1, 4, 5, 8, 9, 12)] == [0.05, 0.05, 0.15, 0.15, 0.25, 0.25]


def test_zones_missing_row():
    with pytest.raises(UncoveredRowError):
        moisture_map_from_zones([((1, 11), 0.15)])


def test_layout_invariants():
    zones = moisture_map_from_zones([((1, 1), 0.1)], rows=1)
    with pytest.raises(ValueError):
        FieldLayout(1, 0.76, 2, (TagPosition(1, 0.0, 0.025),), zones)
    with pytest.raises(ValueError):
        FieldLayout(1, 0.76, 1, (TagPosition(1, 0.0, 0.0),), zones)
    irregular = FieldLayout(1, 0.76, 5, (TagPosition(1, 0.0, 0.03),), zones, irregular=True)
    assert irregular.n_tags == 1


def test_rig_invariants():
    with pytest.raises(ValueError):
        ReaderRig(speed=0.0)
    with pytest.raises(ValueError):
        ReaderRig(antenna_count=4)


def test_seed_is_required(trial):
    with pytest.raises(ValueError, match="seed"):
        simulate_pass(*trial, RFID, LossModifiers())


def test_thresholds_disabled_reads_everything(trial):
    r = simulate_pass(*trial, disable_thresholds(RFID), LossModifiers(), seed=1, contention=False)
    assert r.success_rate == 1.0 and r.unique_reads == 288


def test_transmit_disabled_reads_nothing(trial):
    r = simulate_pass(*trial, disable_transmit(RFID), LossModifiers(), seed=1)
    assert r.success_rate == 0.0
    assert not any(t.activated for t in r.per_tag)


def test_determinism(trial):
    mods = load_calibrated_modifiers()
    a = simulate_pass(*trial, RFID, mods, seed=11)
    b = simulate_pass(*trial, RFID, mods, seed=11)
    text = lambda r: reporting.render("fieldsim", reporting.fieldsim_rows(r))  # noqa: E731
    assert text(a) == text(b)
    assert a.per_pass_rates == b.per_pass_rates


def test_accounting(trial):
    r = simulate_pass(*trial, RFID, load_calibrated_modifiers(), seed=5)
    assert all(t.activated for t in r.per_tag if t.read)
    assert r.unique_reads == sum(t.read for t in r.per_tag) <= r.attempted
    assert r.success_rate == r.unique_reads / r.attempted
    # a read tag closed both links somewhere on the track
    assert all(t.best_margin >= 0 for t in r.per_tag if t.read)


def test_canopy_loss_never_helps(trial):
    for seed in (1, 2, 3):
        rates = [simulate_pass(*trial, RFID, LossModifiers(c, 0.005), seed=seed).success_rate
                 for c in range(0, 16)]
        assert all(b <= a for a, b in zip(rates, rates[1:]))


def test_aiot_never_worse_than_rfid(trial):
    for canopy in (0.0, 4.0, 8.0, 12.0, 16.0):
        mods = LossModifiers(canopy, 0.005)
        for seed in (1, 2):
            assert simulate_pass(*trial, AIOT, mods, seed).success_rate >= \
                simulate_pass(*trial, RFID, mods, seed).success_rate


def test_fixture_file_records_both_points():
    data = json.loads(resources.files("ugbackscatter").joinpath("data/calibrated_modifiers.json").read_text())
    assert data["target_rate"] == 0.539
    assert abs(data["grid_search"]["rate"] - 0.539) <= 0.02
    assert load_calibrated_modifiers() == LossModifiers(data["canopy_loss"], data["depth_jitter"], data["misc_margin"])


def test_calibration_trivial_target():
    layout, rig = trial_preset()
    res = calibrate_modifiers(1.0, layout, rig, disable_thresholds(RFID),
                              ModifierBounds((0.0, 0.0), (0.0, 0.0), (0.0, 0.0)), seed=0, n_seeds=2)
    assert res.converged and res.modifiers == LossModifiers()


def test_calibration_infeasible_bounds_flagged(trial):
    # 30-40 dB extra loss leaves nothing readable
    res = calibrate_modifiers(0.539, *trial, RFID, ModifierBounds((30.0, 40.0), (0.0, 0.0)), seed=0, n_seeds=2)
    assert not res.converged
    assert 30.0 <= res.modifiers.canopy_loss <= 40.0


def test_calibration_reproduces_fixture(trial):
    res = calibrate_modifiers(0.539, *trial, RFID, ModifierBounds(), seed=2024)
    assert res.converged
    assert res.modifiers == load_calibrated_modifiers()
    assert abs(res.rate - 0.539) <= 0.02


def test_grid_oracle_point_is_feasible(trial):
    data = json.loads(resources.files("ugbackscatter").joinpath("data/calibrated_modifiers.json").read_text())
    g = data["grid_search"]
    mods = LossModifiers(g["canopy_loss"], g["depth_jitter"], g["misc_margin"])
    assert abs(mean_success_rate(*trial, RFID, mods, seed=2024, n_seeds=20) - 0.539) <= 0.02


def test_per_zone_rates_fall_with_moisture(trial):
    r = simulate_pass(*trial, RFID, load_calibrated_modifiers(), seed=3)
    dry, mid, wet = r.per_pass_rates
    assert dry >= mid >= wet


def test_custom_soil_layout():
    zones = {1: SoilProfile(0.1)}
    layout = FieldLayout(1, 0.76, 3, tuple(TagPosition(1, 0.5 * i, 0.025) for i in range(3)), zones)
    r = simulate_pass(layout, ReaderRig(), RFID, LossModifiers(), seed=0)
    assert r.unique_reads == 3
