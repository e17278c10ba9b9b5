import dataclasses

import pytest

from ugbackscatter.device_profiles import (DeviceClass, UnknownDeviceError, architecture_table, coverage_envelope,
                                           density_check, preset)


def test_rfid_preset():
    p = preset("RFID-UHF")
    assert (p.p_t, p.p_thr, p.sensitivity, p.m_factor) == (30.0, -10.0, -75.0, 0.33)


def test_bl_preset():
    p = preset(DeviceClass.AIOT_BL)
    assert (p.p_t, p.p_thr, p.sensitivity, p.m_factor) == (24.0, -25.0, -100.0, 0.25)
    assert p.max_power == 10e-6
    assert p.description == "No energy source. Only backscatter communication."
    assert p.complexity_note == "Comparable to UHF RFID ISO18000-6C (EPC C1G2)"


def test_bsa_preset():
    p = preset("AIOT-BSA")
    assert p.max_power == 10e-3
    assert p.complexity_note == "Much lower than NB-IoT devices"


def test_ba_is_flagged_interpolated():
    assert preset("AIOT-BA").interpolated
    assert not preset("AIOT-BL").interpolated


def test_unknown_class():
    with pytest.raises(UnknownDeviceError):
        preset("BOGUS")


def test_presets_are_immutable_and_stable():
    assert preset("AIOT-BL") is preset("AIOT-BL")
    with pytest.raises(dataclasses.FrozenInstanceError):
        preset("AIOT-BL").p_thr = 0.0


def test_power_class_ordering():
    bl, ba, bsa = (preset(c).max_power for c in ("AIOT-BL", "AIOT-BA", "AIOT-BSA"))
    assert bl < ba < bsa
    assert bl <= 10e-6 and bsa <= 10e-3


def test_aiot_data_rates_within_envelope():
    for c in ("AIOT-BL", "AIOT-BA", "AIOT-BSA"):
        lo, hi = preset(c).data_rate_range
        assert 0.1 <= lo <= hi <= 5.0


def test_dominance_precondition():
    bl, rfid = preset("AIOT-BL"), preset("RFID-UHF")
    assert bl.p_thr < rfid.p_thr and bl.sensitivity < rfid.sensitivity


def test_harvesting_efficiency_is_metadata():
    assert preset("AIOT-BL").harvesting_efficiency == 0.182
    assert preset("RFID-UHF").harvesting_efficiency is None


def test_architecture_table():
    rows = {r.name: r for r in architecture_table()}
    assert len(rows) == 4
    assert rows["LoRaWAN"] == ("LoRaWAN", 25e-3, (10e3, 15e3), (0.3, 5.5))
    assert rows["NB-IoT"] == ("NB-IoT", 200e-3, (5e3, 15e3), (250.0, 250.0))
    assert rows["Active A-IoT"] == ("Active A-IoT", 10e-3, (500.0, 500.0), (5.0, 5.0))
    assert rows["Battery-free A-IoT"] == ("Battery-free A-IoT", 10e-6, (500.0, 500.0), (5.0, 5.0))


@pytest.mark.parametrize("count, area, env, passed, limit", [
    (150, 100.0, "Indoor", True, 150.0),
    (151, 100.0, "Indoor", False, 150.0),
    (20, 100.0, "Outdoor", True, 20.0),
    (21, 100.0, "Outdoor", False, 20.0),
    (0, 3.7, "Outdoor", True, 0.74),
])
def test_density_check(count, area, env, passed, limit):
    res = density_check(count, area, env)
    assert res.passed is passed
    assert res.max_devices == pytest.approx(limit)


def test_density_check_rejects_empty_area():
    with pytest.raises(ValueError):
        density_check(1, 0.0, "Indoor")


def test_coverage_envelopes():
    assert coverage_envelope("Indoor") == (10.0, 50.0)
    assert coverage_envelope("Outdoor") == (50.0, 500.0)
    assert coverage_envelope("Indoor")[1] == coverage_envelope("Outdoor")[0]
