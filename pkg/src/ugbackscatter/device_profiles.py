"""Device taxonomy, link-budget presets and deployment envelopes.

Presets cover UHF RFID (EPC C1G2) and the three ambient-IoT device classes:
backscatter-only (BL), backscatter-amplified (BA) and battery/signal-assisted
(BSA).  All four are frozen dataclasses, so a preset can be shared freely.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional


class DeviceClass(str, enum.Enum):
    RFID_UHF = "RFID-UHF"
    AIOT_BL = "AIOT-BL"
    AIOT_BA = "AIOT-BA"
    AIOT_BSA = "AIOT-BSA"


class Environment(str, enum.Enum):
    INDOOR = "Indoor"
    OUTDOOR = "Outdoor"


@dataclass(frozen=True)
class DeviceProfile:
    name: str
    device_class: DeviceClass
    p_t: float                 # exciter transmit power, dBm
    p_thr: float               # tag activation threshold, dBm
    sensitivity: float         # reader sensitivity, dBm
    m_factor: float            # linear backscatter modulation factor
    max_power: Optional[float]                    # W, None for passive RFID
    data_rate_range: Optional[tuple[float, float]]  # kbps
    description: str = ""
    complexity_note: str = ""
    harvesting_efficiency: Optional[float] = None  # metadata only
    interpolated: bool = False

    @property
    def is_aiot(self) -> bool:
        return self.device_class is not DeviceClass.RFID_UHF


class ArchitectureRow(NamedTuple):
    name: str
    max_power: float            # W
    coverage: tuple[float, float]  # m
    data_rate: tuple[float, float]  # kbps


BL_MAX_POWER = 10e-6
BSA_MAX_POWER = 10e-3
AIOT_DATA_RATE = (0.1, 5.0)
RF_HARVESTING_EFFICIENCY = 0.182

_AIOT_RADIO = dict(p_t=24.0, p_thr=-25.0, sensitivity=-100.0, m_factor=0.25)

_PRESETS = {
    DeviceClass.RFID_UHF: DeviceProfile(
        name="RFID-UHF", device_class=DeviceClass.RFID_UHF,
        p_t=30.0, p_thr=-10.0, sensitivity=-75.0, m_factor=0.33,
        max_power=None, data_rate_range=None,
        description="Passive UHF RFID tag, ISO18000-6C (EPC C1G2), OOK backscatter.",
        complexity_note="Reference device class"),
    DeviceClass.AIOT_BL: DeviceProfile(
        name="AIOT-BL", device_class=DeviceClass.AIOT_BL, **_AIOT_RADIO,
        max_power=BL_MAX_POWER, data_rate_range=AIOT_DATA_RATE,
        description="No energy source. Only backscatter communication.",
        complexity_note="Comparable to UHF RFID ISO18000-6C (EPC C1G2)",
        harvesting_efficiency=RF_HARVESTING_EFFICIENCY),
    # the tables only place BA between BL and BSA; BL radio values and a
    # 1 mW power class are used
    DeviceClass.AIOT_BA: DeviceProfile(
        name="AIOT-BA", device_class=DeviceClass.AIOT_BA, **_AIOT_RADIO,
        max_power=1e-3, data_rate_range=AIOT_DATA_RATE,
        description="Energy source for amplifying the backscattered signal. No independent signal generation.",
        complexity_note="Between BL and BSA devices",
        harvesting_efficiency=RF_HARVESTING_EFFICIENCY, interpolated=True),
    DeviceClass.AIOT_BSA: DeviceProfile(
        name="AIOT-BSA", device_class=DeviceClass.AIOT_BSA, **_AIOT_RADIO,
        max_power=BSA_MAX_POWER, data_rate_range=AIOT_DATA_RATE,
        description="Has an energy source. Can independently generate signal.",
        complexity_note="Much lower than NB-IoT devices",
        harvesting_efficiency=RF_HARVESTING_EFFICIENCY),
}

# power as published: upper bounds, and a textual entry for BA
POWER_NOTES = {
    DeviceClass.AIOT_BL: "<= 10uW",
    DeviceClass.AIOT_BA: "Between BL and BSA devices",
    DeviceClass.AIOT_BSA: "<= 10mW",
}

_ARCHITECTURES = (
    ArchitectureRow("LoRaWAN", 25e-3, (10e3, 15e3), (0.3, 5.5)),
    ArchitectureRow("NB-IoT", 200e-3, (5e3, 15e3), (250.0, 250.0)),
    ArchitectureRow("Active A-IoT", 10e-3, (500.0, 500.0), (5.0, 5.0)),
    ArchitectureRow("Battery-free A-IoT", 10e-6, (500.0, 500.0), (5.0, 5.0)),
)

# devices per square metre
_DENSITY_LIMITS = {
    Environment.INDOOR: Fraction(150, 100),
    Environment.OUTDOOR: Fraction(20, 100),
}

_COVERAGE = {
    Environment.INDOOR: (10.0, 50.0),
    Environment.OUTDOOR: (50.0, 500.0),
}


class UnknownDeviceError(KeyError):
    pass


def preset(device_class) -> DeviceProfile:
    """Return the preset for a device class (enum member or its name, e.g. ``"AIOT-BL"``)."""
    try:
        return _PRESETS[DeviceClass(device_class)]
    except ValueError:
        known = ", ".join(c.value for c in DeviceClass)
        raise UnknownDeviceError(f"unknown device class {device_class!r}; known: {known}") from None


def device_names() -> list[str]:
    return [c.value for c in DeviceClass]


def architecture_table() -> list[ArchitectureRow]:
    return list(_ARCHITECTURES)


class DensityCheck(NamedTuple):
    passed: bool
    limit_per_m2: float
    max_devices: float


def density_check(device_count: int, area: float, environment) -> DensityCheck:
    """Check a deployment against the per-area A-IoT device density limit.

    >>> density_check(150, 100.0, "Indoor").passed
    True
    >>> density_check(21, 100.0, "Outdoor")
    DensityCheck(passed=False, limit_per_m2=0.2, max_devices=20.0)
    """
    if not area > 0:
        raise ValueError("area must be positive")
    limit = _DENSITY_LIMITS[Environment(environment)]
    # exact rational comparison so the boundary case is not lost to rounding
    passed = Fraction(device_count) <= limit * Fraction(area)
    return DensityCheck(passed, float(limit), float(limit * Fraction(area)))


def coverage_envelope(environment) -> tuple[float, float]:
    return _COVERAGE[Environment(environment)]
