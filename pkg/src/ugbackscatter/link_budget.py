"""Backscatter link budget for buried tags.

In the dB domain the downlink (exciter to tag) and uplink (tag to reader)
budgets are::

    P_rx,tag  = P_T + G_T + G_tag - L_AG2UG(d1)
    P_rx,read = P_rx,tag + G_tag + G_R + 10 log10(M) - L_UG2AG(d2)

The activation distance is the horizontal offset where ``P_rx,tag`` falls to
the tag threshold; the read distance is where ``P_rx,read`` falls to the
reader sensitivity.  Both are found by bisection on the offset, which is
safe because the composite loss is monotone in the offset.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import bisect

from .device_profiles import DeviceProfile
from .soil_channel import Direction, LinkGeometry, SoilProfile, composite_path_loss, resolve_permittivity

MAX_OFFSET = 10e3
OFFSET_XTOL = 1e-7
TIE_TOLERANCE = 1e-3


class NoSolutionError(ValueError):
    """The threshold cannot be met anywhere in the search bracket."""


class InfeasibleExcitationError(NoSolutionError):
    """Bistatic exciter placed beyond the tag's activation distance."""


class Mode(str, enum.Enum):
    MONOSTATIC = "monostatic"
    BISTATIC = "bistatic"


class LimitingLink(str, enum.Enum):
    DL = "DL"
    UL = "UL"


@dataclass(frozen=True)
class LinkParams:
    p_t: float
    p_thr: float
    sensitivity: float
    m_factor: float
    g_t: float = 6.0
    g_r: float = 6.0
    g_tag: float = -1.0
    gamma: float = 3.0

    def __post_init__(self):
        if not 0 < self.m_factor <= 1:
            raise ValueError(f"m_factor must be in (0, 1], got {self.m_factor}")
        if self.gamma < 2:
            raise ValueError(f"gamma must be >= 2, got {self.gamma}")
        if math.isfinite(self.p_thr) and math.isfinite(self.sensitivity) and not self.p_thr > self.sensitivity:
            raise ValueError("activation threshold must sit above reader sensitivity")

    @classmethod
    def from_device(cls, device: DeviceProfile, **overrides) -> LinkParams:
        """Link parameters for a device preset, with the shared 6 dBi / -1 dBi / gamma 3 defaults."""
        values = dict(p_t=device.p_t, p_thr=device.p_thr,
                      sensitivity=device.sensitivity, m_factor=device.m_factor)
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class Configuration:
    """Monostatic: one antenna excites and reads.  Bistatic: the exciter sits
    at ``exciter_geometry.horizontal_offset`` and the reader offset is solved."""

    kind: Mode = Mode.MONOSTATIC
    exciter_geometry: LinkGeometry = field(default_factory=LinkGeometry)
    reader_geometry: Optional[LinkGeometry] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Mode(self.kind))
        if self.kind is Mode.BISTATIC:
            if self.reader_geometry is None:
                object.__setattr__(self, "reader_geometry", self.exciter_geometry.with_offset(0.0))
            r, e = self.reader_geometry, self.exciter_geometry
            if r.tag_depth != e.tag_depth or r.frequency != e.frequency:
                raise ValueError("exciter and reader must see the same tag depth and frequency")

    @classmethod
    def monostatic(cls, geometry: LinkGeometry | None = None) -> Configuration:
        return cls(Mode.MONOSTATIC, geometry or LinkGeometry())

    @classmethod
    def bistatic(cls, exciter: LinkGeometry | None = None, reader: LinkGeometry | None = None) -> Configuration:
        return cls(Mode.BISTATIC, exciter or LinkGeometry(), reader)


class RangeReport(NamedTuple):
    d_act: float
    d_read: float
    limiting_link: LimitingLink
    effective_range: float


class SweepRow(NamedTuple):
    """One point of a moisture sweep.  ``None`` marks an infeasible distance."""

    vwc: float
    d_act: Optional[float]
    d_read: Optional[float]

    @property
    def effective_range(self) -> Optional[float]:
        if self.d_act is None or self.d_read is None:
            return None
        return min(self.d_act, self.d_read)

    @property
    def limiting_link(self) -> Optional[LimitingLink]:
        if self.d_act is None or self.d_read is None:
            return None
        return _limiting(self.d_act, self.d_read)


def tag_received_power(link: LinkParams, dl_loss: float) -> float:
    """Power at the tag in dBm given a downlink loss in dB."""
    return link.p_t + link.g_t + link.g_tag - dl_loss


def reader_received_power(tag_rx: float, link: LinkParams, ul_loss: float) -> float:
    return tag_rx + link.g_tag + link.g_r + 10 * math.log10(link.m_factor) - ul_loss


def downlink_loss(link, soil, geometry):
    return composite_path_loss(geometry, soil, Direction.AG2UG, link.gamma)


def uplink_loss(link, soil, geometry):
    return composite_path_loss(geometry, soil, Direction.UG2AG, link.gamma)


def _solve_offset(excess, what):
    """Largest offset where the decreasing function ``excess`` is still >= 0."""
    if excess(0.0) < 0:
        raise NoSolutionError(f"{what} threshold not met even at zero horizontal offset")
    lo, hi = 0.0, 1.0
    while excess(hi) >= 0:
        if hi >= MAX_OFFSET:
            raise NoSolutionError(f"{what} threshold still met at {MAX_OFFSET:g} m; no finite crossing")
        lo, hi = hi, min(2 * hi, MAX_OFFSET)
    return bisect(excess, lo, hi, xtol=OFFSET_XTOL, maxiter=200)


def activation_distance(link: LinkParams, soil, base_geometry: LinkGeometry) -> float:
    """Horizontal offset (m) at which the tag power falls to ``link.p_thr``.

    Raises
    ------
    NoSolutionError
        If the tag cannot be woken even directly below the antenna.
    """
    soil = resolve_permittivity(soil, base_geometry.frequency)

    def excess(x):
        return tag_received_power(link, downlink_loss(link, soil, base_geometry.with_offset(x))) - link.p_thr

    return _solve_offset(excess, "activation")


def read_distance(link: LinkParams, soil, config: Configuration) -> float:
    """Horizontal offset (m) at which the backscatter power falls to ``link.sensitivity``.

    Monostatic: the exciter and reader move together.  Bistatic: the exciter
    stays at its configured offset and only the reader offset varies.
    """
    soil = resolve_permittivity(soil, config.exciter_geometry.frequency)
    if config.kind is Mode.MONOSTATIC:
        geom = config.exciter_geometry

        def excess(x):
            g = geom.with_offset(x)
            tag_rx = tag_received_power(link, downlink_loss(link, soil, g))
            return reader_received_power(tag_rx, link, uplink_loss(link, soil, g)) - link.sensitivity

        return _solve_offset(excess, "read")

    exciter = config.exciter_geometry
    d_act = activation_distance(link, soil, exciter.with_offset(0.0))
    if exciter.horizontal_offset > d_act:
        raise InfeasibleExcitationError(
            f"exciter offset {exciter.horizontal_offset:g} m exceeds activation distance {d_act:.4g} m")
    tag_rx = tag_received_power(link, downlink_loss(link, soil, exciter))
    reader = config.reader_geometry

    def excess(x):
        return reader_received_power(tag_rx, link, uplink_loss(link, soil, reader.with_offset(x))) - link.sensitivity

    return _solve_offset(excess, "read")


def _limiting(d_act, d_read):
    # ties within solver tolerance go to the downlink
    return LimitingLink.DL if d_act <= d_read + TIE_TOLERANCE else LimitingLink.UL


def solve_range(link: LinkParams, soil, config: Configuration) -> RangeReport:
    soil = resolve_permittivity(soil, config.exciter_geometry.frequency)
    d_act = activation_distance(link, soil, config.exciter_geometry.with_offset(0.0))
    d_read = read_distance(link, soil, config)
    return RangeReport(d_act, d_read, _limiting(d_act, d_read), min(d_act, d_read))


def sweep_vwc(link: LinkParams, soil_base: SoilProfile, vwc_lo: float, vwc_hi: float,
              steps: int, config: Configuration) -> list[SweepRow]:
    """Activation and read distance over an evenly spaced moisture grid."""
    if not 0 <= vwc_lo < vwc_hi <= 1:
        raise ValueError("need 0 <= vwc_lo < vwc_hi <= 1")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    rows = []
    for vwc in np.linspace(vwc_lo, vwc_hi, steps):
        soil = resolve_permittivity(soil_base.with_vwc(float(vwc)), config.exciter_geometry.frequency)
        try:
            d_act = activation_distance(link, soil, config.exciter_geometry.with_offset(0.0))
        except NoSolutionError:
            d_act = None
        try:
            d_read = read_distance(link, soil, config)
        except NoSolutionError:
            d_read = None
        rows.append(SweepRow(float(vwc), d_act, d_read))
    return rows
