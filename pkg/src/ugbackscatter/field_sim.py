"""Drive-by reading of tags planted in crop rows.

A sprayer-mounted reader with six monostatic antennas drives along the
rows, covering four rows per pass.  Antennas hang in the three inter-row
gaps of a pass, two per gap, one aimed at each flanking row (the aim is
recorded but no antenna pattern is applied).  At every 0.1 m of travel each
antenna gets its share of read attempts.  Tags that close both links
contend for the attempt's slots through the anti-collision layer, and
identified tags stay silent for the rest of the pass.

Unreported trial conditions such as canopy attenuation and depth scatter
enter as a :class:`LossModifiers` penalty that is added to both
the downlink and the uplink loss.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import NamedTuple, Optional

import numpy as np

from .device_profiles import DeviceProfile
from .link_budget import LinkParams
from .mac_inventory import Scheme, identify_within_window
from .soil_channel import (DEFAULT_FREQUENCY, ComplexPermittivity, Direction, SoilProfile, above_ground_path_loss,
                           propagation_constants, refraction_loss, soil_complex_permittivity,
                           split_path, underground_path_loss)

TRIAL_ROWS = 12
TRIAL_TAGS_PER_ROW = 24
TRIAL_DEPTH = 0.025
CORN_ROW_SPACING = 0.76
MIN_DEPTH = 0.002


class UncoveredRowError(ValueError):
    pass


class TagPosition(NamedTuple):
    row: int       # 1-based
    along: float   # m along the row
    depth: float   # m below the surface


@dataclass(frozen=True)
class FieldLayout:
    rows: int
    row_spacing: float
    tags_per_row: int
    tag_positions: tuple
    moisture_zones: dict  # row (1-based) -> SoilProfile
    irregular: bool = False

    def __post_init__(self):
        if not self.irregular and len(self.tag_positions) != self.rows * self.tags_per_row:
            raise ValueError("tag count must equal rows * tags_per_row for a regular layout")
        if any(p.depth <= 0 for p in self.tag_positions):
            raise ValueError("all tag depths must be positive")
        if any(not 1 <= p.row <= self.rows for p in self.tag_positions):
            raise ValueError("tag row outside the layout")
        missing = set(range(1, self.rows + 1)) - set(self.moisture_zones)
        if missing:
            raise UncoveredRowError(f"no soil profile for rows {sorted(missing)}")

    @property
    def n_tags(self) -> int:
        return len(self.tag_positions)

    def soil_for(self, tag: TagPosition) -> SoilProfile:
        return self.moisture_zones[tag.row]


@dataclass(frozen=True)
class ReaderRig:
    antenna_count: int = 6
    # (lateral m from the first row of the pass, height m above ground)
    antenna_offsets: tuple = tuple((g * CORN_ROW_SPACING + CORN_ROW_SPACING / 2, 0.3)
                                   for g in range(3) for _ in range(2))
    antennas_per_row: int = 2
    rows_per_pass: int = 4
    speed: float = 1.0            # m/s
    dwell_model: float = 10.0     # read attempts per metre travelled
    step: float = 0.1             # trajectory discretisation, m
    slots_per_attempt: int = 16
    scheme: Scheme = Scheme.Q
    q_init: float = 4.0
    run_in: float = 2.0           # travel before the first and after the last tag, m
    frequency: float = DEFAULT_FREQUENCY

    def __post_init__(self):
        if len(self.antenna_offsets) != self.antenna_count:
            raise ValueError("antenna_offsets must list one entry per antenna")
        if not self.speed > 0 or not self.step > 0 or self.dwell_model < 0:
            raise ValueError("speed and step must be positive, dwell_model non-negative")
        if self.rows_per_pass < 1:
            raise ValueError("rows_per_pass must be >= 1")
        object.__setattr__(self, "scheme", Scheme(self.scheme))


@dataclass(frozen=True)
class LossModifiers:
    canopy_loss: float = 0.0   # dB, each direction
    depth_jitter: float = 0.0  # m, std-dev of burial depth
    misc_margin: float = 0.0   # dB, each direction (orientation, detuning)

    def __post_init__(self):
        if self.canopy_loss < 0 or self.depth_jitter < 0:
            raise ValueError("canopy_loss and depth_jitter must be >= 0")

    @property
    def extra_loss(self) -> float:
        return self.canopy_loss + self.misc_margin


@dataclass(frozen=True)
class ModifierBounds:
    canopy_loss: tuple = (0.0, 20.0)
    depth_jitter: tuple = (0.0, 0.02)
    misc_margin: tuple = (0.0, 0.0)

    def __post_init__(self):
        for lo, hi in (self.canopy_loss, self.depth_jitter, self.misc_margin):
            if lo > hi:
                raise ValueError("empty modifier bounds")


class TagOutcome(NamedTuple):
    tag_id: int
    row: int
    activated: bool
    read: bool
    best_margin: float


@dataclass
class TrialResult:
    attempted: int
    unique_reads: int
    per_tag: list
    per_pass_rates: list = field(default_factory=list)

    @property
    def success_rate(self) -> float:
        return self.unique_reads / self.attempted if self.attempted else 0.0


class CalibrationResult(NamedTuple):
    modifiers: LossModifiers
    rate: float
    converged: bool


def moisture_map_from_zones(zone_spec, rows: int = TRIAL_ROWS, base: SoilProfile | None = None) -> dict:
    """Row -> soil profile from ``[((first_row, last_row), vwc), ...]``.

    Row ranges are 1-based and inclusive; later zones override earlier ones.
    """
    base = base or SoilProfile(0.15)
    mapping = {}
    for (first, last), vwc in zone_spec:
        for r in range(first, last + 1):
            mapping[r] = base.with_vwc(vwc)
    missing = [r for r in range(1, rows + 1) if r not in mapping]
    if missing:
        raise UncoveredRowError(f"moisture zones leave rows {missing} uncovered")
    return {r: mapping[r] for r in range(1, rows + 1)}


TRIAL_ZONES = (((1, 4), 0.05), ((5, 8), 0.15), ((9, 12), 0.25))


def trial_preset(tag_spacing: float = 0.5, zones=TRIAL_ZONES) -> tuple[FieldLayout, ReaderRig]:
    """288 tags in 12 corn rows at 2.5 cm, read by a six-antenna, four-row rig.

    Rows sit 0.76 m apart and tags ``tag_spacing`` apart along each row.
    The default moisture split is dry / medium / wet over rows 1-4 / 5-8 / 9-12,
    one zone per pass.
    """
    positions = tuple(TagPosition(r, i * tag_spacing, TRIAL_DEPTH)
                      for r in range(1, TRIAL_ROWS + 1) for i in range(TRIAL_TAGS_PER_ROW))
    layout = FieldLayout(TRIAL_ROWS, CORN_ROW_SPACING, TRIAL_TAGS_PER_ROW, positions,
                         moisture_map_from_zones(zones, TRIAL_ROWS))
    return layout, ReaderRig()


def passes_needed(layout: FieldLayout, rig: ReaderRig) -> int:
    return -(-layout.rows // rig.rows_per_pass)


def _link_arrays(link: LinkParams, eps_re, eps_im, frequency, tx_height, depth, offset, extra):
    """Tag and reader power (dBm) for arrays of monostatic geometries."""
    eps = ComplexPermittivity(eps_re, eps_im)
    alpha, beta = propagation_constants(eps, frequency)
    d_ag, d_ug = split_path(tx_height, depth, offset)
    bulk = above_ground_path_loss(d_ag, frequency, link.gamma) + underground_path_loss(alpha, beta, d_ug)
    dl = bulk + refraction_loss(eps, Direction.AG2UG) + extra
    ul = bulk + refraction_loss(eps, Direction.UG2AG) + extra
    tag_rx = link.p_t + link.g_t + link.g_tag - dl
    reader_rx = tag_rx + link.g_tag + link.g_r + 10 * math.log10(link.m_factor) - ul
    return tag_rx, reader_rx


def _link_for(device, link):
    if link is not None:
        return link
    return LinkParams.from_device(device)


def simulate_pass(layout: FieldLayout, rig: ReaderRig, device: DeviceProfile,
                  modifiers: LossModifiers = LossModifiers(), seed: Optional[int] = None, *,
                  contention: bool = True, link: LinkParams | None = None) -> TrialResult:
    """Drive the rig over every row of ``layout`` and inventory the tags.

    Parameters
    ----------
    seed : int
        Required.  Fixes the depth scatter and every MAC draw.
    contention : bool
        When False every readable tag is identified at its first attempt.
    link : LinkParams, optional
        Overrides the parameters derived from ``device``.
    """
    if seed is None:
        raise ValueError("simulate_pass needs an explicit seed")
    link = _link_for(device, link)
    depth_ss, mac_ss = np.random.SeedSequence(seed).spawn(2)
    depth_rng = np.random.default_rng(depth_ss)
    mac_rng = np.random.default_rng(mac_ss)

    tags = layout.tag_positions
    depth = np.array([t.depth for t in tags])
    if modifiers.depth_jitter > 0:
        depth = depth + depth_rng.normal(0.0, modifiers.depth_jitter, size=depth.size)
    depth = np.maximum(depth, MIN_DEPTH)

    eps_cache = {}
    eps_re = np.empty(len(tags))
    eps_im = np.empty(len(tags))
    for i, t in enumerate(tags):
        soil = layout.soil_for(t)
        if soil not in eps_cache:
            eps_cache[soil] = soil_complex_permittivity(soil, rig.frequency)
        eps_re[i], eps_im[i] = eps_cache[soil].eps_real, eps_cache[soil].eps_imag

    rows = np.array([t.row for t in tags])
    along = np.array([t.along for t in tags])
    lateral = (rows - 1) * layout.row_spacing

    activated = np.zeros(len(tags), dtype=bool)
    read = np.zeros(len(tags), dtype=bool)
    margin = np.full(len(tags), -np.inf)
    per_pass = []
    attempts_per_step = rig.dwell_model * rig.step

    for p in range(passes_needed(layout, rig)):
        first_row = p * rig.rows_per_pass + 1
        in_pass = np.flatnonzero((rows >= first_row) & (rows < first_row + rig.rows_per_pass))
        if in_pass.size == 0:
            per_pass.append(0.0)
            continue
        x0 = along[in_pass].min() - rig.run_in
        x1 = along[in_pass].max() + rig.run_in
        track = np.arange(x0, x1 + rig.step / 2, rig.step)
        ant_lat = np.array([(first_row - 1) * layout.row_spacing + off for off, _ in rig.antenna_offsets])
        ant_h = np.array([h for _, h in rig.antenna_offsets])

        # shape (steps, antennas, tags)
        offset = np.hypot(lateral[in_pass][None, None, :] - ant_lat[None, :, None],
                          along[in_pass][None, None, :] - track[:, None, None])
        tag_rx, reader_rx = _link_arrays(
            link, eps_re[in_pass], eps_im[in_pass], rig.frequency,
            ant_h[None, :, None], depth[in_pass][None, None, :], offset, modifiers.extra_loss)
        awake = tag_rx >= link.p_thr
        readable = awake & (reader_rx >= link.sensitivity)
        with np.errstate(invalid="ignore"):
            m = np.minimum(tag_rx - link.p_thr, reader_rx - link.sensitivity)
        m = np.where(np.isnan(m), -np.inf, m)
        activated[in_pass] |= awake.any(axis=(0, 1))
        margin[in_pass] = np.maximum(margin[in_pass], m.max(axis=(0, 1)))

        done = np.zeros(in_pass.size, dtype=bool)
        credit = 0.0
        for k in range(track.size):
            credit += attempts_per_step
            n_attempts = int(math.floor(credit + 1e-9))
            credit -= n_attempts
            for _ in range(n_attempts):
                for a in range(rig.antenna_count):
                    cand = np.flatnonzero(readable[k, a] & ~done)
                    if cand.size == 0:
                        continue
                    if not contention:
                        done[cand] = True
                        continue
                    got = identify_within_window(cand, rig.slots_per_attempt, rig.scheme, mac_rng,
                                                 q_init=rig.q_init)
                    done[list(got)] = True
        read[in_pass] = done
        per_pass.append(float(done.mean()))

    per_tag = [TagOutcome(i, int(rows[i]), bool(activated[i]), bool(read[i]), float(margin[i]))
               for i in range(len(tags))]
    return TrialResult(len(tags), int(read.sum()), per_tag, per_pass)


def derive_seeds(master: int, n: int) -> list[int]:
    """``n`` independent run seeds derived from one master seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(master).spawn(n)]


def mean_success_rate(layout, rig, device, modifiers, seed: int, n_seeds: int = 20, **kwargs) -> float:
    rates = [simulate_pass(layout, rig, device, modifiers, s, **kwargs).success_rate
             for s in derive_seeds(seed, n_seeds)]
    return float(np.mean(rates))


def calibrate_modifiers(target_rate: float, layout: FieldLayout, rig: ReaderRig, device: DeviceProfile,
                        bounds: ModifierBounds = ModifierBounds(), seed: int = 0, *,
                        n_seeds: int = 20, tol: float = 0.02, jitter_levels: int = 5,
                        max_iter: int = 14) -> CalibrationResult:
    """Fit loss modifiers so the seed-averaged success rate hits ``target_rate``.

    ``misc_margin`` acts exactly like ``canopy_loss`` in the link, so it is
    pinned at its lower bound.  For each depth-jitter level (low to high) the
    canopy loss is bisected, relying on the rate falling as loss grows.  The
    first point within ``tol`` is returned; otherwise the closest point seen
    comes back with ``converged=False``.
    """
    if not 0 < target_rate <= 1:
        raise ValueError("target_rate must be in (0, 1]")
    misc = bounds.misc_margin[0]
    c_lo_b, c_hi_b = bounds.canopy_loss
    j_lo, j_hi = bounds.depth_jitter
    jitters = np.unique(np.linspace(j_lo, j_hi, jitter_levels))

    best = None

    def evaluate(canopy, jitter):
        nonlocal best
        mods = LossModifiers(float(canopy), float(jitter), misc)
        rate = mean_success_rate(layout, rig, device, mods, seed, n_seeds)
        if best is None or abs(rate - target_rate) < abs(best.rate - target_rate):
            best = CalibrationResult(mods, rate, abs(rate - target_rate) <= tol)
        return rate

    for jitter in jitters:
        lo, hi = c_lo_b, c_hi_b
        r_lo = evaluate(lo, jitter)
        if best.converged:
            return best
        if r_lo < target_rate:
            continue
        r_hi = evaluate(hi, jitter)
        if best.converged:
            return best
        if r_hi > target_rate:
            continue
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            r = evaluate(mid, jitter)
            if best.converged:
                return best
            if r > target_rate:
                lo = mid
            else:
                hi = mid
    return best._replace(converged=False)


def load_calibrated_modifiers() -> LossModifiers:
    """The modifiers fitted to the trial's 53.9 % read rate (shipped fixture)."""
    data = json.loads(resources.files(__package__).joinpath("data/calibrated_modifiers.json").read_text())
    return LossModifiers(**{k: data[k] for k in ("canopy_loss", "depth_jitter", "misc_margin")})


def disable_thresholds(device: DeviceProfile) -> DeviceProfile:
    return dataclasses.replace(device, p_thr=-math.inf, sensitivity=-math.inf)


def disable_transmit(device: DeviceProfile) -> DeviceProfile:
    return dataclasses.replace(device, p_t=-math.inf)
