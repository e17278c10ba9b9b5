"""Soil dielectric properties and the above/underground path-loss model.

Losses are positive dB magnitudes throughout.  The composite loss of an
aboveground-to-underground (AG2UG) or underground-to-aboveground (UG2AG)
link is the sum of three parts:

* an above-ground log-distance term with exponent ``gamma`` (1 m reference),
* an underground modified-Friis term, spreading from the in-soil phase
  constant plus ``8.686 * alpha * d`` of attenuation,
* a Fresnel refraction term at normal incidence, which depends on direction.

With a refractive index of three or more in moist soil, the wave leaves the
surface within a few degrees of vertical.  The soil leg is therefore taken
as the burial depth and the air leg as the slant range from the antenna to
the point directly above the tag.

The functions accept numpy arrays where noted so that a whole field of tags
can be evaluated at once.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C0
from scipy.constants import epsilon_0 as EPS0
from scipy.constants import mu_0 as MU0

DEFAULT_FREQUENCY = 915e6
PEPLINSKI_BAND = (0.3e9, 1.3e9)
NEPER_TO_DB = 8.686
REFERENCE_DISTANCE = 1.0


class ModelRangeError(ValueError):
    """Input outside the validity range of a physical model."""


class Direction(str, enum.Enum):
    AG2UG = "AG2UG"
    UG2AG = "UG2AG"


@dataclass(frozen=True)
class SoilProfile:
    """Soil composition and moisture state.

    ``vwc``, ``clay_fraction`` and ``sand_fraction`` are fractions; densities
    are in g/cm^3.  The defaults describe a generic silty clay loam.
    """

    vwc: float
    clay_fraction: float = 0.30
    sand_fraction: float = 0.50
    bulk_density: float = 1.5
    particle_density: float = 2.66

    def __post_init__(self):
        if not 0.0 <= self.vwc <= 1.0:
            raise ValueError(f"vwc must be a fraction in [0, 1], got {self.vwc}")
        if self.clay_fraction < 0 or self.sand_fraction < 0:
            raise ValueError("clay and sand fractions must be non-negative")
        if self.clay_fraction + self.sand_fraction > 1.0:
            raise ValueError("clay_fraction + sand_fraction must not exceed 1")
        if not 0 < self.bulk_density < self.particle_density:
            raise ValueError("need 0 < bulk_density < particle_density")

    def with_vwc(self, vwc: float) -> SoilProfile:
        return SoilProfile(vwc, self.clay_fraction, self.sand_fraction,
                           self.bulk_density, self.particle_density)


@dataclass(frozen=True)
class ComplexPermittivity:
    """Relative permittivity ``eps_real - j*eps_imag``."""

    eps_real: float
    eps_imag: float = 0.0

    def __post_init__(self):
        if not (np.all(np.asarray(self.eps_real) >= 1.0) and np.all(np.asarray(self.eps_imag) >= 0.0)):
            raise ValueError("permittivity needs eps_real >= 1 and eps_imag >= 0")

    @property
    def complex(self):
        return np.asarray(self.eps_real) - 1j * np.asarray(self.eps_imag)


FREE_SPACE = ComplexPermittivity(1.0, 0.0)


@dataclass(frozen=True)
class LinkGeometry:
    """Antenna height, tag burial depth and horizontal offset, all in metres."""

    tx_height: float = 0.3
    tag_depth: float = 0.025
    horizontal_offset: float = 0.0
    frequency: float = DEFAULT_FREQUENCY

    def __post_init__(self):
        if self.tx_height < 0 or self.tag_depth < 0 or self.horizontal_offset < 0:
            raise ValueError("tx_height, tag_depth and horizontal_offset must be >= 0")
        if not self.frequency > 0:
            raise ValueError("frequency must be positive")

    def with_offset(self, offset: float) -> LinkGeometry:
        return LinkGeometry(self.tx_height, self.tag_depth, offset, self.frequency)


def _water_debye(frequency, temperature):
    """Static permittivity and loss of free water at ``temperature`` (deg C)."""
    t = temperature
    eps_w0 = 88.045 - 0.4147 * t + 6.295e-4 * t**2 + 1.075e-5 * t**3
    two_pi_tau = 1.1109e-10 - 3.824e-12 * t + 6.938e-14 * t**2 - 5.096e-16 * t**3
    eps_w_inf = 4.9
    wt = frequency * two_pi_tau
    denom = 1.0 + wt**2
    return eps_w_inf + (eps_w0 - eps_w_inf) / denom, wt * (eps_w0 - eps_w_inf) / denom


def soil_complex_permittivity(soil: SoilProfile, frequency: float = DEFAULT_FREQUENCY,
                              temperature: float = 20.0) -> ComplexPermittivity:
    """Complex relative permittivity of moist soil (Peplinski semi-empirical model).

    Valid for 0.3-1.3 GHz, where the real part carries the linear
    ``1.15 * eps - 0.68`` band correction.

    Parameters
    ----------
    soil : SoilProfile
    frequency : float
        Carrier frequency in Hz.
    temperature : float
        Soil water temperature in deg C.

    Raises
    ------
    ModelRangeError
        If ``frequency`` is outside 0.3-1.3 GHz.
    """
    lo, hi = PEPLINSKI_BAND
    if not lo <= frequency <= hi:
        raise ModelRangeError(
            f"Peplinski dielectric model is valid for {lo / 1e9:.1f}-{hi / 1e9:.1f} GHz, "
            f"got {frequency / 1e9:.4g} GHz")

    mv = soil.vwc
    sand, clay = soil.sand_fraction, soil.clay_fraction
    rho_b, rho_s = soil.bulk_density, soil.particle_density
    alpha = 0.65
    beta_re = 1.2748 - 0.519 * sand - 0.152 * clay
    beta_im = 1.33797 - 0.603 * sand - 0.166 * clay
    sigma_eff = 0.0467 + 0.2204 * rho_b - 0.4111 * sand + 0.6614 * clay
    eps_solid = (1.01 + 0.44 * rho_s) ** 2 - 0.062

    efw_re, efw_im_debye = _water_debye(frequency, temperature)
    re = (1 + rho_b / rho_s * (eps_solid**alpha - 1) + mv**beta_re * efw_re**alpha - mv) ** (1 / alpha)
    re = 1.15 * re - 0.68

    # the conductivity term of the water loss scales as 1/mv; folding it into
    # the mv power keeps vwc = 0 finite
    p = beta_im / alpha
    cond = sigma_eff / (2 * np.pi * EPS0 * frequency) * (rho_s - rho_b) / rho_s
    if mv == 0:
        im = 0.0
    else:
        im = mv**p * efw_im_debye + cond * mv ** (p - 1)
    return ComplexPermittivity(max(float(re), 1.0), float(im))


def propagation_constants(eps: ComplexPermittivity, frequency: float = DEFAULT_FREQUENCY):
    """Attenuation ``alpha`` (Np/m) and phase ``beta`` (rad/m) in a lossy dielectric."""
    omega = 2 * np.pi * frequency
    er = np.asarray(eps.eps_real, dtype=float)
    ei = np.asarray(eps.eps_imag, dtype=float)
    root = np.sqrt(1.0 + (ei / er) ** 2)
    k = omega * np.sqrt(MU0 * EPS0 * er / 2.0)
    alpha = k * np.sqrt(root - 1.0)
    beta = k * np.sqrt(root + 1.0)
    if alpha.ndim == 0:
        return float(alpha), float(beta)
    return alpha, beta


def underground_path_loss(alpha, beta, d_ug):
    """Modified-Friis loss over ``d_ug`` metres of soil, in dB.

    The spreading part ``20 log10(4 pi d / lambda_soil)`` is floored at 0 dB
    so very short segments never produce gain.
    """
    d = np.asarray(d_ug, dtype=float)
    if np.any(d < 0):
        raise ValueError("d_ug must be >= 0")
    beta = np.asarray(beta, dtype=float)
    with np.errstate(divide="ignore"):
        spreading = np.where(d > 0, 20 * np.log10(2 * beta * d), 0.0)
    loss = np.maximum(spreading, 0.0) + NEPER_TO_DB * np.asarray(alpha) * d
    return float(loss) if loss.ndim == 0 else loss


def above_ground_path_loss(d_ag, frequency=DEFAULT_FREQUENCY, gamma=3.0):
    """Log-distance loss ``FSPL(1 m) + 10 gamma log10(d)``, floored at 0 dB."""
    d = np.asarray(d_ag, dtype=float)
    lam = C0 / frequency
    with np.errstate(divide="ignore"):
        loss = 20 * np.log10(4 * np.pi * REFERENCE_DISTANCE / lam) + 10 * gamma * np.log10(d / REFERENCE_DISTANCE)
    loss = np.maximum(loss, 0.0)
    return float(loss) if loss.ndim == 0 else loss


def refraction_loss(eps: ComplexPermittivity, direction: Direction | str):
    """Normal-incidence Fresnel power-transmission loss at the air/soil boundary.

    With ``n`` the complex refractive index of the soil, the transmitted
    power fraction is ``4 Re(n) / |1+n|^2`` going into the soil and
    ``4 |n|^2 / (Re(n) |1+n|^2)`` coming out.  The two coincide for a
    lossless medium.
    """
    direction = Direction(direction)
    n = np.sqrt(eps.complex)
    if direction is Direction.AG2UG:
        t = 4 * n.real / np.abs(1 + n) ** 2
    else:
        t = 4 * np.abs(n) ** 2 / (n.real * np.abs(1 + n) ** 2)
    loss = np.maximum(-10 * np.log10(t), 0.0)
    return float(loss) if np.ndim(loss) == 0 else loss


def split_path(tx_height, tag_depth, horizontal_offset):
    """Air and soil leg lengths ``(d_ag, d_ug)`` in metres.

    Soil is optically dense, so the refracted ray runs almost straight down:
    the soil leg is the burial depth and the air leg runs from the antenna to
    the surface point above the tag.  Works elementwise on arrays.
    """
    return np.hypot(np.asarray(horizontal_offset, dtype=float), tx_height), np.array(tag_depth, dtype=float)


def resolve_permittivity(medium, frequency=DEFAULT_FREQUENCY) -> ComplexPermittivity:
    """Accept either a :class:`SoilProfile` or an explicit permittivity."""
    if isinstance(medium, ComplexPermittivity):
        return medium
    return soil_complex_permittivity(medium, frequency)


def path_loss_components(geometry: LinkGeometry, soil, direction, gamma=3.0):
    """The three dB components ``(above_ground, underground, refraction)``.

    ``soil`` may be a :class:`SoilProfile` or a :class:`ComplexPermittivity`.
    """
    eps = resolve_permittivity(soil, geometry.frequency)
    alpha, beta = propagation_constants(eps, geometry.frequency)
    d_ag, d_ug = split_path(geometry.tx_height, geometry.tag_depth, geometry.horizontal_offset)
    return (above_ground_path_loss(d_ag, geometry.frequency, gamma),
            underground_path_loss(alpha, beta, d_ug),
            refraction_loss(eps, direction))


def composite_path_loss(geometry: LinkGeometry, soil, direction, gamma=3.0) -> float:
    """Total AG2UG or UG2AG path loss in dB."""
    ag, ug, refr = path_loss_components(geometry, soil, direction, gamma)
    return float(ag + ug + refr)
