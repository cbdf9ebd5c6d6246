"""Single-emitter cavity cooperativity from dipole moment and linewidth.

With the emitter at the mode maximum of a cavity of quality factor Q and
mode volume V (in units of (lambda/n)^3):

    g     = mu sqrt(omega / (2 hbar eps0 n^2 V_abs)),  V_abs = V (lambda/n)^3
    kappa = omega / Q
    gamma = 2 pi c * linewidth(cm^-1)
    C     = 4 g^2 / (kappa gamma)

Dielectric screening enters as n^2 in g (field energy density in the
medium); no additional local-field factor is applied here.  The default
emitter linewidth used by the CLI is the hole-burning upper bound of
0.001 cm^-1; the smaller lifetime-limited value can be passed explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ValidationError
from .units import CONSTANTS, Quantity

HOLE_BURNING_LINEWIDTH_CM = 1e-3  # cm^-1, resolution-limited upper bound
DEFAULT_WAVELENGTH_M = 2.9e-6
SILICON_REFRACTIVE_INDEX = 3.44


@dataclass(frozen=True)
class CavitySpec:
    quality_factor: float
    mode_volume: float = 1.0  # in units of (lambda/n)^3
    wavelength: float = DEFAULT_WAVELENGTH_M  # m, vacuum
    refractive_index: float = SILICON_REFRACTIVE_INDEX

    def __post_init__(self):
        if not self.quality_factor > 0:
            raise ValidationError("quality factor must be positive")
        if not self.mode_volume > 0:
            raise ValidationError("mode volume must be positive")
        if not self.wavelength > 0:
            raise ValidationError("wavelength must be positive")
        if self.refractive_index < 1:
            raise ValidationError("refractive index must be >= 1")

    @property
    def absolute_mode_volume(self) -> float:
        """Mode volume in m^3."""
        return self.mode_volume * (self.wavelength / self.refractive_index) ** 3


@dataclass(frozen=True)
class CooperativityResult:
    g: float  # coupling rate, Hz
    kappa: float  # cavity decay rate, Hz
    gamma: float  # emitter linewidth as a rate, Hz
    cooperativity: float  # C = 4 g^2 / (kappa gamma)


def cooperativity(mu_debye: float, linewidth_cm: float, cav: CavitySpec) -> CooperativityResult:
    """Cooperativity of one emitter at the cavity mode maximum."""
    if not mu_debye > 0:
        raise ValidationError("dipole moment must be positive")
    if not linewidth_cm > 0:
        raise ValidationError("linewidth must be positive")
    mu = mu_debye * CONSTANTS.debye
    n = cav.refractive_index
    omega = 2.0 * math.pi * CONSTANTS.speed_of_light / cav.wavelength
    g_angular = mu * math.sqrt(
        omega
        / (
            2.0
            * CONSTANTS.reduced_planck
            * CONSTANTS.vacuum_permittivity
            * n
            * n
            * cav.absolute_mode_volume
        )
    )
    kappa_angular = omega / cav.quality_factor
    gamma_angular = 2.0 * math.pi * (CONSTANTS.speed_of_light * 100.0) * linewidth_cm
    c_value = 4.0 * g_angular**2 / (kappa_angular * gamma_angular)
    two_pi = 2.0 * math.pi
    return CooperativityResult(
        g=g_angular / two_pi,
        kappa=kappa_angular / two_pi,
        gamma=gamma_angular / two_pi,
        cooperativity=c_value,
    )


def threshold_q(
    mu_debye: float, linewidth_cm: float, cav: CavitySpec, target_c: float
) -> Quantity:
    """Quality factor needed to reach a target cooperativity (C scales as Q)."""
    if not target_c > 0:
        raise ValidationError("target cooperativity must be positive")
    per_unit_q = cooperativity(
        mu_debye, linewidth_cm, replace(cav, quality_factor=1.0)
    ).cooperativity
    return Quantity(target_c / per_unit_q, 0.0, "")
