"""Dipole moment and concentration conversion factors from ZPL absorption.

The transition dipole moment follows the standard integrated-cross-section
route: the integrated absorption coefficient per absorber relates to the
stimulated coefficient of the line, and the spontaneous rate follows by
detailed balance at the line center.  In SI, with nu~ the wavenumber in
m^-1 and F the medium convention factor,

    mu^2 = 3 eps0 h c F * (integral alpha d nu~) / (2 pi^2 nu~0 N)
    A21  = G * 16 pi^3 nu0^3 mu^2 / (3 eps0 h c^3),   nu0 = c nu~0

Convention factors (selectable, recorded in reports):

    "none"                F = 1,              G = 1      bare vacuum relations
    "medium-index"        F = n,              G = n      beam speed c/n and
                                                         medium photon density
                                                         of states, no local
                                                         field correction
    "lorentz-local-field" F = n/Lf^2, G = n*Lf^2, Lf = (n^2+2)/3

"medium-index" is the default: it is the convention that reproduces the
known 77Se+ benchmark (mu = 1.96 D from N = 5.2e14 cm^-3 and
f = 6.2e14 cm^-1) and is the textbook result for a dilute absorber in a
homogeneous dielectric.  Degeneracies of the two levels are taken equal;
that assumption is flagged in report metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .units import CONSTANTS, Quantity

SILICON_REFRACTIVE_INDEX = 3.44  # at 2.9 um
DEFAULT_LINE_CENTER_CM = 3444.0  # cm^-1 (~427 meV)
DEFAULT_CONVENTION = "medium-index"
CONVENTIONS = ("none", "medium-index", "lorentz-local-field")


@dataclass(frozen=True)
class AbsorptionAnalysis:
    """Inputs for the dipole/conversion-factor computations.

    integrated_alpha in cm^-2, concentration in cm^-3, line_center in cm^-1,
    peak_alpha (optional) in cm^-1.
    """

    integrated_alpha: Quantity
    concentration: Quantity
    line_center: float = DEFAULT_LINE_CENTER_CM
    refractive_index: float = SILICON_REFRACTIVE_INDEX
    peak_alpha: Quantity | None = None

    def __post_init__(self):
        if not self.integrated_alpha.value > 0:
            raise ValidationError("integrated_alpha must be positive")
        if not self.concentration.value > 0:
            raise ValidationError("concentration must be positive")
        if not self.line_center > 0:
            raise ValidationError("line_center must be positive")
        if self.refractive_index < 1:
            raise ValidationError("refractive_index must be >= 1")
        if self.peak_alpha is not None and not self.peak_alpha.value > 0:
            raise ValidationError("peak_alpha must be positive when given")


@dataclass(frozen=True)
class DipoleResult:
    mu: Quantity  # Debye
    zpl_radiative_lifetime: Quantity  # s
    convention: str


def conversion_factor(a: AbsorptionAnalysis) -> Quantity:
    """f = concentration / integrated absorption coefficient, in cm^-1."""
    return a.concentration.over(a.integrated_alpha, unit="cm^-1")


def peak_conversion_factor(a: AbsorptionAnalysis) -> Quantity:
    """k = concentration / peak absorption coefficient, in cm^-2."""
    if a.peak_alpha is None:
        raise ValidationError("peak_alpha is required for the peak conversion factor")
    return a.concentration.over(a.peak_alpha, unit="cm^-2")


def _convention_factors(n: float, convention: str):
    if convention not in CONVENTIONS:
        raise ValidationError(
            f"unknown convention '{convention}', expected one of {CONVENTIONS}"
        )
    if convention == "none":
        return 1.0, 1.0
    lf = (n * n + 2.0) / 3.0
    if convention == "medium-index":
        return n, n
    return n / lf**2, n * lf**2


def dipole_moment(a: AbsorptionAnalysis, convention: str = DEFAULT_CONVENTION) -> DipoleResult:
    """Transition dipole moment (Debye) and the line's radiative lifetime."""
    n = a.refractive_index
    f_abs, g_emit = _convention_factors(n, convention)
    int_alpha_si = a.integrated_alpha.value * 1e4  # cm^-2 -> m^-2
    n_si = a.concentration.value * 1e6  # cm^-3 -> m^-3
    nu_tilde = a.line_center * 100.0  # cm^-1 -> m^-1
    c = CONSTANTS.speed_of_light
    mu_sq = (
        3.0
        * CONSTANTS.vacuum_permittivity
        * CONSTANTS.planck
        * c
        * f_abs
        * int_alpha_si
        / (2.0 * math.pi**2 * nu_tilde * n_si)
    )
    mu_si = math.sqrt(mu_sq)
    rel = 0.5 * math.hypot(
        _rel(a.integrated_alpha), _rel(a.concentration)
    )  # mu ~ (int_alpha / N)^(1/2)
    mu = Quantity(mu_si / CONSTANTS.debye, mu_si / CONSTANTS.debye * rel, "D")

    nu0 = c * nu_tilde
    a21 = (
        g_emit
        * 16.0
        * math.pi**3
        * nu0**3
        * mu_sq
        / (3.0 * CONSTANTS.vacuum_permittivity * CONSTANTS.planck * c**3)
    )
    tau = 1.0 / a21
    lifetime = Quantity(tau, tau * 2.0 * rel, "s")  # A21 ~ mu^2
    return DipoleResult(mu=mu, zpl_radiative_lifetime=lifetime, convention=convention)


def _rel(q: Quantity) -> float:
    return q.uncertainty / abs(q.value) if q.uncertainty else 0.0
