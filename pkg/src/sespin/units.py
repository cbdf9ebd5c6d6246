"""Physical constants and unit conversions.

Every module computes internally in SI.  Boundary units (wavenumbers,
Debye, meV, minutes, ...) exist only at the edges, converted through the
tables below.  Only the unit pairs this toolkit actually needs are
supported; this is deliberately not a general dimensional-analysis engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import IncompatibleUnitsError, ValidationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values, SI units, full published precision."""

    bohr_magneton: float = 9.2740100783e-24        # J/T
    nuclear_magneton: float = 5.0507837461e-27     # J/T
    planck: float = 6.62607015e-34                 # J*s (exact)
    reduced_planck: float = 6.62607015e-34 / TWO_PI  # J*s, h/2pi to machine precision
    boltzmann: float = 1.380649e-23                # J/K (exact)
    speed_of_light: float = 299792458.0            # m/s (exact)
    vacuum_permittivity: float = 8.8541878128e-12  # F/m
    debye: float = 1.0e-21 / 299792458.0           # C*m per Debye (convention value)
    electronvolt: float = 1.602176634e-19          # J per eV (exact)


CONSTANTS = PhysicalConstants()

_C = CONSTANTS.speed_of_light

# Dimension groups.  Canonical units: Hz (photon energy), T (field),
# s (time), K (temperature), C*m (dipole), "" (dimensionless).
_PHOTON = "photon_energy"
_FIELD = "magnetic_field"
_TIME = "time"
_TEMP = "temperature"
_DIPOLE = "dipole"

# tag -> (group, factor); canonical = value * factor
_LINEAR = {
    "Hz": (_PHOTON, 1.0),
    "kHz": (_PHOTON, 1e3),
    "MHz": (_PHOTON, 1e6),
    "GHz": (_PHOTON, 1e9),
    "THz": (_PHOTON, 1e12),
    "cm^-1": (_PHOTON, 100.0 * _C),
    "eV": (_PHOTON, CONSTANTS.electronvolt / CONSTANTS.planck),
    "meV": (_PHOTON, 1e-3 * CONSTANTS.electronvolt / CONSTANTS.planck),
    "ueV": (_PHOTON, 1e-6 * CONSTANTS.electronvolt / CONSTANTS.planck),
    "J": (_PHOTON, 1.0 / CONSTANTS.planck),
    "T": (_FIELD, 1.0),
    "mT": (_FIELD, 1e-3),
    "uT": (_FIELD, 1e-6),
    "G": (_FIELD, 1e-4),
    "s": (_TIME, 1.0),
    "ms": (_TIME, 1e-3),
    "us": (_TIME, 1e-6),
    "ns": (_TIME, 1e-9),
    "min": (_TIME, 60.0),
    "h": (_TIME, 3600.0),
    "K": (_TEMP, 1.0),
    "D": (_DIPOLE, CONSTANTS.debye),
    "C*m": (_DIPOLE, 1.0),
}

# Wavelength tags: canonical = factor / value (reciprocal pairs).
_RECIPROCAL = {
    "m": (_PHOTON, _C),
    "um": (_PHOTON, _C * 1e6),
    "nm": (_PHOTON, _C * 1e9),
}

_ALIASES = {"cm-1": "cm^-1", "1/cm": "cm^-1", "hours": "h", "µs": "us", "µm": "um"}


def _lookup(tag: str):
    tag = _ALIASES.get(tag, tag)
    if tag in _LINEAR:
        group, factor = _LINEAR[tag]
        return group, factor, False
    if tag in _RECIPROCAL:
        group, factor = _RECIPROCAL[tag]
        return group, factor, True
    return None


@dataclass(frozen=True)
class Quantity:
    """A value with a 1-sigma uncertainty and a unit tag.

    Arithmetic propagates uncertainty in quadrature, treating operands as
    independent.  Unit tags are free strings; only tags in the conversion
    tables can be converted.
    """

    value: float
    uncertainty: float = 0.0
    unit: str = ""

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValidationError(f"quantity value must be finite, got {self.value}")
        if not math.isfinite(self.uncertainty) or self.uncertainty < 0:
            raise ValidationError(
                f"uncertainty must be finite and >= 0, got {self.uncertainty}"
            )

    def to(self, unit: str) -> "Quantity":
        return convert(self, unit)

    def __add__(self, other: "Quantity") -> "Quantity":
        self._require_same_unit(other, "+")
        return Quantity(
            self.value + other.value,
            math.hypot(self.uncertainty, other.uncertainty),
            self.unit,
        )

    def __sub__(self, other: "Quantity") -> "Quantity":
        self._require_same_unit(other, "-")
        return Quantity(
            self.value - other.value,
            math.hypot(self.uncertainty, other.uncertainty),
            self.unit,
        )

    def __mul__(self, scalar) -> "Quantity":
        s = float(scalar)
        return Quantity(self.value * s, self.uncertainty * abs(s), self.unit)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Quantity":
        s = float(scalar)
        return Quantity(self.value / s, self.uncertainty / abs(s), self.unit)

    def times(self, other: "Quantity", unit: str = "") -> "Quantity":
        """Product of two independent quantities; caller names the unit."""
        value = self.value * other.value
        sigma = abs(value) * math.hypot(
            _rel(self.uncertainty, self.value), _rel(other.uncertainty, other.value)
        )
        return Quantity(value, sigma, unit)

    def over(self, other: "Quantity", unit: str = "") -> "Quantity":
        """Quotient of two independent quantities; caller names the unit."""
        value = self.value / other.value
        sigma = abs(value) * math.hypot(
            _rel(self.uncertainty, self.value), _rel(other.uncertainty, other.value)
        )
        return Quantity(value, sigma, unit)

    def power(self, exponent: float, unit: str = "") -> "Quantity":
        value = self.value**exponent
        sigma = abs(value * exponent) * _rel(self.uncertainty, self.value)
        return Quantity(value, sigma, unit)

    def consistent_with(self, other: "Quantity", nsigma: float = 1.0) -> bool:
        """True when the two values agree within the combined uncertainty."""
        o = other.to(self.unit) if other.unit != self.unit else other
        combined = math.hypot(self.uncertainty, o.uncertainty)
        return abs(self.value - o.value) <= nsigma * combined

    def _require_same_unit(self, other, op):
        if self.unit != other.unit:
            raise IncompatibleUnitsError(
                f"cannot apply '{op}' between units '{self.unit}' and '{other.unit}'"
            )

    def __str__(self):
        return f"{self.value:g} +/- {self.uncertainty:g} {self.unit}".rstrip()


def _rel(sigma, value):
    if sigma == 0.0:
        return 0.0
    if value == 0.0:
        raise ValidationError("relative uncertainty undefined for zero value")
    return abs(sigma / value)


def convert(q: Quantity, target_unit: str) -> Quantity:
    """Convert a quantity to a compatible unit.

    Linear pairs rescale value and uncertainty by one exact factor.
    Wavelength pairs are reciprocal; uncertainty propagates first-order.
    """
    if q.unit == target_unit:
        return Quantity(q.value, q.uncertainty, q.unit)
    src = _lookup(q.unit)
    dst = _lookup(target_unit)
    if src is None:
        raise IncompatibleUnitsError(f"unknown or non-convertible unit '{q.unit}'")
    if dst is None:
        raise IncompatibleUnitsError(f"unknown or non-convertible unit '{target_unit}'")
    if src[0] != dst[0]:
        raise IncompatibleUnitsError(
            f"cannot convert '{q.unit}' ({src[0]}) to '{target_unit}' ({dst[0]})"
        )
    value, sigma = _to_canonical(q.value, q.uncertainty, src)
    value, sigma = _from_canonical(value, sigma, dst)
    return Quantity(value, sigma, target_unit)


def convert_value(value: float, unit: str, target_unit: str) -> float:
    return convert(Quantity(value, 0.0, unit), target_unit).value


def _to_canonical(value, sigma, info):
    _, factor, reciprocal = info
    if not reciprocal:
        return value * factor, sigma * factor
    if value == 0.0:
        raise ValidationError("cannot convert zero through a reciprocal unit pair")
    return factor / value, sigma * factor / value**2


def _from_canonical(value, sigma, info):
    _, factor, reciprocal = info
    if not reciprocal:
        return value / factor, sigma / factor
    if value == 0.0:
        raise ValidationError("cannot convert zero through a reciprocal unit pair")
    return factor / value, sigma * factor / value**2


def supported_units() -> dict:
    """Unit tag -> dimension group, for CLI help and tests."""
    table = {tag: group for tag, (group, _) in _LINEAR.items()}
    table.update({tag: group for tag, (group, _) in _RECIPROCAL.items()})
    return table
