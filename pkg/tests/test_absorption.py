import math

import pytest

from sespin import absorption
from sespin.errors import ValidationError
from sespin.units import CONSTANTS, Quantity

# benchmark inputs: concentration 5.2(4)e14 cm^-3 over an integrated ZPL
# absorption of 0.839 cm^-2 at 3444 cm^-1 in silicon (n = 3.44)
BENCH = absorption.AbsorptionAnalysis(
    integrated_alpha=Quantity(0.839, 0.0, "cm^-2"),
    concentration=Quantity(5.2e14, 0.4e14, "cm^-3"),
    line_center=3444.0,
    refractive_index=3.44,
    peak_alpha=Quantity(1.0, 0.0, "cm^-1"),
)


def test_conversion_factor_benchmark():
    f = absorption.conversion_factor(BENCH)
    assert f.unit == "cm^-1"
    assert f.value == pytest.approx(5.2e14 / 0.839, rel=1e-12)
    assert abs(f.value - 6.2e14) <= 0.05e14  # rounds to 6.2e14
    assert f.uncertainty == pytest.approx(f.value * (0.4 / 5.2), rel=1e-6)


def test_conversion_factor_homogeneity():
    doubled = absorption.AbsorptionAnalysis(
        integrated_alpha=Quantity(2 * 0.839, 0.0, "cm^-2"),
        concentration=Quantity(2 * 5.2e14, 0.0, "cm^-3"),
    )
    assert absorption.conversion_factor(doubled).value == pytest.approx(
        absorption.conversion_factor(BENCH).value, rel=1e-12
    )


def test_conversion_factor_unit_case():
    unit = absorption.AbsorptionAnalysis(
        integrated_alpha=Quantity(1.0, 0.0, "cm^-2"),
        concentration=Quantity(1.0, 0.0, "cm^-3"),
    )
    assert absorption.conversion_factor(unit).value == 1.0


def test_conversion_factor_times_integral_closes():
    f = absorption.conversion_factor(BENCH)
    assert f.value * BENCH.integrated_alpha.value == pytest.approx(
        BENCH.concentration.value, rel=1e-12
    )


def test_peak_conversion_factor_definition():
    k = absorption.peak_conversion_factor(BENCH)
    assert k.unit == "cm^-2"
    assert k.value == pytest.approx(5.2e14, rel=1e-12)


def test_peak_conversion_factor_scaling():
    doubled_peak = absorption.AbsorptionAnalysis(
        integrated_alpha=BENCH.integrated_alpha,
        concentration=BENCH.concentration,
        peak_alpha=Quantity(2.0, 0.0, "cm^-1"),
    )
    assert absorption.peak_conversion_factor(doubled_peak).value == pytest.approx(
        absorption.peak_conversion_factor(BENCH).value / 2.0, rel=1e-12
    )


def test_peak_conversion_factor_gaussian_lineshape():
    # Gaussian line: peak = area * 2 sqrt(ln2/pi) / fwhm
    fwhm = 0.5
    area = 0.839
    peak = area * 2.0 * math.sqrt(math.log(2.0) / math.pi) / fwhm
    a = absorption.AbsorptionAnalysis(
        integrated_alpha=Quantity(area, 0.0, "cm^-2"),
        concentration=Quantity(5.2e14, 0.0, "cm^-3"),
        peak_alpha=Quantity(peak, 0.0, "cm^-1"),
    )
    k = absorption.peak_conversion_factor(a)
    f = absorption.conversion_factor(a)
    lineshape = area / peak  # fwhm / (2 sqrt(ln2/pi))
    assert k.value == pytest.approx(f.value * lineshape, rel=1e-12)


def test_peak_factor_requires_peak_alpha():
    a = absorption.AbsorptionAnalysis(
        integrated_alpha=Quantity(1.0, 0.0, "cm^-2"),
        concentration=Quantity(1.0, 0.0, "cm^-3"),
    )
    with pytest.raises(ValidationError):
        absorption.peak_conversion_factor(a)


def test_dipole_benchmark_value():
    result = absorption.dipole_moment(BENCH)
    assert result.convention == "medium-index"
    assert result.mu.unit == "D"
    assert abs(result.mu.value - 1.96) <= 0.10 * 1.96
    # relative uncertainty is half the concentration's (integral exact here)
    assert result.mu.uncertainty / result.mu.value == pytest.approx(
        0.5 * 0.4 / 5.2, rel=1e-6
    )


def test_dipole_other_conventions_miss_benchmark():
    for convention in ("none", "lorentz-local-field"):
        result = absorption.dipole_moment(BENCH, convention=convention)
        assert abs(result.mu.value - 1.96) > 0.10 * 1.96


def test_dipole_vanishes_with_integral():
    tiny = absorption.AbsorptionAnalysis(
        integrated_alpha=Quantity(1e-12, 0.0, "cm^-2"),
        concentration=BENCH.concentration,
    )
    assert absorption.dipole_moment(tiny).mu.value < 1e-5


def test_dipole_scaling_laws():
    base = absorption.dipole_moment(BENCH).mu.value
    double_n = absorption.AbsorptionAnalysis(
        integrated_alpha=BENCH.integrated_alpha,
        concentration=Quantity(2 * 5.2e14, 0.0, "cm^-3"),
    )
    assert absorption.dipole_moment(double_n).mu.value ** 2 == pytest.approx(
        base**2 / 2.0, rel=1e-10
    )
    double_alpha = absorption.AbsorptionAnalysis(
        integrated_alpha=Quantity(2 * 0.839, 0.0, "cm^-2"),
        concentration=BENCH.concentration,
    )
    assert absorption.dipole_moment(double_alpha).mu.value ** 2 == pytest.approx(
        base**2 * 2.0, rel=1e-10
    )


def test_emission_rate_follows_nu_cubed_mu_squared():
    # A21 reconstructed from the returned mu must match 1/tau for any center
    for center in (1722.0, 3444.0, 6888.0):
        a = absorption.AbsorptionAnalysis(
            integrated_alpha=BENCH.integrated_alpha,
            concentration=BENCH.concentration,
            line_center=center,
        )
        result = absorption.dipole_moment(a)
        mu_si = result.mu.value * CONSTANTS.debye
        nu0 = CONSTANTS.speed_of_light * center * 100.0
        a21_expected = (
            a.refractive_index
            * 16.0
            * math.pi**3
            * nu0**3
            * mu_si**2
            / (3.0 * CONSTANTS.vacuum_permittivity * CONSTANTS.planck * CONSTANTS.speed_of_light**3)
        )
        assert 1.0 / result.zpl_radiative_lifetime.value == pytest.approx(
            a21_expected, rel=1e-10
        )


def test_analysis_validation():
    with pytest.raises(ValidationError):
        absorption.AbsorptionAnalysis(
            integrated_alpha=Quantity(0.0, 0.0, "cm^-2"),
            concentration=Quantity(1.0, 0.0, "cm^-3"),
        )
    with pytest.raises(ValidationError):
        absorption.AbsorptionAnalysis(
            integrated_alpha=Quantity(1.0, 0.0, "cm^-2"),
            concentration=Quantity(1.0, 0.0, "cm^-3"),
            refractive_index=0.5,
        )
    with pytest.raises(ValidationError):
        absorption.dipole_moment(BENCH, convention="my-own")
