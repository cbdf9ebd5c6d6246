import math

import numpy as np
import pytest

from sespin import luminescence
from sespin.errors import DataError, UnphysicalEfficiencyError, ValidationError
from sespin.spectra import PeakRegion, Spectrum
from sespin.synth import gaussian_line
from sespin.units import Quantity

ZPL_CENTER = 3444.0
SIDEBAND_CENTER = 3150.0


def make_pl(sideband_to_zpl=5.6, zpl_area=1.0):
    wn = np.linspace(2700.0, 3600.0, 9001)
    value = gaussian_line(wn, ZPL_CENTER, zpl_area, 2.0)
    value = value + gaussian_line(wn, SIDEBAND_CENTER, sideband_to_zpl * zpl_area, 120.0)
    return Spectrum(wn, value, kind="luminescence", resolution=1.0)


ZPL_REGION = PeakRegion(ZPL_CENTER - 12.0, ZPL_CENTER + 12.0)
SIDEBAND_REGION = PeakRegion(2760.0, 3420.0)


def test_raw_fraction_from_area_ratio():
    analysis = luminescence.zpl_fraction(make_pl(), ZPL_REGION, SIDEBAND_REGION)
    # area ratio 5.6 -> fraction 1/6.6
    assert analysis.zpl_fraction_raw.value == pytest.approx(1.0 / 6.6, abs=2e-3)
    assert analysis.reabsorption_factor == 1.0
    assert analysis.zpl_fraction_corrected.value == analysis.zpl_fraction_raw.value


def test_fractions_sum_to_one():
    analysis = luminescence.zpl_fraction(make_pl(), ZPL_REGION, SIDEBAND_REGION)
    sideband_fraction = analysis.sideband_area.value / (
        analysis.zpl_area.value + analysis.sideband_area.value
    )
    assert analysis.zpl_fraction_raw.value + sideband_fraction == pytest.approx(1.0, rel=1e-12)


def test_zero_absorption_leaves_fraction_unchanged():
    pl = make_pl()
    alpha = Spectrum(pl.wavenumber, np.zeros(pl.wavenumber.size),
                     kind="absorption_coefficient", resolution=1.0)
    analysis = luminescence.zpl_fraction(pl, ZPL_REGION, SIDEBAND_REGION,
                                         zpl_alpha=alpha, path_cm=0.1)
    assert analysis.reabsorption_factor == pytest.approx(1.0, rel=1e-12)
    assert analysis.zpl_fraction_corrected.value == pytest.approx(
        analysis.zpl_fraction_raw.value, rel=1e-12
    )


def test_reabsorption_correction_reaches_16_percent():
    # constant alpha with exp(-alpha l) = 0.947 over the ZPL, so the profile
    # average equals 0.947 independent of the weighting
    mean_t = 0.947
    path = 0.1
    alpha_value = -math.log(mean_t) / path
    pl = make_pl()
    alpha = Spectrum(pl.wavenumber, np.full(pl.wavenumber.size, alpha_value),
                     kind="absorption_coefficient", resolution=1.0)
    analysis = luminescence.zpl_fraction(pl, ZPL_REGION, SIDEBAND_REGION,
                                         zpl_alpha=alpha, path_cm=path)
    assert analysis.reabsorption_factor == pytest.approx(1.0 / mean_t, rel=1e-9)
    # back-solved oracle: corrected = (1/0.947) / (1/0.947 + 5.6)
    expected = (1.0 / mean_t) / (1.0 / mean_t + 5.6)
    assert analysis.zpl_fraction_corrected.value == pytest.approx(expected, abs=2e-3)
    assert 0.15 <= analysis.zpl_fraction_corrected.value <= 0.17
    assert analysis.zpl_fraction_corrected.value >= analysis.zpl_fraction_raw.value


def test_corrected_never_below_raw_for_any_absorption():
    rng = np.random.default_rng(17)
    pl = make_pl()
    for _ in range(5):
        profile = np.abs(rng.normal(0.0, 1.0, pl.wavenumber.size))
        alpha = Spectrum(pl.wavenumber, profile, kind="absorption_coefficient",
                         resolution=1.0)
        analysis = luminescence.zpl_fraction(pl, ZPL_REGION, SIDEBAND_REGION,
                                             zpl_alpha=alpha, path_cm=0.2)
        assert analysis.zpl_fraction_corrected.value >= analysis.zpl_fraction_raw.value


def test_overlapping_regions_rejected():
    with pytest.raises(ValidationError):
        luminescence.zpl_fraction(
            make_pl(), PeakRegion(3400.0, 3460.0), PeakRegion(2760.0, 3420.0)
        )


def test_wrong_kind_rejected():
    pl = make_pl()
    wrong = Spectrum(pl.wavenumber, pl.value, kind="intensity", resolution=1.0)
    with pytest.raises(ValidationError):
        luminescence.zpl_fraction(wrong, ZPL_REGION, SIDEBAND_REGION)


def test_negative_absorption_rejected():
    pl = make_pl()
    alpha = Spectrum(pl.wavenumber, np.full(pl.wavenumber.size, -0.1),
                     kind="absorption_coefficient", resolution=1.0)
    with pytest.raises(DataError):
        luminescence.zpl_fraction(pl, ZPL_REGION, SIDEBAND_REGION,
                                  zpl_alpha=alpha, path_cm=0.1)


def test_sloped_sideband_warns():
    wn = np.linspace(2700.0, 3600.0, 9001)
    value = gaussian_line(wn, ZPL_CENTER, 1.0, 2.0) \
        + gaussian_line(wn, SIDEBAND_CENTER, 5.6, 120.0) \
        + 0.002 * (wn - wn[0])
    pl = Spectrum(wn, value, kind="luminescence", resolution=1.0)
    with pytest.warns(UserWarning, match="baseline drifts"):
        luminescence.zpl_fraction(pl, ZPL_REGION, SIDEBAND_REGION)


def test_total_radiative_lifetime_benchmark():
    tau = luminescence.total_radiative_lifetime(Quantity(5.625, 0.0, "us"), 0.16)
    assert tau.value == pytest.approx(0.90, rel=1e-12)
    assert tau.unit == "us"


def test_total_radiative_lifetime_unit_fraction():
    tau = luminescence.total_radiative_lifetime(Quantity(3.0, 0.1, "us"), 1.0)
    assert tau.value == 3.0


def test_total_radiative_lifetime_linearity():
    full = luminescence.total_radiative_lifetime(Quantity(5.625, 0.0, "us"), 0.16)
    half = luminescence.total_radiative_lifetime(Quantity(5.625, 0.0, "us"), 0.08)
    assert half.value == pytest.approx(full.value / 2.0, rel=1e-12)


def test_rate_bookkeeping_closes():
    tau_zpl = Quantity(5.625, 0.0, "us")
    fraction = 0.16
    tau_total = luminescence.total_radiative_lifetime(tau_zpl, fraction)
    assert tau_total.value / fraction == pytest.approx(tau_zpl.value, rel=1e-12)


def test_total_radiative_lifetime_validation():
    with pytest.raises(ValidationError):
        luminescence.total_radiative_lifetime(Quantity(1.0, 0.0, "us"), 0.0)
    with pytest.raises(ValidationError):
        luminescence.total_radiative_lifetime(Quantity(1.0, 0.0, "us"), 1.5)


def test_efficiency_benchmark():
    result = luminescence.radiative_efficiency(
        Quantity(7.7, 0.4, "ns"), Quantity(0.90, 0.07, "us")
    )
    eta = result.radiative_efficiency
    # arithmetic oracle: 7.7e-9 / 0.90e-6 with quadrature relative errors
    expected = 7.7e-9 / 0.90e-6
    expected_sigma = expected * math.hypot(0.4 / 7.7, 0.07 / 0.90)
    assert eta.value == pytest.approx(expected, rel=1e-12)
    assert eta.uncertainty == pytest.approx(expected_sigma, rel=1e-12)
    assert round(eta.value * 100.0, 2) == 0.86
    assert 0.0007 <= eta.uncertainty <= 0.001


def test_efficiency_equal_lifetimes():
    result = luminescence.radiative_efficiency(
        Quantity(2.0, 0.0, "us"), Quantity(2.0, 0.0, "us")
    )
    assert result.radiative_efficiency.value == 1.0


def test_efficiency_decade_ratio():
    result = luminescence.radiative_efficiency(
        Quantity(7.7, 0.0, "ns"), Quantity(7.7, 0.0, "us")
    )
    assert result.radiative_efficiency.value == pytest.approx(1e-3, rel=1e-12)


def test_efficiency_unphysical():
    with pytest.raises(UnphysicalEfficiencyError):
        luminescence.radiative_efficiency(
            Quantity(2.0, 0.0, "us"), Quantity(1.0, 0.0, "us")
        )
