import math

import numpy as np
import pytest

from sespin.errors import IncompatibleUnitsError, ValidationError
from sespin.units import CONSTANTS, Quantity, convert, convert_value, supported_units


def test_reduced_planck_is_h_over_two_pi():
    assert CONSTANTS.reduced_planck == CONSTANTS.planck / (2.0 * math.pi)


def test_debye_matches_convention_value_within_1ppm():
    assert abs(CONSTANTS.debye - 3.33564e-30) / 3.33564e-30 < 1e-6


def test_wavenumber_to_mev():
    # E = h c nu~ : direct evaluation is the oracle
    expected_mev = 3444.0 * CONSTANTS.planck * CONSTANTS.speed_of_light * 100.0 \
        / CONSTANTS.electronvolt * 1e3
    got = convert(Quantity(3444.0, 0.0, "cm^-1"), "meV")
    assert got.value == pytest.approx(expected_mev, rel=1e-12)
    assert got.value == pytest.approx(427.0, abs=0.05)


def test_zero_wavenumber_to_hz():
    assert convert(Quantity(0.0, 0.0, "cm^-1"), "Hz").value == 0.0


def test_ghz_to_wavenumber():
    expected = 1.66e9 / (100.0 * CONSTANTS.speed_of_light)
    got = convert_value(1.66, "GHz", "cm^-1")
    assert got == pytest.approx(expected, rel=1e-12)
    assert got == pytest.approx(0.055371, abs=1e-6)


def test_dimensional_mismatch_raises():
    with pytest.raises(IncompatibleUnitsError):
        convert(Quantity(1.0, 0.0, "K"), "Hz")
    with pytest.raises(IncompatibleUnitsError):
        convert(Quantity(1.0, 0.0, "furlong"), "m")


def test_round_trip_all_pairs():
    rng = np.random.default_rng(7)
    groups = {}
    for tag, group in supported_units().items():
        groups.setdefault(group, []).append(tag)
    for tags in groups.values():
        for src in tags:
            for dst in tags:
                value = float(rng.uniform(0.1, 50.0))
                q = Quantity(value, 0.01 * value, src)
                back = convert(convert(q, dst), src)
                assert back.value == pytest.approx(value, rel=1e-12)
                assert back.uncertainty == pytest.approx(q.uncertainty, rel=1e-12)


def test_composition_consistency():
    q = Quantity(3444.0, 0.0, "cm^-1")
    direct = convert(q, "Hz").value
    via_ev = convert(convert(q, "eV"), "Hz").value
    assert via_ev == pytest.approx(direct, rel=1e-12)


def test_wavelength_reciprocal_pair():
    # 2.9 um should land near the 3444 cm^-1 transition energy
    q = Quantity(2.9, 0.0, "um")
    wn = convert(q, "cm^-1")
    assert wn.value == pytest.approx(1e4 / 2.9, rel=1e-12)
    assert convert(wn, "um").value == pytest.approx(2.9, rel=1e-12)
    with pytest.raises(ValidationError):
        convert(Quantity(0.0, 0.0, "m"), "Hz")


def test_quantity_validation():
    with pytest.raises(ValidationError):
        Quantity(1.0, -0.1, "s")
    with pytest.raises(ValidationError):
        Quantity(float("nan"), 0.0, "s")


def test_quantity_add_sub_quadrature():
    a = Quantity(10.0, 3.0, "s")
    b = Quantity(4.0, 4.0, "s")
    total = a + b
    assert total.value == 14.0
    assert total.uncertainty == pytest.approx(5.0)
    diff = a - b
    assert diff.value == 6.0
    assert diff.uncertainty == pytest.approx(5.0)
    with pytest.raises(IncompatibleUnitsError):
        a + Quantity(1.0, 0.0, "K")


def test_quantity_scalar_and_ratio_propagation():
    a = Quantity(8.0, 0.8, "s")  # 10% relative
    assert (a * 2).value == 16.0
    assert (a * 2).uncertainty == pytest.approx(1.6)
    b = Quantity(2.0, 0.2, "s")  # 10% relative
    ratio = a.over(b)
    assert ratio.value == 4.0
    assert ratio.uncertainty == pytest.approx(4.0 * math.hypot(0.1, 0.1))
    prod = a.times(b, unit="s^2")
    assert prod.value == 16.0
    assert prod.unit == "s^2"
    sq = b.power(2)
    assert sq.value == 4.0
    assert sq.uncertainty == pytest.approx(2 * 2.0 * 0.2)


def test_consistency_check_converts_units():
    a = Quantity(1.0, 0.1, "us")
    b = Quantity(1050.0, 60.0, "ns")
    assert a.consistent_with(b)
    assert not a.consistent_with(Quantity(2000.0, 60.0, "ns"))
