import math

import numpy as np
import pytest

from sespin import raman, synth
from sespin.errors import ClassificationError, ValidationError
from sespin.spectra import Spectrum
from sespin.units import Quantity

LASERS = (9246.49, 9249.89, 9253.28)
PROMINENCE = 0.3


def make_session(raman_offsets=(), pl_positions=(), seed=0, sigma=0.0, **extra):
    params = {
        "lasers": list(LASERS),
        "raman_offsets": list(raman_offsets),
        "pl_positions": list(pl_positions),
    }
    params.update(extra)
    cfg = synth.SynthConfig(seed=seed, sigma=sigma, params=params)
    return synth.generate("raman", cfg).dataset


def test_single_raman_track():
    session = make_session(raman_offsets=[2223.1])
    tracks = raman.track_features(session, PROMINENCE)
    assert len(tracks) == 1
    track = tracks[0]
    assert track.classification == raman.RAMAN
    assert track.n == 3
    assert track.offset == pytest.approx(2223.1, abs=session.match_tolerance)


def test_single_stationary_track():
    session = make_session(pl_positions=[7000.0])
    tracks = raman.track_features(session, PROMINENCE)
    assert len(tracks) == 1
    assert tracks[0].classification == raman.PHOTOLUMINESCENCE
    assert tracks[0].position == pytest.approx(7000.0, abs=0.1)


def test_mixed_session_classifies_all_three():
    # two shifting features plus one stationary one, as in a two-line
    # Raman region with an unrelated luminescence line
    session = make_session(raman_offsets=[2223.1, 2195.5], pl_positions=[7040.0])
    tracks = raman.track_features(session, PROMINENCE)
    assert len(tracks) == 3
    by_class = {}
    for t in tracks:
        by_class.setdefault(t.classification, []).append(t)
    assert len(by_class[raman.RAMAN]) == 2
    assert len(by_class[raman.PHOTOLUMINESCENCE]) == 1
    offsets = sorted(t.offset for t in by_class[raman.RAMAN])
    assert offsets[0] == pytest.approx(2195.5, abs=0.5)
    assert offsets[1] == pytest.approx(2223.1, abs=0.5)
    assert by_class[raman.PHOTOLUMINESCENCE][0].position == pytest.approx(7040.0, abs=0.5)


def test_mean_offset_statistics():
    track = raman.FeatureTrack(
        spectrum_indices=(0, 1, 2),
        centers=(LASERS[0] - 2223.0, LASERS[1] - 2223.1, LASERS[2] - 2223.2),
        lasers=LASERS,
        classification=raman.RAMAN,
        offset=2223.1,
        offset_std=0.1,
        position=0.0,
        position_std=99.0,
    )
    q = raman.mean_offset(track)
    # arithmetic oracle: mean 2223.1, standard error 0.1/sqrt(3)
    assert q.value == pytest.approx(2223.1, rel=1e-12)
    assert q.uncertainty == pytest.approx(0.1 / math.sqrt(3.0), rel=1e-9)


def test_mean_offset_identical_pair():
    track = raman.FeatureTrack(
        spectrum_indices=(0, 1),
        centers=(9246.49 - 2195.5, 9249.89 - 2195.5),
        lasers=(9246.49, 9249.89),
        classification=raman.RAMAN,
        offset=2195.5,
        offset_std=0.0,
        position=0.0,
        position_std=99.0,
    )
    q = raman.mean_offset(track)
    assert q.value == pytest.approx(2195.5)
    assert q.uncertainty == 0.0


def test_mean_offset_requires_raman_class():
    session = make_session(pl_positions=[7000.0])
    (track,) = raman.track_features(session, PROMINENCE)
    with pytest.raises(ClassificationError):
        raman.mean_offset(track)


def test_offset_agrees_with_absorption_value():
    # cross-check against a directly measured transition energy
    session = make_session(raman_offsets=[2195.5])
    (track,) = raman.track_features(session, PROMINENCE)
    measured = raman.mean_offset(track)
    stated = Quantity(measured.value, 0.5, measured.unit)
    reference = Quantity(2195.4, 0.5, "cm^-1")
    assert stated.consistent_with(reference)


def test_null_search_empty_region():
    # window covers where a 3740 offset would land, but only stationary
    # luminescence lines are present
    session = make_session(pl_positions=[5520.0, 5540.0], lo=5490.0, hi=5560.0)
    results = raman.null_search(session, [3740.0], PROMINENCE)
    assert len(results) == 1
    assert results[0].in_window
    assert not results[0].detected


def test_null_search_planted_peak():
    session = make_session(raman_offsets=[3740.0])
    results = raman.null_search(session, [3740.0], PROMINENCE)
    assert results[0].detected


def test_null_search_out_of_window():
    session = make_session(raman_offsets=[2223.1])
    results = raman.null_search(session, [5000.0], PROMINENCE)
    assert not results[0].detected
    assert not results[0].in_window


def test_translational_covariance():
    session = make_session(raman_offsets=[2223.1], pl_positions=[7040.0])
    shift = 100.0
    shifted = raman.RamanSession(
        laser_energies=tuple(e + shift for e in session.laser_energies),
        spectra=tuple(
            Spectrum(s.wavenumber + shift, s.value, s.kind, s.resolution)
            for s in session.spectra
        ),
        match_tolerance=session.match_tolerance,
    )
    base = raman.track_features(session, PROMINENCE)
    moved = raman.track_features(shifted, PROMINENCE)
    assert [t.classification for t in base] == [t.classification for t in moved]
    for a, b in zip(base, moved):
        if a.classification == raman.RAMAN:
            assert b.offset == pytest.approx(a.offset, abs=1e-6)
        else:
            assert b.position == pytest.approx(a.position + shift, abs=1e-6)


def test_raman_class_stable_under_larger_tolerance():
    session = make_session(raman_offsets=[2223.1])
    for tol in (0.5, 1.0, 2.0):
        relaxed = raman.RamanSession(
            laser_energies=session.laser_energies,
            spectra=session.spectra,
            match_tolerance=tol,
        )
        (track,) = raman.track_features(relaxed, PROMINENCE)
        assert track.classification == raman.RAMAN


def test_shifting_feature_never_classified_stationary():
    # arithmetic progression of lasers with step far above the tolerance
    session = make_session(raman_offsets=[2223.1])
    step = LASERS[1] - LASERS[0]
    assert step > 2.0 * session.match_tolerance
    tracks = raman.track_features(session, PROMINENCE)
    assert all(t.classification != raman.PHOTOLUMINESCENCE for t in tracks)


def test_track_cannot_satisfy_both_hypotheses_with_spread_lasers():
    session = make_session(raman_offsets=[2223.1], pl_positions=[7040.0])
    for t in raman.track_features(session, PROMINENCE):
        both = t.offset_std <= session.match_tolerance and \
            t.position_std <= session.match_tolerance
        assert not both


def test_session_validation():
    wn = np.linspace(0.0, 10.0, 11)
    s = Spectrum(wn, np.ones(11), "luminescence")
    with pytest.raises(ValidationError):
        raman.RamanSession(laser_energies=(1.0,), spectra=(s,))
    with pytest.raises(ValidationError):
        raman.RamanSession(laser_energies=(1.0, 1.0), spectra=(s, s))
    with pytest.raises(ValidationError):
        raman.RamanSession(laser_energies=(1.0, 2.0), spectra=(s,))


def test_no_common_window_rejected():
    a = Spectrum(np.linspace(0.0, 10.0, 11), np.ones(11), "luminescence")
    b = Spectrum(np.linspace(20.0, 30.0, 11), np.ones(11), "luminescence")
    session = raman.RamanSession(laser_energies=(100.0, 105.0), spectra=(a, b),
                                 match_tolerance=0.5)
    with pytest.raises(ValidationError):
        raman.track_features(session, 0.1)


def test_default_tolerance_from_resolution():
    session = make_session(raman_offsets=[2223.1], resolution=0.5)
    assert session.match_tolerance == pytest.approx(0.5)
