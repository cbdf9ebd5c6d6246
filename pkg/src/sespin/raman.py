"""Classify spectral features as Raman-shifted or photoluminescent.

A feature tracked across spectra taken at several laser energies is
Raman-scattered when its offset below the laser stays constant, and
photoluminescent when its absolute position stays constant.  Tracks are
assembled by greedy nearest-neighbor association under each hypothesis
with a conflict audit (a peak supports at most one track), then classified
by the scatter of the relevant coordinate against the match tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ClassificationError, ValidationError
from .spectra import Spectrum, find_peaks
from .units import Quantity

DEFAULT_TOLERANCE_CM = 0.5  # typical instrument resolution

RAMAN = "raman"
PHOTOLUMINESCENCE = "photoluminescence"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class RamanSession:
    """Spectra taken at >= 2 distinct laser energies plus a match tolerance."""

    laser_energies: tuple
    spectra: tuple
    match_tolerance: float = 0.0  # 0 means "max spectral resolution"

    def __post_init__(self):
        lasers = tuple(float(e) for e in self.laser_energies)
        spectra = tuple(self.spectra)
        if len(lasers) != len(spectra):
            raise ValidationError("need exactly one spectrum per laser energy")
        if len(set(lasers)) < 2:
            raise ValidationError("need at least 2 distinct laser energies")
        for s in spectra:
            if not isinstance(s, Spectrum):
                raise ValidationError("spectra must be Spectrum instances")
        tol = self.match_tolerance
        if tol == 0.0:
            tol = max(s.resolution for s in spectra)
        if not tol > 0:
            raise ValidationError(f"match tolerance must be positive, got {tol}")
        object.__setattr__(self, "laser_energies", lasers)
        object.__setattr__(self, "spectra", spectra)
        object.__setattr__(self, "match_tolerance", tol)


@dataclass(frozen=True)
class FeatureTrack:
    spectrum_indices: tuple
    centers: tuple  # cm^-1, per member spectrum
    lasers: tuple  # cm^-1, per member spectrum
    classification: str
    offset: float  # mean(laser - center)
    offset_std: float  # sample std of (laser - center)
    position: float  # mean(center)
    position_std: float  # sample std of center

    @property
    def n(self) -> int:
        return len(self.centers)


@dataclass(frozen=True)
class NullSearchResult:
    offset: float
    detected: bool
    in_window: bool


def track_features(session: RamanSession, min_prominence: float):
    """Assemble and classify feature tracks across the session's spectra."""
    lasers = session.laser_energies
    spectra = session.spectra
    lo_common = max(s.wavenumber[0] for s in spectra)
    hi_common = min(s.wavenumber[-1] for s in spectra)
    if lo_common >= hi_common:
        raise ValidationError("spectra do not overlap in a common window")
    peaks = []  # (spectrum index, center)
    for i, s in enumerate(spectra):
        for center, _, _ in find_peaks(s, min_prominence):
            peaks.append((i, center))
    tol = session.match_tolerance
    gate = 2.0 * tol

    candidates = []
    for hypothesis in (RAMAN, PHOTOLUMINESCENCE):
        coords = [
            (lasers[i] - c if hypothesis == RAMAN else c, i, c) for (i, c) in peaks
        ]
        candidates.extend(
            (hypothesis, members) for members in _cluster(coords, gate)
        )

    tracks = []
    claimed = set()
    for hypothesis, members in sorted(candidates, key=_candidate_rank):
        keys = {(i, c) for (_, i, c) in members}
        if keys & claimed:
            continue
        claimed |= keys
        tracks.append(_build_track(members, lasers, tol))
    tracks.sort(key=lambda t: t.position)
    return tracks


def _cluster(coords, gate):
    """Greedy clustering of sorted coordinates, one peak per spectrum."""
    clusters = []
    current = []
    for item in sorted(coords):
        coord, idx, _ = item
        if current and (
            coord - current[0][0] > gate or idx in {i for (_, i, _) in current}
        ):
            if len(current) >= 2:
                clusters.append(current)
            current = []
        current.append(item)
    if len(current) >= 2:
        clusters.append(current)
    return clusters


def _candidate_rank(candidate):
    hypothesis, members = candidate
    coords = [c for (c, _, _) in members]
    spread = float(np.std(coords, ddof=1))
    return (spread, -len(members), hypothesis, coords[0])


def _build_track(members, lasers, tol):
    members = sorted(members, key=lambda m: m[1])
    idx = tuple(i for (_, i, _) in members)
    centers = tuple(c for (_, _, c) in members)
    track_lasers = tuple(lasers[i] for i in idx)
    offsets = np.array(track_lasers) - np.array(centers)
    offset_std = float(np.std(offsets, ddof=1))
    position_std = float(np.std(centers, ddof=1))
    is_raman = offset_std <= tol
    is_pl = position_std <= tol
    if is_raman and not is_pl:
        cls = RAMAN
    elif is_pl and not is_raman:
        cls = PHOTOLUMINESCENCE
    else:
        cls = UNCLASSIFIED  # ambiguous (both) or neither
    return FeatureTrack(
        spectrum_indices=idx,
        centers=centers,
        lasers=track_lasers,
        classification=cls,
        offset=float(np.mean(offsets)),
        offset_std=offset_std,
        position=float(np.mean(centers)),
        position_std=position_std,
    )


def mean_offset(track: FeatureTrack) -> Quantity:
    """Mean laser-to-feature offset with its standard error, cm^-1."""
    if track.classification != RAMAN:
        raise ClassificationError(
            f"mean offset requires a raman track, got '{track.classification}'"
        )
    se = track.offset_std / math.sqrt(track.n)
    return Quantity(track.offset, se, "cm^-1")


def null_search(session: RamanSession, expected_offsets, min_prominence: float):
    """Check each expected Raman offset for a matching classified track.

    Offsets whose target positions fall outside every spectrum's window are
    reported with in_window=False (and detected=False).
    """
    tracks = track_features(session, min_prominence)
    raman_offsets = [t.offset for t in tracks if t.classification == RAMAN]
    results = []
    for offset in expected_offsets:
        in_window = any(
            s.wavenumber[0] <= laser - offset <= s.wavenumber[-1]
            for laser, s in zip(session.laser_energies, session.spectra)
        )
        detected = in_window and any(
            abs(o - offset) <= session.match_tolerance for o in raman_offsets
        )
        results.append(NullSearchResult(offset=float(offset), detected=detected, in_window=in_window))
    return results
