"""Two-beam FTIR spectra: absorption coefficients, baselines, peaks, integrals.

A Spectrum is an ordered (wavenumber, value) series tagged with what it
holds (raw intensity, an absorption coefficient, or luminescence) and the
instrument resolution.  File format: UTF-8 CSV with header
``wavenumber_cm-1,value``; the loader also accepts two-column
whitespace-separated text.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import BoundsError, DataError, ValidationError
from .units import Quantity

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

KINDS = ("intensity", "absorption_coefficient", "luminescence")


@dataclass(frozen=True)
class Spectrum:
    wavenumber: np.ndarray  # cm^-1, strictly ascending
    value: np.ndarray
    kind: str = "intensity"
    resolution: float = 0.0  # cm^-1; 0 means "use the median grid spacing"

    def __post_init__(self):
        wn = np.asarray(self.wavenumber, dtype=float)
        val = np.asarray(self.value, dtype=float)
        if wn.ndim != 1 or wn.size < 2:
            raise ValidationError("spectrum needs at least 2 points")
        if val.shape != wn.shape:
            raise ValidationError("wavenumber and value lengths differ")
        if not np.all(np.diff(wn) > 0):
            raise ValidationError("wavenumber grid must be strictly ascending")
        if self.kind not in KINDS:
            raise ValidationError(f"kind must be one of {KINDS}, got '{self.kind}'")
        spacing = float(np.median(np.diff(wn)))
        res = self.resolution if self.resolution > 0 else spacing
        if res > 10.0 * spacing * (1.0 + 1e-9):
            raise ValidationError(
                f"resolution {res} exceeds 10x the median grid spacing {spacing}"
            )
        object.__setattr__(self, "wavenumber", wn)
        object.__setattr__(self, "value", val)
        object.__setattr__(self, "resolution", res)

    @property
    def grid_spacing(self) -> float:
        return float(np.median(np.diff(self.wavenumber)))

    def window(self, lo: float, hi: float) -> np.ndarray:
        return (self.wavenumber >= lo) & (self.wavenumber <= hi)


@dataclass(frozen=True)
class PeakRegion:
    """Integration bounds with a constant or linear local baseline."""

    lo: float
    hi: float
    baseline: str = "constant"  # or "linear"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValidationError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.baseline not in ("constant", "linear"):
            raise ValidationError(f"baseline must be constant or linear, got '{self.baseline}'")

    def overlaps(self, other: "PeakRegion") -> bool:
        return self.lo < other.hi and other.lo < self.hi


def absorption_coefficient(sample: Spectrum, reference: Spectrum, length_cm: float) -> Spectrum:
    """alpha = -(1/L) ln(I_s / I_0) in cm^-1 on the sample grid.

    Reference intensities must be positive (error names the first offending
    index).  Non-positive sample intensities are saturated points: excluded
    from the output with a warning rather than clamped.  A mismatched
    reference grid is linearly resampled and must cover at least 90% of the
    sample range.
    """
    if sample.kind != "intensity" or reference.kind != "intensity":
        raise ValidationError("absorption_coefficient needs two intensity spectra")
    if not length_cm > 0:
        raise ValidationError(f"path length must be positive, got {length_cm}")
    wn = sample.wavenumber
    i_s = sample.value
    if reference.wavenumber.shape == wn.shape and np.allclose(
        reference.wavenumber, wn, rtol=0, atol=1e-12
    ):
        i_0 = reference.value
    else:
        lo = max(wn[0], reference.wavenumber[0])
        hi = min(wn[-1], reference.wavenumber[-1])
        span = wn[-1] - wn[0]
        if hi <= lo or (hi - lo) < 0.9 * span:
            raise DataError(
                "reference grid covers less than 90% of the sample range"
            )
        keep = (wn >= lo) & (wn <= hi)
        wn = wn[keep]
        i_s = i_s[keep]
        i_0 = np.interp(wn, reference.wavenumber, reference.value)
    bad_ref = np.flatnonzero(i_0 <= 0)
    if bad_ref.size:
        raise DataError(
            f"non-positive reference intensity at index {int(bad_ref[0])} "
            f"(wavenumber {wn[bad_ref[0]]:.6g} cm^-1)"
        )
    saturated = i_s <= 0
    if np.any(saturated):
        warnings.warn(
            f"excluding {int(np.sum(saturated))} saturated (non-positive) sample points",
            stacklevel=2,
        )
        wn = wn[~saturated]
        i_s = i_s[~saturated]
        i_0 = i_0[~saturated]
    if wn.size < 2:
        raise DataError("fewer than 2 usable points after exclusions")
    alpha = -np.log(i_s / i_0) / length_cm
    return Spectrum(wn, alpha, kind="absorption_coefficient", resolution=sample.resolution)


def estimate_baseline(s: Spectrum, region: PeakRegion):
    """Baseline over a region from flanking windows of width 3x resolution.

    Returns (baseline values on the in-region grid, noise std of the flanks).
    Falls back to a zero baseline with a warning when both flanks are empty.
    """
    width = 3.0 * s.resolution
    left = s.window(region.lo - width, np.nextafter(region.lo, -np.inf))
    right = s.window(np.nextafter(region.hi, np.inf), region.hi + width)
    flank = left | right
    inside = s.window(region.lo, region.hi)
    x_in = s.wavenumber[inside]
    if not np.any(flank):
        warnings.warn(
            "no flanking points for baseline estimate; assuming zero baseline",
            stacklevel=2,
        )
        return np.zeros(x_in.size), 0.0
    xf = s.wavenumber[flank]
    yf = s.value[flank]
    if region.baseline == "linear" and np.any(left) and np.any(right):
        coeffs = np.polyfit(xf, yf, 1)
        base = np.polyval(coeffs, x_in)
        noise = float(np.std(yf - np.polyval(coeffs, xf)))
    else:
        level = float(np.mean(yf))
        base = np.full(x_in.size, level)
        noise = float(np.std(yf - level))
    return base, noise


def integrate_line(s: Spectrum, region: PeakRegion) -> Quantity:
    """Trapezoidal integral of (value - baseline) over [lo, hi].

    Region endpoints are included by linear interpolation so adjacent
    regions tile exactly.  The uncertainty is a noise estimate from the
    flanking-window scatter.
    """
    if region.lo < s.wavenumber[0] or region.hi > s.wavenumber[-1]:
        raise BoundsError(
            f"region [{region.lo}, {region.hi}] exceeds spectrum range "
            f"[{s.wavenumber[0]}, {s.wavenumber[-1]}]"
        )
    base, noise = estimate_baseline(s, region)
    inside = s.window(region.lo, region.hi)
    x = s.wavenumber[inside]
    y = s.value[inside] - base
    # Interpolate exact endpoint values (baseline-corrected) when the bounds
    # fall between grid points.
    xs, ys = [x], [y]
    if x.size == 0 or x[0] > region.lo:
        y_lo = np.interp(region.lo, s.wavenumber, s.value) - _baseline_at(s, region, region.lo)
        xs.insert(0, [region.lo])
        ys.insert(0, [y_lo])
    if x.size == 0 or x[-1] < region.hi:
        y_hi = np.interp(region.hi, s.wavenumber, s.value) - _baseline_at(s, region, region.hi)
        xs.append([region.hi])
        ys.append([y_hi])
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    area = float(_trapezoid(y, x))
    sigma = noise * np.sqrt(max(x.size, 1)) * float(np.mean(np.diff(x))) if x.size > 1 else 0.0
    return Quantity(area, sigma, "")


def _baseline_at(s: Spectrum, region: PeakRegion, x0: float) -> float:
    base, _ = estimate_baseline(s, region)
    inside = s.window(region.lo, region.hi)
    x = s.wavenumber[inside]
    if x.size == 0:
        return 0.0
    if x.size == 1:
        return float(base[0])
    return float(np.interp(x0, x, base))


def find_peaks(s: Spectrum, min_prominence: float):
    """Local maxima with prominence >= min_prominence.

    Centers are refined by a parabola through the three points around each
    maximum; FWHM is measured by linear interpolation at half prominence.
    Returns a list of (center, height, fwhm) tuples; an empty list is valid.
    """
    if not min_prominence > 0:
        raise ValidationError(f"min_prominence must be positive, got {min_prominence}")
    x = s.wavenumber
    y = s.value
    n = y.size
    peaks = []
    for i in range(1, n - 1):
        if y[i] > y[i - 1] and y[i] >= y[i + 1]:
            prom = _prominence(y, i)
            if prom >= min_prominence:
                center, height = _parabolic_vertex(x, y, i)
                fwhm = _half_prominence_width(x, y, i, prom)
                peaks.append((center, height, fwhm))
    return peaks


def _prominence(y: np.ndarray, i: int) -> float:
    # Lowest contour between the peak and the nearest higher ground on each side.
    left_min = y[i]
    j = i - 1
    while j >= 0 and y[j] <= y[i]:
        left_min = min(left_min, y[j])
        j -= 1
    right_min = y[i]
    j = i + 1
    while j < y.size and y[j] <= y[i]:
        right_min = min(right_min, y[j])
        j += 1
    return float(y[i] - max(left_min, right_min))


def _parabolic_vertex(x: np.ndarray, y: np.ndarray, i: int):
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a >= 0:  # flat or concave-up triple: keep the grid point
        return float(x1), float(y1)
    xc = -b / (2.0 * a)
    c = y1 - a * x1 * x1 - b * x1
    return float(xc), float(a * xc * xc + b * xc + c)


def _half_prominence_width(x: np.ndarray, y: np.ndarray, i: int, prom: float) -> float:
    level = y[i] - 0.5 * prom
    left = x[0]
    for j in range(i - 1, -1, -1):
        if y[j] <= level:
            left = np.interp(level, [y[j], y[j + 1]], [x[j], x[j + 1]])
            break
    right = x[-1]
    for j in range(i + 1, y.size):
        if y[j] <= level:
            right = np.interp(level, [y[j], y[j - 1]], [x[j], x[j - 1]])
            break
    return float(right - left)


def read_spectrum(path, kind: str = "intensity", resolution: float = 0.0) -> Spectrum:
    """Load a spectrum file (CSV with header, or two-column text)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise DataError(f"empty spectrum file: {path}")
    start = 1 if any(c.isalpha() for c in lines[0]) else 0
    wn, val = [], []
    for ln in lines[start:]:
        parts = ln.split(",") if "," in ln else ln.split()
        if len(parts) < 2:
            raise DataError(f"malformed spectrum row in {path}: '{ln}'")
        wn.append(float(parts[0]))
        val.append(float(parts[1]))
    wn = np.asarray(wn)
    val = np.asarray(val)
    order = np.argsort(wn, kind="stable")
    wn = wn[order]
    val = val[order]
    if np.any(np.diff(wn) == 0):
        raise DataError(f"duplicate wavenumbers in {path}")
    return Spectrum(wn, val, kind=kind, resolution=resolution)


def write_spectrum(s: Spectrum, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("wavenumber_cm-1,value\n")
        for wn, v in zip(s.wavenumber, s.value):
            fh.write(f"{float(wn)!r},{float(v)!r}\n")


def with_kind(s: Spectrum, kind: str) -> Spectrum:
    return replace(s, kind=kind)
