"""Modulated-excitation lifetime analysis.

Driving the pump with a sinusoidal modulation at frequency f turns the
emitter into a one-pole low-pass filter with

    A(f)     = 1 / sqrt(1 + (2 pi f T1)^2)
    Theta(f) = -atan(2 pi f T1)    (degrees, lag negative)

where T1 is the optically excited-state lifetime.  Lock-in amplitude and
phase sweeps, corrected by a reference response measured on scattered pump
light, are fit for T1; the critical frequency is 1/(2 pi T1) and the
homogeneous linewidth 1/(2 pi T1 c) in cm^-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fitcore
from .errors import DataError, ValidationError
from .units import CONSTANTS, Quantity

_C_CM = CONSTANTS.speed_of_light * 100.0  # cm/s


@dataclass(frozen=True)
class ModulationDataset:
    """Per-frequency amplitude and phase, plus optional instrument reference."""

    frequency: np.ndarray  # Hz, strictly ascending
    amplitude: np.ndarray  # arbitrary units, > 0
    phase: np.ndarray  # degrees, lag negative
    reference_amplitude: np.ndarray | None = None
    reference_phase: np.ndarray | None = None

    def __post_init__(self):
        f = np.asarray(self.frequency, dtype=float)
        a = np.asarray(self.amplitude, dtype=float)
        p = np.asarray(self.phase, dtype=float)
        if f.ndim != 1 or f.shape != a.shape or f.shape != p.shape:
            raise ValidationError("frequency, amplitude, phase must be equal-length 1-d arrays")
        if np.any(f <= 0) or not np.all(np.diff(f) > 0):
            raise ValidationError("frequencies must be positive and strictly ascending")
        if np.any(a <= 0):
            raise ValidationError("amplitudes must be positive")
        refs = (self.reference_amplitude, self.reference_phase)
        if (refs[0] is None) != (refs[1] is None):
            raise ValidationError("reference amplitude and phase must be given together")
        object.__setattr__(self, "frequency", f)
        object.__setattr__(self, "amplitude", a)
        object.__setattr__(self, "phase", p)
        if refs[0] is not None:
            ra = np.asarray(refs[0], dtype=float)
            rp = np.asarray(refs[1], dtype=float)
            if ra.shape != f.shape or rp.shape != f.shape:
                raise ValidationError("reference arrays must match the frequency grid")
            object.__setattr__(self, "reference_amplitude", ra)
            object.__setattr__(self, "reference_phase", rp)

    @property
    def has_reference(self) -> bool:
        return self.reference_amplitude is not None


@dataclass(frozen=True)
class LifetimeResult:
    t1: Quantity  # s
    critical_frequency: Quantity  # Hz, 1/(2 pi T1)
    homogeneous_linewidth: Quantity  # cm^-1, 1/(2 pi T1 c)
    mode: str
    converged: bool
    warnings: tuple = ()


def response_model(frequency_hz, t1_s: float):
    """One-pole amplitude (dimensionless) and phase (degrees) response."""
    f = np.asarray(frequency_hz, dtype=float)
    if np.any(f <= 0):
        raise ValidationError("frequency must be positive")
    if not t1_s > 0:
        raise ValidationError(f"t1 must be positive, got {t1_s}")
    x = 2.0 * math.pi * f * t1_s
    amplitude = 1.0 / np.sqrt(1.0 + x * x)
    phase_deg = -np.degrees(np.arctan(x))
    if np.isscalar(frequency_hz):
        return float(amplitude), float(phase_deg)
    return amplitude, phase_deg


def correct_instrument(d: ModulationDataset) -> ModulationDataset:
    """Divide out the reference amplitude and subtract the reference phase."""
    if not d.has_reference:
        raise ValidationError("dataset carries no instrument reference")
    if np.any(d.reference_amplitude == 0):
        raise DataError("reference amplitude contains zeros")
    return ModulationDataset(
        frequency=d.frequency,
        amplitude=d.amplitude / d.reference_amplitude,
        phase=d.phase - d.reference_phase,
    )


def average_datasets(datasets) -> ModulationDataset:
    """Pointwise mean of several corrected sweeps on one common grid."""
    datasets = list(datasets)
    if not datasets:
        raise ValidationError("no datasets to average")
    if len(datasets) == 1:
        return datasets[0]
    f0 = datasets[0].frequency
    for d in datasets[1:]:
        if d.frequency.shape != f0.shape or not np.allclose(d.frequency, f0, rtol=1e-9):
            raise ValidationError("datasets must share one frequency grid for averaging")
        if d.has_reference:
            raise ValidationError("correct datasets for the instrument response before averaging")
    amp = np.mean([d.amplitude for d in datasets], axis=0)
    phase = np.mean([d.phase for d in datasets], axis=0)
    return ModulationDataset(frequency=f0, amplitude=amp, phase=phase)


def fit_lifetime(
    d: ModulationDataset, mode: str = "joint", phase_offset: bool = False
) -> LifetimeResult:
    """Fit the one-pole response for T1.

    mode 'amplitude' fits the amplitude curve with a free overall scale,
    'phase' fits the phase lag alone, 'joint' shares one T1 across both.
    The phase model has no free offset unless ``phase_offset`` is set (for
    cable delays).  A warning is attached when the knee lies outside the
    measured band.
    """
    if mode not in ("amplitude", "phase", "joint"):
        raise ValidationError(f"mode must be amplitude, phase or joint, got '{mode}'")
    f = d.frequency
    if f.size < 5:
        raise ValidationError(f"need at least 5 frequencies, got {f.size}")
    if f[-1] / f[0] < 4.0:
        raise ValidationError(
            f"frequency span ratio {f[-1] / f[0]:.3g} is below 4"
        )
    uses_phase = mode in ("phase", "joint")
    if uses_phase and (np.any(d.phase > 0) or np.any(d.phase <= -90.0)):
        raise DataError(
            "phase values outside (-90, 0] degrees; a one-pole lag cannot "
            "exceed -90 and unwrapping is not applied silently"
        )

    amp = d.amplitude
    phase_rad = np.radians(d.phase)
    t1_grid = np.geomspace(0.05 / (2 * math.pi * f[-1]), 20.0 / (2 * math.pi * f[0]), 40)

    def model_amp(t1):
        return 1.0 / np.sqrt(1.0 + (2 * math.pi * f * t1) ** 2)

    def model_phase_rad(t1):
        return -np.arctan(2 * math.pi * f * t1)

    def best_scale(t1):
        m = model_amp(t1)
        return float(m @ amp) / float(m @ m)

    def residual(p):
        parts = []
        if mode in ("amplitude", "joint"):
            scale, t1 = p[0], p[1]
            parts.append(scale * model_amp(max(t1, t1_floor)) - amp)
        if uses_phase:
            t1 = p[1] if mode == "joint" else p[0]
            off = p[-1] if phase_offset else 0.0
            parts.append(model_phase_rad(max(t1, t1_floor)) + math.radians(off) - phase_rad)
        return np.concatenate(parts)

    t1_floor = 1e-4 / (2 * math.pi * f[-1])

    def grid_chi2(t1):
        if mode == "phase":
            return float(np.sum((model_phase_rad(t1) - phase_rad) ** 2))
        r = best_scale(t1) * model_amp(t1) - amp
        chi = float(r @ r)
        if mode == "joint":
            chi += float(np.sum((model_phase_rad(t1) - phase_rad) ** 2))
        return chi

    t1_init = min(t1_grid, key=grid_chi2)
    if mode == "phase":
        init = [t1_init]
        lo = [t1_floor]
        hi = [np.inf]
        t1_index = 0
    else:
        init = [best_scale(t1_init), t1_init]
        lo = [0.0, t1_floor]
        hi = [np.inf, np.inf]
        t1_index = 1
    if phase_offset and uses_phase:
        init.append(0.0)
        lo.append(-45.0)
        hi.append(45.0)
    result = fitcore.solve(
        fitcore.FitProblem(
            residual, np.array(init), bounds=(np.array(lo), np.array(hi))
        )
    )
    t1 = float(result.params[t1_index])
    sigma = result.sigma(t1_index)

    notes = []
    x_lo = 2 * math.pi * f[0] * t1
    x_hi = 2 * math.pi * f[-1] * t1
    if x_hi < 0.2 or x_lo > 5.0:
        notes.append(
            "knee lies outside the measured band (2 pi f T1 spans "
            f"{x_lo:.3g} to {x_hi:.3g}); T1 is an extrapolation"
        )
    rel = sigma / t1 if t1 > 0 else 0.0
    fc = 1.0 / (2 * math.pi * t1)
    lw = 1.0 / (2 * math.pi * t1 * _C_CM)
    return LifetimeResult(
        t1=Quantity(t1, sigma, "s"),
        critical_frequency=Quantity(fc, fc * rel, "Hz"),
        homogeneous_linewidth=Quantity(lw, lw * rel, "cm^-1"),
        mode=mode,
        converged=result.converged,
        warnings=tuple(notes),
    )


def read_modulation_csv(path) -> ModulationDataset:
    """Rows of `frequency_Hz,amplitude,phase_deg[,ref_amplitude,ref_phase_deg]`."""
    from .relaxation import _read_rows

    rows = np.asarray(_read_rows(path), dtype=float)
    if rows.shape[1] not in (3, 5):
        raise DataError(f"modulation file needs 3 or 5 columns: {path}")
    order = np.argsort(rows[:, 0], kind="stable")
    rows = rows[order]
    if rows.shape[1] == 3:
        return ModulationDataset(rows[:, 0], rows[:, 1], rows[:, 2])
    return ModulationDataset(
        rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3], rows[:, 4]
    )
