"""Seeded synthetic datasets from known ground truth, for every fit path.

generate() evaluates a module's forward model on a grid, adds optional
Gaussian noise, and returns the dataset in that module's input type; a
ground-truth sidecar record travels with every written file so refits can
be checked against the generating parameters.  One seeded generator
(numpy's default PCG64) drives all noise, and the algorithm identifier is
recorded in the sidecar for cross-implementation reproducibility.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .modulation import ModulationDataset, response_model
from .raman import RamanSession
from .relaxation import PolarizationDecaySeries, RelaxationModel
from .spectra import Spectrum, write_spectrum

RNG_ALGORITHM = "numpy-default-rng-pcg64"

TARGETS = ("decay", "relaxation", "modulation", "spectrum", "raman")


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    num: int
    scale: str = "linear"  # or "log"

    def __post_init__(self):
        if self.num < 2:
            raise ValidationError("grid needs at least 2 points")
        if self.scale not in ("linear", "log"):
            raise ValidationError(f"grid scale must be linear or log, got '{self.scale}'")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ValidationError("log grid endpoints must be positive")

    def points(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.num)
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    sigma: float = 0.0
    noise_mode: str = "relative"  # sigma scales |model| ("relative") or is absolute
    grid: GridSpec | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.sigma < 0:
            raise ValidationError("noise sigma must be >= 0")
        if self.noise_mode not in ("relative", "absolute"):
            raise ValidationError(
                f"noise_mode must be relative or absolute, got '{self.noise_mode}'"
            )


@dataclass
class SynthResult:
    target: str
    dataset: object
    truth: dict

    def write(self, out_path) -> list:
        """Write the dataset CSV(s) plus a `.truth.json` sidecar."""
        out = Path(out_path)
        written = _WRITERS[self.target](self.dataset, out)
        sidecar = out.with_suffix(".truth.json")
        with open(sidecar, "w", encoding="utf-8") as fh:
            json.dump(self.truth, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return written + [str(sidecar)]


def generate(target: str, cfg: SynthConfig) -> SynthResult:
    """Forward-model dataset for one target module; see TARGETS."""
    if target not in TARGETS:
        raise ValidationError(f"unknown synth target '{target}', expected one of {TARGETS}")
    rng = np.random.default_rng(cfg.seed)
    dataset, truth = _GENERATORS[target](cfg, rng)
    truth.update(
        {
            "target": target,
            "seed": cfg.seed,
            "rng": RNG_ALGORITHM,
            "noise_sigma": cfg.sigma,
            "noise_mode": cfg.noise_mode,
        }
    )
    return SynthResult(target=target, dataset=dataset, truth=truth)


def _noise(rng, cfg: SynthConfig, model: np.ndarray) -> np.ndarray:
    if cfg.sigma == 0.0:
        return np.zeros_like(model)
    scale = cfg.sigma * np.abs(model) if cfg.noise_mode == "relative" else cfg.sigma
    return rng.normal(0.0, 1.0, size=model.shape) * scale


def _param(cfg, key, default=None):
    if key in cfg.params:
        return cfg.params[key]
    if default is None:
        raise ValidationError(f"missing required synth parameter '{key}'")
    return default


def _gen_decay(cfg: SynthConfig, rng):
    t1 = float(_param(cfg, "t1_s"))
    s0 = float(_param(cfg, "s0", 1.0))
    grid = cfg.grid or GridSpec(0.0, 3.0 * t1, 16)
    tau = grid.points()
    model = s0 * np.exp(-tau / t1)
    signal = model + _noise(rng, cfg, model)
    series = PolarizationDecaySeries(delays=tau, signal=signal)
    return series, {"t1_s": t1, "s0": s0}


def _gen_relaxation(cfg: SynthConfig, rng):
    a = float(_param(cfg, "A"))
    b = float(_param(cfg, "B"))
    model = RelaxationModel(raman_coeff=a, base_rate=b)
    grid = cfg.grid or GridSpec(2.1, 6.4, 12)
    temps = grid.points()
    t1 = 1.0 / np.array([model.rate(t) for t in temps])
    noisy = t1 + _noise(rng, cfg, t1)
    sigma_col = (
        cfg.sigma * np.abs(t1) if cfg.noise_mode == "relative" else np.full_like(t1, cfg.sigma)
    )
    if cfg.sigma == 0.0:
        sigma_col = np.zeros_like(t1)
    data = np.column_stack([temps, noisy, sigma_col])
    return data, {"A": a, "B": b}


def _gen_modulation(cfg: SynthConfig, rng):
    t1 = float(_param(cfg, "t1_ns", 0.0)) * 1e-9
    if t1 <= 0:
        t1 = float(_param(cfg, "t1_s", 0.0))
    if t1 <= 0:
        raise ValidationError("modulation target needs t1_ns or t1_s > 0")
    scale = float(_param(cfg, "scale", 1.0))
    grid = cfg.grid or GridSpec(1e6, 1e8, 30, "log")
    f = grid.points()
    amp, phase = response_model(f, t1)
    amp = scale * amp
    noisy_amp = amp + _noise(rng, cfg, amp)
    phase_sigma = float(_param(cfg, "phase_sigma_deg", 0.0))
    noisy_phase = phase + (
        rng.normal(0.0, phase_sigma, size=phase.shape) if phase_sigma > 0 else 0.0
    )
    inst_t1 = float(_param(cfg, "instrument_t1_ns", 0.0)) * 1e-9
    truth = {"t1_s": t1, "scale": scale}
    if inst_t1 > 0:
        inst_amp, inst_phase = response_model(f, inst_t1)
        dataset = ModulationDataset(
            frequency=f,
            amplitude=noisy_amp * inst_amp,
            phase=noisy_phase + inst_phase,
            reference_amplitude=inst_amp,
            reference_phase=inst_phase,
        )
        truth["instrument_t1_s"] = inst_t1
    else:
        dataset = ModulationDataset(frequency=f, amplitude=noisy_amp, phase=noisy_phase)
    return dataset, truth


def gaussian_line(x: np.ndarray, center: float, area: float, fwhm: float) -> np.ndarray:
    peak = area * 2.0 * math.sqrt(math.log(2.0) / math.pi) / fwhm
    return peak * np.exp(-4.0 * math.log(2.0) * (x - center) ** 2 / fwhm**2)


def lorentzian_line(x: np.ndarray, center: float, area: float, fwhm: float) -> np.ndarray:
    return area * (2.0 / (math.pi * fwhm)) / (1.0 + (2.0 * (x - center) / fwhm) ** 2)


_SHAPES = {"gauss": gaussian_line, "lorentz": lorentzian_line}


def _lines_from_params(cfg):
    if "lines" in cfg.params:
        return [tuple(line) for line in cfg.params["lines"]]
    center = float(_param(cfg, "center"))
    area = float(_param(cfg, "area", 1.0))
    fwhm = float(_param(cfg, "fwhm", 1.0))
    shape = str(_param(cfg, "shape", "gauss"))
    return [(center, area, fwhm, shape)]


def _gen_spectrum(cfg: SynthConfig, rng):
    lines = _lines_from_params(cfg)
    lo = min(line[0] for line in lines) - 10.0 * max(line[2] for line in lines)
    hi = max(line[0] for line in lines) + 10.0 * max(line[2] for line in lines)
    grid = cfg.grid or GridSpec(lo, hi, 2001)
    x = grid.points()
    value = np.full_like(x, float(_param(cfg, "baseline", 0.0)))
    value = value + float(_param(cfg, "slope", 0.0)) * (x - x[0])
    for center, area, fwhm, shape in lines:
        if shape not in _SHAPES:
            raise ValidationError(f"unknown line shape '{shape}'")
        value = value + _SHAPES[shape](x, float(center), float(area), float(fwhm))
    value = value + _noise(rng, cfg, value)
    kind = str(_param(cfg, "kind", "intensity"))
    resolution = float(_param(cfg, "resolution", 0.0))
    spectrum = Spectrum(x, value, kind=kind, resolution=resolution)
    return spectrum, {
        "lines": [list(line) for line in lines],
        "baseline": float(_param(cfg, "baseline", 0.0)),
        "slope": float(_param(cfg, "slope", 0.0)),
    }


def _as_float_list(raw):
    if isinstance(raw, str):
        return [float(tok) for tok in raw.split(",") if tok != ""]
    if isinstance(raw, (int, float)):
        return [float(raw)]
    return [float(v) for v in raw]


def _gen_raman(cfg: SynthConfig, rng):
    lasers = _as_float_list(_param(cfg, "lasers"))
    if len(lasers) < 2:
        raise ValidationError("raman target needs at least 2 laser energies")
    offsets = _as_float_list(_param(cfg, "raman_offsets", []))
    positions = _as_float_list(_param(cfg, "pl_positions", []))
    area = float(_param(cfg, "area", 1.0))
    fwhm = float(_param(cfg, "fwhm", 1.0))
    resolution = float(_param(cfg, "resolution", 0.5))
    if cfg.grid is not None:
        grid = cfg.grid
    else:
        targets = [l - o for l in lasers for o in offsets] + positions
        if not targets:
            raise ValidationError("raman target needs raman_offsets or pl_positions")
        lo = float(_param(cfg, "lo", min(targets) - 15.0))
        hi = float(_param(cfg, "hi", max(targets) + 15.0))
        num = int(round((hi - lo) / (resolution / 2.0))) + 1
        grid = GridSpec(lo, hi, max(num, 2))
    x = grid.points()
    spectra = []
    for laser in lasers:
        value = np.zeros_like(x)
        for off in offsets:
            value = value + gaussian_line(x, laser - off, area, fwhm)
        for pos in positions:
            value = value + gaussian_line(x, pos, area, fwhm)
        value = value + _noise(rng, cfg, np.maximum(value, 1e-6 * area))
        spectra.append(Spectrum(x, value, kind="luminescence", resolution=resolution))
    session = RamanSession(
        laser_energies=tuple(lasers),
        spectra=tuple(spectra),
        match_tolerance=float(_param(cfg, "tolerance", 0.0)),
    )
    truth = {
        "lasers": lasers,
        "raman_offsets": offsets,
        "pl_positions": positions,
        "area": area,
        "fwhm": fwhm,
    }
    return session, truth


_GENERATORS = {
    "decay": _gen_decay,
    "relaxation": _gen_relaxation,
    "modulation": _gen_modulation,
    "spectrum": _gen_spectrum,
    "raman": _gen_raman,
}


def _write_decay(series: PolarizationDecaySeries, out: Path):
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("delay_s,signal\n")
        for d, s in zip(series.delays, series.signal):
            fh.write(f"{float(d)!r},{float(s)!r}\n")
    return [str(out)]


def _write_relaxation(data: np.ndarray, out: Path):
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("temperature_K,T1_s,sigma_s\n")
        for t, t1, sig in data:
            fh.write(f"{float(t)!r},{float(t1)!r},{float(sig)!r}\n")
    return [str(out)]


def _write_modulation(d: ModulationDataset, out: Path):
    with open(out, "w", encoding="utf-8") as fh:
        if d.has_reference:
            fh.write("frequency_Hz,amplitude,phase_deg,ref_amplitude,ref_phase_deg\n")
            for row in zip(
                d.frequency, d.amplitude, d.phase, d.reference_amplitude, d.reference_phase
            ):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        else:
            fh.write("frequency_Hz,amplitude,phase_deg\n")
            for row in zip(d.frequency, d.amplitude, d.phase):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return [str(out)]


def _write_spectrum_file(s: Spectrum, out: Path):
    write_spectrum(s, out)
    return [str(out)]


def _write_raman(session: RamanSession, out: Path):
    written = []
    for i, s in enumerate(session.spectra):
        path = out.with_name(f"{out.stem}_{i:02d}{out.suffix or '.csv'}")
        write_spectrum(s, path)
        written.append(str(path))
    return written


_WRITERS = {
    "decay": _write_decay,
    "relaxation": _write_relaxation,
    "modulation": _write_modulation,
    "spectrum": _write_spectrum_file,
    "raman": _write_raman,
}
