"""Figure rendering for the CLI report path (batch only, Agg backend)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .modulation import ModulationDataset, response_model
from .relaxation import PolarizationDecaySeries, RelaxationModel
from .spinmodel import LABELS, SpinSystem, level_structure


def save_figure(fig, path) -> None:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def levels_figure(sys: SpinSystem, b_max_t: float | None = None):
    """Level energies against field, labeled at the right edge."""
    b_max = b_max_t if b_max_t else max(2.0 * sys.b0, 0.01)
    fields = np.linspace(0.0, b_max, 60)
    energies = {label: [] for label in LABELS}
    for b in fields:
        ls = level_structure(SpinSystem(sys.g_e, sys.g_n, sys.hyperfine, b))
        for label in LABELS:
            energies[label].append(ls.energy(label) / 1e9)
    fig, ax = plt.subplots(figsize=(5, 4))
    for label in LABELS:
        ax.plot(fields * 1e3, energies[label], label=label)
    ax.set_xlabel("B0 (mT)")
    ax.set_ylabel("E/h (GHz)")
    ax.legend(frameon=False, fontsize=8)
    return fig


def temperature_fit_figure(points: np.ndarray, model: RelaxationModel):
    temps, t1s = points[:, 0], points[:, 1]
    sig = points[:, 2] if points.shape[1] > 2 else np.zeros_like(t1s)
    grid = np.geomspace(temps.min() * 0.9, temps.max() * 1.1, 200)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.errorbar(temps, t1s, yerr=np.where(sig > 0, sig, None), fmt="o", ms=4, label="data")
    ax.plot(grid, [1.0 / model.rate(t) for t in grid], "-", label="T^9 + const fit")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("temperature (K)")
    ax.set_ylabel("T1 (s)")
    ax.legend(frameon=False, fontsize=8)
    return fig


def decay_figure(series: PolarizationDecaySeries, s0: float, t1_s: float):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(series.delays, series.signal, "o", ms=4, label="data")
    grid = np.linspace(series.delays[0], series.delays[-1], 200)
    ax.plot(grid, s0 * np.exp(-grid / t1_s), "-", label=f"T1 = {t1_s:.3g} s")
    ax.set_xlabel("delay (s)")
    ax.set_ylabel("polarization signal")
    ax.legend(frameon=False, fontsize=8)
    return fig


def spectrum_figure(wavenumber, value, regions=None, ylabel="value", baseline=None):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(wavenumber, value, lw=0.8)
    if baseline is not None:
        ax.plot(baseline[0], baseline[1], "--", lw=0.8, color="gray", label="baseline")
        ax.legend(frameon=False, fontsize=8)
    for lo, hi in regions or []:
        ax.axvspan(lo, hi, alpha=0.15)
    ax.set_xlabel("wavenumber (cm$^{-1}$)")
    ax.set_ylabel(ylabel)
    return fig


def modulation_figure(d: ModulationDataset, t1_s: float, scale: float = 1.0):
    fig, (ax_a, ax_p) = plt.subplots(2, 1, figsize=(5, 6), sharex=True)
    grid = np.geomspace(d.frequency[0], d.frequency[-1], 300)
    amp_m, phase_m = response_model(grid, t1_s)
    ax_a.semilogx(d.frequency, d.amplitude / scale, "o", ms=4, label="data")
    ax_a.semilogx(grid, amp_m, "-", label="fit")
    fc = 1.0 / (2.0 * math.pi * t1_s)
    for ax in (ax_a, ax_p):
        ax.axvline(fc, color="red", ls="--", lw=0.8)
    ax_a.axhline(1.0 / math.sqrt(2.0), color="red", ls="--", lw=0.8)
    ax_p.axhline(-45.0, color="red", ls="--", lw=0.8)
    ax_a.set_ylabel("normalized amplitude")
    ax_a.legend(frameon=False, fontsize=8)
    ax_p.semilogx(d.frequency, d.phase, "o", ms=4)
    ax_p.semilogx(grid, phase_m, "-")
    ax_p.set_xlabel("modulation frequency (Hz)")
    ax_p.set_ylabel("phase (deg)")
    return fig


def raman_figure(session, tracks):
    fig, ax = plt.subplots(figsize=(6, 4))
    offset = 0.0
    for laser, s in zip(session.laser_energies, session.spectra):
        ax.plot(s.wavenumber, s.value + offset, lw=0.8, label=f"laser {laser:.2f}")
        offset += 1.1 * float(np.max(s.value))
    for t in tracks:
        marker = {"raman": "v", "photoluminescence": "*"}.get(t.classification, "x")
        ax.plot(t.centers, [0.0] * len(t.centers), marker, ms=6)
    ax.set_xlabel("wavenumber (cm$^{-1}$)")
    ax.set_ylabel("luminescence (offset)")
    ax.legend(frameon=False, fontsize=7)
    return fig
