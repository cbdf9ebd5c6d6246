"""Batch command-line frontend.

Each subcommand reads data files, runs one analysis, and prints a Report
(`key = value # unit ± uncertainty` lines, or a single JSON object with
--json).  Data-bearing subcommands can also emit delimited plot data
(--plot-data) and render a matplotlib figure alongside it (--figure).
Exit codes: 0 success, 1 validation/data error (single-line diagnostic),
2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import __version__, absorption as absorption_mod, cavity as cavity_mod
from . import luminescence, modulation, raman as raman_mod, relaxation, spinmodel, synth
from .errors import SespinError, ValidationError
from .report import Report, write_plot_data
from .spectra import (
    PeakRegion,
    absorption_coefficient,
    estimate_baseline,
    find_peaks,
    integrate_line,
    read_spectrum,
)
from .units import Quantity


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report = Report(subcommand=args.command, version=__version__)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            _HANDLERS[args.command](args, report)
        for w in caught:
            report.warn(str(w.message))
    except (SespinError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sespin",
        description="Spin-photon interface analysis toolkit for donor qubits in silicon.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = _sub(sub, "levels", "Spin Hamiltonian level structure and transitions.")
    p.add_argument("--B0", type=float, default=0.0, help="static field in T (default 0)")
    p.add_argument("--A", type=float, default=1.66e9, help="hyperfine constant in Hz")
    p.add_argument("--ge", type=float, default=2.0057, help="electron g-factor")
    p.add_argument("--gn", type=float, default=1.07, help="nuclear g-factor")
    p.add_argument("--slope-db", type=float, default=1e-4, help="field step for slopes (T)")
    _output_flags(p)

    p = _sub(sub, "t1-fit", "Fit the T1 rate law, or extract T1 from one decay series.")
    p.add_argument("--data", help="CSV temperature_K,T1_s,sigma_s")
    p.add_argument("--decay", help="CSV delay_s,signal (single decay series)")
    p.add_argument("--free-exponent", action="store_true", help="diagnostic free-exponent fit")
    _output_flags(p)

    p = _sub(sub, "t1-predict", "Predict T1 from rate-law coefficients.")
    p.add_argument("--A", type=float, required=True, help="T^9 coefficient (1/s/K^9)")
    p.add_argument("--B", type=float, required=True, help="temperature-independent rate (1/s)")
    p.add_argument("--T", type=float, required=True, help="temperature (K)")
    p.add_argument("--sigma-A", type=float, default=0.0)
    p.add_argument("--sigma-B", type=float, default=0.0)
    _output_flags(p)

    p = _sub(sub, "absorption", "Dipole moment and conversion factors from two-beam spectra.")
    p.add_argument("--sample", required=True, help="sample intensity spectrum CSV")
    p.add_argument("--reference", required=True, help="reference intensity spectrum CSV")
    p.add_argument("--length-cm", type=float, required=True, help="optical path length (cm)")
    p.add_argument("--concentration", type=float, required=True, help="absorber density (cm^-3)")
    p.add_argument("--concentration-sigma", type=float, default=0.0)
    p.add_argument("--region", required=True, help="integration bounds lo:hi (cm^-1)")
    p.add_argument("--baseline", choices=("constant", "linear"), default="constant")
    p.add_argument("--line-center", type=float, default=0.0,
                   help="line center (cm^-1); 0 = detect from the peak")
    p.add_argument("--index", type=float, default=absorption_mod.SILICON_REFRACTIVE_INDEX)
    p.add_argument("--convention", choices=absorption_mod.CONVENTIONS,
                   default=absorption_mod.DEFAULT_CONVENTION)
    p.add_argument("--resolution", type=float, default=0.0, help="spectral resolution (cm^-1)")
    _output_flags(p)

    p = _sub(sub, "zpl", "ZPL fraction from a luminescence spectrum.")
    p.add_argument("--pl", required=True, help="luminescence spectrum CSV")
    p.add_argument("--zpl", required=True, help="ZPL region lo:hi (cm^-1)")
    p.add_argument("--sideband", required=True, help="sideband region lo:hi (cm^-1)")
    p.add_argument("--alpha", help="absorption-coefficient spectrum CSV for reabsorption")
    p.add_argument("--path-cm", type=float, default=0.0, help="effective reabsorption path (cm)")
    p.add_argument("--baseline", choices=("constant", "linear"), default="constant")
    p.add_argument("--resolution", type=float, default=0.0)
    _output_flags(p)

    p = _sub(sub, "efficiency", "Radiative efficiency from two lifetimes.")
    p.add_argument("--excited-ns", type=float, required=True)
    p.add_argument("--excited-sigma-ns", type=float, default=0.0)
    p.add_argument("--radiative-us", type=float, required=True)
    p.add_argument("--radiative-sigma-us", type=float, default=0.0)
    _output_flags(p)

    p = _sub(sub, "lifetime", "Excited-state lifetime from modulation sweeps.")
    p.add_argument("--data", action="append", required=True,
                   help="CSV frequency_Hz,amplitude,phase_deg[,ref_amplitude,ref_phase_deg]; repeatable")
    p.add_argument("--mode", choices=("amplitude", "phase", "joint"), default="joint")
    p.add_argument("--phase-offset", action="store_true", help="allow a constant phase offset")
    _output_flags(p)

    p = _sub(sub, "raman", "Classify features as Raman-shifted or photoluminescent.")
    p.add_argument("--laser", action="append", type=float, required=True,
                   help="laser energy (cm^-1); repeat per spectrum")
    p.add_argument("--spectrum", action="append", required=True,
                   help="spectrum CSV; repeat per laser")
    p.add_argument("--tolerance", type=float, default=0.0,
                   help="match tolerance (cm^-1); 0 = max resolution")
    p.add_argument("--min-prominence", type=float, default=0.0,
                   help="peak prominence threshold; 0 = 5%% of the max value")
    p.add_argument("--expect", default="", help="comma list of offsets for a null search")
    p.add_argument("--resolution", type=float, default=0.5)
    _output_flags(p)

    p = _sub(sub, "cooperativity", "Emitter-cavity cooperativity estimate.")
    p.add_argument("--mu-debye", type=float, required=True)
    p.add_argument("--linewidth-cm", type=float, default=cavity_mod.HOLE_BURNING_LINEWIDTH_CM,
                   help="emitter linewidth (cm^-1); default is the hole-burning upper bound")
    p.add_argument("--q", type=float, required=True, help="unloaded quality factor")
    p.add_argument("--volume", type=float, default=1.0, help="mode volume in (lambda/n)^3")
    p.add_argument("--wavelength-um", type=float, default=2.9)
    p.add_argument("--index", type=float, default=cavity_mod.SILICON_REFRACTIVE_INDEX)
    p.add_argument("--target-c", type=float, default=0.0,
                   help="also report the Q needed for this cooperativity")
    _output_flags(p)

    p = _sub(sub, "synth", "Generate seeded synthetic datasets with a truth sidecar.")
    p.add_argument("--target", required=True, choices=synth.TARGETS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--noise-mode", choices=("relative", "absolute"), default="relative")
    p.add_argument("--grid", default="", help="start:stop:num[:log]")
    p.add_argument("--param", action="append", default=[], help="key=value; repeatable")
    p.add_argument("--out", required=True, help="output CSV path")
    _output_flags(p)
    return parser


def _sub(sub, name, help_text):
    return sub.add_parser(
        name,
        help=help_text,
        description=help_text,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )


def _output_flags(p):
    p.add_argument("--json", action="store_true", help="emit a structured JSON report")
    p.add_argument("--plot-data", default="", help="write delimited plot data to this path")
    p.add_argument("--figure", default="", help="render a figure to this path")


def _parse_region(text, baseline="constant") -> PeakRegion:
    try:
        lo, hi = (float(tok) for tok in text.split(":"))
    except Exception as exc:
        raise ValidationError(f"expected a lo:hi region, got '{text}'") from exc
    return PeakRegion(lo, hi, baseline)


def _maybe_figure(args, fig_builder):
    if getattr(args, "figure", ""):
        from . import plotting

        fig = fig_builder(plotting)
        plotting.save_figure(fig, args.figure)


# ---------------------------------------------------------------- handlers


def _handle_levels(args, report: Report):
    sys_ = spinmodel.SpinSystem(g_e=args.ge, g_n=args.gn, hyperfine=args.A, b0=args.B0)
    levels = spinmodel.level_structure(sys_)
    report.note("labels", "adiabatic continuation from the zero-field singlet/triplet basis")
    for label in spinmodel.LABELS:
        report.add(f"E_{_slug(label)}", levels.energy(label), unit="Hz")
    for to in ("T-", "T0", "T+"):
        freq = spinmodel.transition_frequency(levels, "S0", to)
        report.add(f"f_S0_{_slug(to)}", freq, unit="Hz")
    slope = spinmodel.clock_transition_slope(sys_, "S0", "T0", db=args.slope_db)
    report.add("slope_S0_T0", slope, unit="Hz/T")
    _maybe_figure(args, lambda plotting: plotting.levels_figure(sys_))


def _slug(label: str) -> str:
    return label.replace("-", "m").replace("+", "p")


def _handle_t1_fit(args, report: Report):
    if bool(args.data) == bool(args.decay):
        raise ValidationError("give exactly one of --data (temperature CSV) or --decay")
    if args.decay:
        report.add_input(args.decay)
        series = relaxation.read_decay_csv(args.decay)
        t1 = relaxation.t1_from_decay(series)
        report.add("T1", t1, unit="s")
        if args.plot_data:
            model = t1.value
            s0 = float(series.signal[0])
            write_plot_data(args.plot_data, {
                "delay_s": series.delays,
                "signal": series.signal,
                "model": s0 * np.exp(-series.delays / model),
            })
        _maybe_figure(args, lambda plotting: plotting.decay_figure(
            series, float(series.signal[0]), t1.value))
        return
    report.add_input(args.data)
    points = relaxation.read_temperature_csv(args.data)
    model = relaxation.fit_temperature_model(points)
    report.add("A", Quantity(model.raman_coeff,
                             float(np.sqrt(max(model.covariance[0, 0], 0.0)))),
               unit="1/(s K^9)")
    report.add("B", Quantity(model.base_rate,
                             float(np.sqrt(max(model.covariance[1, 1], 0.0)))),
               unit="1/s")
    if model.base_rate > 0:
        low_t = relaxation.predict_t1(model, 1e-6)
        report.add("T1_low_temperature_limit", low_t, unit="s")
    if args.free_exponent:
        diag = relaxation.fit_temperature_model_free_exponent(points)
        report.add("exponent", Quantity(diag.exponent, diag.exponent_sigma), unit="",
                   provenance="diagnostic fit; the model fixes the exponent at 9")
    if args.plot_data:
        write_plot_data(args.plot_data, {
            "temperature_K": points[:, 0],
            "T1_s": points[:, 1],
            "model_T1_s": [1.0 / model.rate(t) for t in points[:, 0]],
        })
    _maybe_figure(args, lambda plotting: plotting.temperature_fit_figure(points, model))


def _handle_t1_predict(args, report: Report):
    cov = np.diag([args.sigma_A**2, args.sigma_B**2])
    model = relaxation.RelaxationModel(raman_coeff=args.A, base_rate=args.B, covariance=cov)
    t1 = relaxation.predict_t1(model, args.T)
    report.add("T1", t1, unit="s")
    report.add("T1_minutes", t1.to("min"), unit="min")


def _handle_absorption(args, report: Report):
    report.add_input(args.sample)
    report.add_input(args.reference)
    sample = read_spectrum(args.sample, kind="intensity", resolution=args.resolution)
    reference = read_spectrum(args.reference, kind="intensity", resolution=args.resolution)
    alpha = absorption_coefficient(sample, reference, args.length_cm)
    region = _parse_region(args.region, args.baseline)
    integrated = integrate_line(alpha, region)
    base, _ = estimate_baseline(alpha, region)
    inside = alpha.window(region.lo, region.hi)
    corrected = alpha.value[inside] - base
    peak_alpha = float(np.max(corrected))
    line_center = args.line_center
    if line_center <= 0:
        peaks = [p for p in find_peaks(alpha, max(peak_alpha * 0.5, 1e-12))
                 if region.lo <= p[0] <= region.hi]
        line_center = peaks[0][0] if peaks else absorption_mod.DEFAULT_LINE_CENTER_CM
    analysis = absorption_mod.AbsorptionAnalysis(
        integrated_alpha=Quantity(integrated.value, integrated.uncertainty, "cm^-2"),
        concentration=Quantity(args.concentration, args.concentration_sigma, "cm^-3"),
        line_center=line_center,
        refractive_index=args.index,
        peak_alpha=Quantity(peak_alpha, 0.0, "cm^-1"),
    )
    dipole = absorption_mod.dipole_moment(analysis, convention=args.convention)
    report.note("convention", dipole.convention)
    report.note("degeneracy", "upper/lower level degeneracies assumed equal")
    report.note("line_center_cm-1", f"{line_center:.6g}")
    report.add("integrated_alpha", analysis.integrated_alpha, unit="cm^-2")
    report.add("peak_alpha", analysis.peak_alpha, unit="cm^-1")
    report.add("conversion_factor", absorption_mod.conversion_factor(analysis), unit="cm^-1")
    report.add("peak_conversion_factor", absorption_mod.peak_conversion_factor(analysis),
               unit="cm^-2")
    report.add("mu", dipole.mu, unit="D")
    report.add("tau_zpl", dipole.zpl_radiative_lifetime, unit="s")
    if args.plot_data:
        x_in = alpha.wavenumber[inside]
        write_plot_data(args.plot_data, {
            "wavenumber_cm-1": x_in,
            "alpha_cm-1": alpha.value[inside],
            "baseline_cm-1": base,
        })
    _maybe_figure(args, lambda plotting: plotting.spectrum_figure(
        alpha.wavenumber, alpha.value, regions=[(region.lo, region.hi)],
        ylabel="absorption coefficient (cm$^{-1}$)"))


def _handle_zpl(args, report: Report):
    report.add_input(args.pl)
    pl = read_spectrum(args.pl, kind="luminescence", resolution=args.resolution)
    zpl_region = _parse_region(args.zpl, args.baseline)
    sideband_region = _parse_region(args.sideband, args.baseline)
    alpha = None
    if args.alpha:
        report.add_input(args.alpha)
        alpha = read_spectrum(args.alpha, kind="absorption_coefficient",
                              resolution=args.resolution)
    analysis = luminescence.zpl_fraction(pl, zpl_region, sideband_region,
                                         zpl_alpha=alpha, path_cm=args.path_cm)
    report.add("zpl_area", analysis.zpl_area, unit="a.u. cm^-1")
    report.add("sideband_area", analysis.sideband_area, unit="a.u. cm^-1")
    report.add("sideband_to_zpl_ratio",
               analysis.sideband_area.over(analysis.zpl_area), unit="")
    report.add("reabsorption_factor", analysis.reabsorption_factor, unit="")
    report.add("zpl_fraction_raw", analysis.zpl_fraction_raw, unit="")
    report.add("zpl_fraction_corrected", analysis.zpl_fraction_corrected, unit="")
    if args.plot_data:
        write_plot_data(args.plot_data, {
            "wavenumber_cm-1": pl.wavenumber,
            "luminescence": pl.value,
        })
    _maybe_figure(args, lambda plotting: plotting.spectrum_figure(
        pl.wavenumber, pl.value,
        regions=[(zpl_region.lo, zpl_region.hi), (sideband_region.lo, sideband_region.hi)],
        ylabel="luminescence (a.u.)"))


def _handle_efficiency(args, report: Report):
    result = luminescence.radiative_efficiency(
        Quantity(args.excited_ns, args.excited_sigma_ns, "ns"),
        Quantity(args.radiative_us, args.radiative_sigma_us, "us"),
    )
    report.add("efficiency", result.radiative_efficiency, unit="")
    report.add("efficiency_pct", result.radiative_efficiency * 100.0, unit="%")


def _handle_lifetime(args, report: Report):
    datasets = []
    for path in args.data:
        report.add_input(path)
        d = modulation.read_modulation_csv(path)
        if d.has_reference:
            d = modulation.correct_instrument(d)
            report.note(f"corrected.{path}", "instrument response divided out")
        datasets.append(d)
    data = modulation.average_datasets(datasets)
    if len(datasets) > 1:
        report.note("averaging", f"pointwise mean of {len(datasets)} datasets before fitting")
    result = modulation.fit_lifetime(data, mode=args.mode, phase_offset=args.phase_offset)
    for w in result.warnings:
        report.warn(w)
    report.add("T1", result.t1, unit="s")
    report.add("T1_ns", result.t1.to("ns"), unit="ns")
    report.add("critical_frequency", result.critical_frequency, unit="Hz")
    report.add("homogeneous_linewidth", result.homogeneous_linewidth, unit="cm^-1")
    report.note("linewidth_upper_bound_cm-1",
                "0.001 (hole-burning bound, reported alongside the computed value)")
    t1 = result.t1.value
    amp_model, phase_model = modulation.response_model(data.frequency, t1)
    scale = float(amp_model @ data.amplitude) / float(amp_model @ amp_model)
    if args.plot_data:
        write_plot_data(args.plot_data, {
            "frequency_Hz": data.frequency,
            "amplitude": data.amplitude,
            "model_amplitude": scale * amp_model,
            "phase_deg": data.phase,
            "model_phase_deg": phase_model,
        })
    _maybe_figure(args, lambda plotting: plotting.modulation_figure(data, t1, scale))


def _handle_raman(args, report: Report):
    if len(args.laser) != len(args.spectrum):
        raise ValidationError("need one --laser per --spectrum")
    spectra = []
    for path in args.spectrum:
        report.add_input(path)
        spectra.append(read_spectrum(path, kind="luminescence", resolution=args.resolution))
    session = raman_mod.RamanSession(
        laser_energies=tuple(args.laser),
        spectra=tuple(spectra),
        match_tolerance=args.tolerance,
    )
    prominence = args.min_prominence
    if prominence <= 0:
        prominence = 0.05 * max(float(np.max(s.value)) for s in spectra)
    tracks = raman_mod.track_features(session, prominence)
    report.note("tolerance_cm-1", f"{session.match_tolerance:.6g}")
    for i, t in enumerate(tracks):
        report.note(f"track{i}_class", t.classification)
        if t.classification == raman_mod.RAMAN:
            report.add(f"track{i}_offset", raman_mod.mean_offset(t), unit="cm^-1")
        else:
            report.add(f"track{i}_position",
                       Quantity(t.position, t.position_std / np.sqrt(t.n), "cm^-1"),
                       unit="cm^-1")
    if args.expect:
        offsets = [float(tok) for tok in args.expect.split(",") if tok]
        for res in raman_mod.null_search(session, offsets, prominence):
            status = "detected" if res.detected else (
                "not-detected" if res.in_window else "out-of-window")
            report.note(f"expect_{res.offset:g}", status)
    _maybe_figure(args, lambda plotting: plotting.raman_figure(session, tracks))


def _handle_cooperativity(args, report: Report):
    cav = cavity_mod.CavitySpec(
        quality_factor=args.q,
        mode_volume=args.volume,
        wavelength=args.wavelength_um * 1e-6,
        refractive_index=args.index,
    )
    result = cavity_mod.cooperativity(args.mu_debye, args.linewidth_cm, cav)
    report.note("gamma_source",
                "hole-burning upper bound 0.001 cm^-1 unless overridden by --linewidth-cm")
    report.note("coupling_convention", "dielectric screening n^2 in g; no local-field factor")
    report.add("C", result.cooperativity, unit="")
    report.add("g", result.g, unit="Hz")
    report.add("kappa", result.kappa, unit="Hz")
    report.add("gamma", result.gamma, unit="Hz")
    if args.target_c > 0:
        q_needed = cavity_mod.threshold_q(args.mu_debye, args.linewidth_cm, cav, args.target_c)
        report.add("threshold_q", q_needed, unit="")


def _handle_synth(args, report: Report):
    params = {}
    for item in args.param:
        if "=" not in item:
            raise ValidationError(f"--param expects key=value, got '{item}'")
        key, raw = item.split("=", 1)
        try:
            params[key] = float(raw)
        except ValueError:
            params[key] = raw
    grid = None
    if args.grid:
        parts = args.grid.split(":")
        if len(parts) not in (3, 4):
            raise ValidationError(f"--grid expects start:stop:num[:log], got '{args.grid}'")
        grid = synth.GridSpec(float(parts[0]), float(parts[1]), int(parts[2]),
                              parts[3] if len(parts) == 4 else "linear")
    cfg = synth.SynthConfig(seed=args.seed, sigma=args.sigma,
                            noise_mode=args.noise_mode, grid=grid, params=params)
    result = synth.generate(args.target, cfg)
    written = result.write(args.out)
    for key, value in sorted(result.truth.items()):
        report.note(f"truth.{key}", value)
    for i, path in enumerate(written):
        report.note(f"file{i}", path)


_HANDLERS = {
    "levels": _handle_levels,
    "t1-fit": _handle_t1_fit,
    "t1-predict": _handle_t1_predict,
    "absorption": _handle_absorption,
    "zpl": _handle_zpl,
    "efficiency": _handle_efficiency,
    "lifetime": _handle_lifetime,
    "raman": _handle_raman,
    "cooperativity": _handle_cooperativity,
    "synth": _handle_synth,
}


if __name__ == "__main__":
    sys.exit(main())
