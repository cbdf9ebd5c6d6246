"""Singlet/triplet spin T1: decay extraction, rate-law fit, prediction.

The temperature model is a two-phonon (T^9) process plus a
temperature-independent rate,

    1/T1(T) = A T^9 + B

fit in rate space where the errors are closer to homoscedastic.  The
exponent is fixed at 9; a free-exponent variant exists as a diagnostic
only.  Each T1 point comes from an exponential fit to a polarization decay
series measured as the difference of two absorption-transient areas, which
forces a zero asymptote (no constant offset term).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fitcore
from .errors import (
    DataError,
    FitDegenerateError,
    RankDeficientError,
    ValidationError,
)
from .units import Quantity

T9_EXPONENT = 9.0


@dataclass(frozen=True)
class RelaxationModel:
    """Rate-law parameters: 1/T1 = raman_coeff * T^exponent + base_rate."""

    raman_coeff: float  # s^-1 K^-9
    base_rate: float  # s^-1
    covariance: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))
    exponent: float = T9_EXPONENT

    def __post_init__(self):
        if self.raman_coeff < 0 or self.base_rate < 0:
            raise ValidationError("rate coefficients must be >= 0")
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (2, 2):
            raise ValidationError("covariance must be 2x2")
        object.__setattr__(self, "covariance", cov)

    def rate(self, temperature_k: float) -> float:
        return self.raman_coeff * temperature_k**self.exponent + self.base_rate


@dataclass(frozen=True)
class PolarizationDecaySeries:
    """Delays (s, strictly ascending) and difference-signal samples.

    The signal is measurement-A minus measurement-B transient areas, so it
    decays to zero at long delay by construction.
    """

    delays: np.ndarray
    signal: np.ndarray
    temperature_k: float | None = None

    def __post_init__(self):
        d = np.asarray(self.delays, dtype=float)
        s = np.asarray(self.signal, dtype=float)
        if d.ndim != 1 or d.shape != s.shape:
            raise ValidationError("delays and signal must be 1-d arrays of equal length")
        if np.any(d < 0) or not np.all(np.diff(d) > 0):
            raise ValidationError("delays must be >= 0 and strictly ascending")
        object.__setattr__(self, "delays", d)
        object.__setattr__(self, "signal", s)


def t1_from_decay(series: PolarizationDecaySeries) -> Quantity:
    """Fit S(tau) = S0 exp(-tau/T1); returns T1 with its 1-sigma uncertainty."""
    tau = series.delays
    sig = series.signal
    if tau.size < 4:
        raise ValidationError(f"need at least 4 delay points, got {tau.size}")
    if np.all(sig == 0):
        raise FitDegenerateError("decay signal is identically zero")

    span = tau[-1] - tau[0]
    t1_floor = span * 1e-9

    def residual(p):
        s0, t1 = p
        t1 = max(t1, t1_floor)
        return s0 * np.exp(-tau / t1) - sig

    s0_init = sig[0] if sig[0] != 0 else sig[np.argmax(np.abs(sig))]
    best = (abs(s0_init), span / 3.0, np.inf)
    for t1_try in np.geomspace(span / 100.0, span * 10.0, 25):
        e = np.exp(-tau / t1_try)
        denom = float(e @ e)
        s0_try = float(e @ sig) / denom if denom > 0 else s0_init
        sse = float(np.sum((s0_try * e - sig) ** 2))
        if sse < best[2]:
            best = (s0_try, t1_try, sse)
    init = np.array([best[0], best[1]])
    result = fitcore.solve(
        fitcore.FitProblem(
            residual,
            init,
            bounds=(np.array([-np.inf, t1_floor]), np.array([np.inf, np.inf])),
        )
    )
    t1 = float(result.params[1])
    if not math.isfinite(t1) or t1 <= t1_floor * 1.01:
        raise FitDegenerateError(f"fitted T1 is not positive/meaningful: {t1}")
    return Quantity(t1, result.sigma(1), "s")


def fit_temperature_model(points) -> RelaxationModel:
    """Weighted fit of 1/T1 = A T^9 + B to (T, T1, sigma) points.

    Weights come from the propagated rate uncertainties sigma/T1^2 when
    every sigma is positive; otherwise the fit is unweighted.
    """
    temps, t1s, sigmas = _parse_points(points)
    rate = 1.0 / t1s
    params, cov, _ = _fit_rates(temps, rate, sigmas / t1s**2, free_exponent=False)
    return RelaxationModel(
        raman_coeff=float(params[0]), base_rate=float(params[1]), covariance=cov
    )


@dataclass(frozen=True)
class ExponentDiagnostic:
    """Result of the optional free-exponent diagnostic fit."""

    raman_coeff: float
    base_rate: float
    exponent: float
    exponent_sigma: float


def fit_temperature_model_free_exponent(points) -> ExponentDiagnostic:
    """Diagnostic variant with the power-law exponent left free."""
    temps, t1s, sigmas = _parse_points(points)
    params, cov, _ = _fit_rates(temps, 1.0 / t1s, sigmas / t1s**2, free_exponent=True)
    return ExponentDiagnostic(
        raman_coeff=float(params[0]),
        base_rate=float(params[1]),
        exponent=float(params[2]),
        exponent_sigma=float(np.sqrt(max(cov[2, 2], 0.0))),
    )


def _parse_points(points):
    arr = np.atleast_2d(np.asarray(points, dtype=float))
    if arr.shape[1] == 2:
        arr = np.column_stack([arr, np.zeros(arr.shape[0])])
    if arr.shape[1] != 3:
        raise ValidationError("points must be rows of (temperature_K, T1_s[, sigma_s])")
    temps, t1s, sigmas = arr[:, 0], arr[:, 1], arr[:, 2]
    if temps.size < 3:
        raise ValidationError(f"need at least 3 temperature points, got {temps.size}")
    if np.any(temps <= 0) or np.any(t1s <= 0) or np.any(sigmas < 0):
        raise DataError("temperatures and T1 must be positive, sigma >= 0")
    if np.all(temps == temps[0]):
        raise RankDeficientError("all points share one temperature")
    if temps.max() / temps.min() < 1.5:
        raise ValidationError(
            f"temperature span ratio {temps.max() / temps.min():.3g} is below 1.5"
        )
    return temps, t1s, sigmas


def _fit_rates(temps, rate, rate_sigma, free_exponent):
    weights = 1.0 / rate_sigma**2 if np.all(rate_sigma > 0) else np.ones(rate.size)

    if free_exponent:
        def residual(p):
            return p[0] * temps ** p[2] + p[1] - rate

        # start from the fixed-exponent solution; at A = 0 the exponent
        # column would be flat and the normal matrix singular
        fixed, _, _ = _fit_rates(temps, rate, rate_sigma, free_exponent=False)
        init = np.array([max(fixed[0], 1e-300), fixed[1], T9_EXPONENT])
        lo = np.array([0.0, 0.0, 0.5])
        hi = np.array([np.inf, np.inf, 20.0])
    else:
        def residual(p):
            return p[0] * temps**T9_EXPONENT + p[1] - rate

        init = np.zeros(2)
        lo = np.zeros(2)
        hi = np.full(2, np.inf)
    result = fitcore.solve(
        fitcore.FitProblem(residual, init, bounds=(lo, hi), weights=weights)
    )
    return result.params, result.covariance, result


def predict_t1(model: RelaxationModel, temperature_k: float) -> Quantity:
    """T1 = 1/(A T^9 + B) with first-order uncertainty from the covariance."""
    if not temperature_k > 0:
        raise ValidationError(f"temperature must be positive, got {temperature_k}")
    r = model.rate(temperature_k)
    if r <= 0:
        raise ValidationError("model rate is zero; T1 is unbounded")
    t1 = 1.0 / r
    grad = np.array([-(temperature_k**model.exponent) / r**2, -1.0 / r**2])
    var = float(grad @ model.covariance @ grad)
    return Quantity(t1, math.sqrt(max(var, 0.0)), "s")


def read_temperature_csv(path):
    """Rows of `temperature_K,T1_s,sigma_s` (sigma column optional)."""
    rows = _read_rows(path)
    return np.asarray(rows, dtype=float)


def read_decay_csv(path) -> PolarizationDecaySeries:
    """Rows of `delay_s,signal`."""
    rows = np.asarray(_read_rows(path), dtype=float)
    if rows.shape[1] < 2:
        raise DataError(f"decay file needs 2 columns: {path}")
    return PolarizationDecaySeries(delays=rows[:, 0], signal=rows[:, 1])


def _read_rows(path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise DataError(f"empty data file: {path}")
    start = 1 if any(c.isalpha() for c in lines[0].split(",")[0]) else 0
    rows = []
    width = None
    for ln in lines[start:]:
        parts = [p for p in (ln.split(",") if "," in ln else ln.split()) if p != ""]
        if width is None:
            width = len(parts)
        if len(parts) != width:
            raise DataError(f"inconsistent column count in {path}: '{ln}'")
        rows.append([float(p) for p in parts])
    return rows
