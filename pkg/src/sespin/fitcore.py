"""Shared weighted nonlinear least-squares engine (damped Gauss-Newton).

All fits in the package run through :func:`solve`: a Levenberg-Marquardt
style trust strategy with a central-difference numerical Jacobian, optional
per-point weights, and box bounds enforced by projection.  The engine is
deterministic for identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NonFiniteResidualError, RankDeficientError, ValidationError

_FD_REL_STEP = 1e-6
_FD_ABS_STEP = 1e-8


@dataclass
class FitConfig:
    ftol: float = 1e-10  # relative chi-square change
    xtol: float = 1e-10  # step-norm threshold
    max_iter: int = 200


@dataclass
class FitProblem:
    """Residual function, starting point, optional bounds and weights.

    residual(params) must return a vector at least as long as params.
    weights multiply squared residuals in chi-square; bounds are
    (lower, upper) arrays with lower <= initial <= upper.
    """

    residual: Callable[[np.ndarray], np.ndarray]
    initial_params: Sequence[float]
    bounds: tuple | None = None
    weights: Sequence[float] | None = None


@dataclass
class FitResult:
    params: np.ndarray
    covariance: np.ndarray
    chi_square: float
    converged: bool
    iterations: int
    chi2_trace: list = field(default_factory=list)

    def sigma(self, index: int) -> float:
        """1-sigma uncertainty of one parameter from the covariance."""
        return float(np.sqrt(max(self.covariance[index, index], 0.0)))


@dataclass
class JacobianCheck:
    max_relative_deviation: float
    flat_columns: tuple


def _eval_residual(fun, params, last_good=None):
    r = np.atleast_1d(np.asarray(fun(np.asarray(params, dtype=float)), dtype=float))
    if not np.all(np.isfinite(r)):
        raise NonFiniteResidualError(
            "residual returned non-finite values", last_params=last_good
        )
    return r


def _fd_steps(params):
    return np.maximum(_FD_REL_STEP * np.abs(params), _FD_ABS_STEP)


def numerical_jacobian(fun, params, last_good=None) -> np.ndarray:
    """Central-difference Jacobian, step = max(1e-6 |p|, 1e-8) per column."""
    p = np.asarray(params, dtype=float)
    steps = _fd_steps(p)
    cols = []
    for j, h in enumerate(steps):
        up, dn = p.copy(), p.copy()
        up[j] += h
        dn[j] -= h
        cols.append((_eval_residual(fun, up, last_good) - _eval_residual(fun, dn, last_good)) / (2.0 * h))
    return np.column_stack(cols)


def _validate(problem: FitProblem):
    p0 = np.asarray(problem.initial_params, dtype=float)
    if p0.ndim != 1 or p0.size == 0:
        raise ValidationError("initial_params must be a non-empty 1-d vector")
    if not np.all(np.isfinite(p0)):
        raise ValidationError("initial_params must be finite")
    lo = hi = None
    if problem.bounds is not None:
        lo = np.asarray(problem.bounds[0], dtype=float)
        hi = np.asarray(problem.bounds[1], dtype=float)
        if lo.shape != p0.shape or hi.shape != p0.shape:
            raise ValidationError("bounds must match the parameter shape")
        if np.any(lo > p0) or np.any(p0 > hi):
            raise ValidationError("bounds must satisfy lower <= initial <= upper")
    return p0, lo, hi


def _project(p, lo, hi):
    if lo is None:
        return p
    return np.clip(p, lo, hi)


def solve(problem: FitProblem, config: FitConfig | None = None) -> FitResult:
    """Minimize the weighted sum of squared residuals.

    Converged when the relative chi-square change drops below ftol or the
    step norm below xtol within max_iter iterations.  Covariance is
    chi2/(n-k) * (J^T W J)^-1 at the solution.  Raises
    NonFiniteResidualError (carrying the last finite parameters) on a
    non-finite residual and RankDeficientError on a singular normal matrix.
    """
    cfg = config or FitConfig()
    p, lo, hi = _validate(problem)
    r = _eval_residual(problem.residual, p)
    m, k = r.size, p.size
    if m < k:
        raise ValidationError(f"need residual dimension >= {k}, got {m}")
    if problem.weights is None:
        w = np.ones(m)
    else:
        w = np.asarray(problem.weights, dtype=float)
        if w.shape != r.shape:
            raise ValidationError("weights must match the residual length")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValidationError("weights must be finite and >= 0")

    chi2 = float(np.sum(w * r * r))
    trace = [chi2]
    lam = 1e-3
    converged = False
    iterations = 0
    jac = None
    for iterations in range(1, cfg.max_iter + 1):
        jac = numerical_jacobian(problem.residual, p, last_good=p)
        jtw = jac.T * w
        hess = jtw @ jac
        grad = jtw @ r
        if not np.all(np.isfinite(hess)):
            raise NonFiniteResidualError("non-finite normal matrix", last_params=p)
        accepted = False
        p_new = p
        r_new = r
        chi2_new = chi2
        for _ in range(25):
            damped = hess + lam * np.diag(np.diag(hess))
            try:
                delta = np.linalg.solve(damped, -grad)
            except np.linalg.LinAlgError as exc:
                raise RankDeficientError(
                    "singular normal matrix: a parameter is unconstrained"
                ) from exc
            p_new = _project(p + delta, lo, hi)
            r_new = _eval_residual(problem.residual, p_new, last_good=p)
            chi2_new = float(np.sum(w * r_new * r_new))
            if chi2_new <= chi2:
                accepted = True
                lam = max(lam / 3.0, 1e-14)
                break
            lam *= 4.0
            if lam > 1e14:
                break
        if not accepted:
            # No downhill step exists at any damping: numerical minimum.
            converged = True
            break
        step = p_new - p
        rel_change = (chi2 - chi2_new) / max(chi2, np.finfo(float).tiny)
        p, r, chi2 = p_new, r_new, chi2_new
        trace.append(chi2)
        if rel_change < cfg.ftol or np.linalg.norm(step) < cfg.xtol * (
            cfg.xtol + np.linalg.norm(p)
        ):
            converged = True
            break

    jac = numerical_jacobian(problem.residual, p, last_good=p)
    jtw = jac.T * w
    hess = jtw @ jac
    try:
        hinv = np.linalg.inv(hess)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientError(
            "singular normal matrix at the solution"
        ) from exc
    dof = max(m - k, 1)
    cov = (chi2 / dof) * hinv
    cov = 0.5 * (cov + cov.T)
    return FitResult(
        params=p,
        covariance=cov,
        chi_square=chi2,
        converged=converged,
        iterations=iterations,
        chi2_trace=trace,
    )


def jacobian_check(problem: FitProblem, params: Sequence[float]) -> JacobianCheck:
    """Compare the internal Jacobian against an independent finite difference.

    The reference uses a larger, Richardson-extrapolated central difference.
    Columns with no sensitivity in either estimate are flagged as flat and
    excluded from the deviation.
    """
    p = np.asarray(params, dtype=float)
    j_int = numerical_jacobian(problem.residual, p)
    scale = np.maximum(np.abs(p), 1.0)
    h = (np.finfo(float).eps ** (1.0 / 3.0)) * scale
    j_ref = np.empty_like(j_int)
    for j in range(p.size):
        j_ref[:, j] = _richardson_column(problem.residual, p, j, h[j])
    flat = []
    worst = 0.0
    for j in range(p.size):
        col_scale = max(np.max(np.abs(j_ref[:, j])), np.max(np.abs(j_int[:, j])))
        if col_scale < 1e-12:
            flat.append(j)
            continue
        worst = max(worst, float(np.max(np.abs(j_int[:, j] - j_ref[:, j])) / col_scale))
    return JacobianCheck(max_relative_deviation=worst, flat_columns=tuple(flat))


def _richardson_column(fun, p, j, h):
    def central(step):
        up, dn = p.copy(), p.copy()
        up[j] += step
        dn[j] -= step
        return (_eval_residual(fun, up) - _eval_residual(fun, dn)) / (2.0 * step)

    d1 = central(h)
    d2 = central(h / 2.0)
    return (4.0 * d2 - d1) / 3.0
