"""Decay-rate estimation: fit P(X = x) = C x^(-alpha) over a count range.

The default estimator regresses log density against log bin center on the
log-binned distribution, matching how straight lines are usually read off a
log-log frequency plot. A discrete truncated maximum-likelihood estimator is
provided as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .distributions import EmpiricalDistribution, LogBinnedDistribution, log_bin

__all__ = [
    "FitRange",
    "PowerLawFit",
    "InsufficientDataError",
    "DEFAULT_FIT_RANGE",
    "DEFAULT_BINS_PER_DECADE",
    "fit_powerlaw",
    "fit_powerlaw_mle",
    "bins_in_range",
    "fit_report_dict",
]

DEFAULT_BINS_PER_DECADE = 10


class InsufficientDataError(ValueError):
    """Too few usable points inside the fit range."""

    def __init__(self, message: str, points_found: int):
        self.points_found = points_found
        super().__init__(message)


@dataclass(frozen=True)
class FitRange:
    """Inclusive count range [x_min, x_max] a fit is restricted to.

    The default window is 10..100: below it empirical curves bend away from
    a pure power law, above it single-count frequencies get noisy.
    """

    x_min: int = 10
    x_max: int = 100

    def __post_init__(self) -> None:
        if self.x_min < 1:
            raise ValueError(f"x_min must be >= 1, got {self.x_min}")
        if self.x_max <= self.x_min:
            raise ValueError(f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]")

    def scaled(self, k: int) -> "FitRange":
        return FitRange(self.x_min * k, self.x_max * k)


DEFAULT_FIT_RANGE = FitRange()


@dataclass(frozen=True)
class PowerLawFit:
    """Result of one decay-rate fit.

    ``alpha`` is the decay exponent (minus the log-log slope), ``log_c`` the
    intercept as the natural log of C, so the fitted density at x is
    exp(log_c) * x**-alpha. ``alpha_stderr`` is the regression standard
    error of the slope, advisory only.
    """

    alpha: float
    log_c: float
    range: FitRange
    r_squared: float
    points_used: int
    method: str
    alpha_stderr: float = float("nan")

    def __post_init__(self) -> None:
        if not 0.0 <= self.r_squared <= 1.0:
            raise ValueError(f"r_squared must be in [0, 1], got {self.r_squared}")
        if self.points_used < 3:
            raise ValueError(f"a reported fit needs >= 3 points, got {self.points_used}")
        if self.method not in ("logbin-least-squares", "mle-discrete"):
            raise ValueError(f"unknown method {self.method!r}")

    def density_at(self, x) -> np.ndarray:
        return np.exp(self.log_c) * np.asarray(x, dtype=np.float64) ** (-self.alpha)


def bins_in_range(binned: LogBinnedDistribution, fit_range: FitRange) -> LogBinnedDistribution:
    """Nonempty bins whose covered counts lie fully inside the range."""
    step = binned.lattice_step
    keep = (
        (binned.bin_lower >= fit_range.x_min)
        & (binned.bin_upper - step <= fit_range.x_max)
        & (binned.bin_mass > 0)
    )
    return LogBinnedDistribution(
        binned.bin_lower[keep],
        binned.bin_upper[keep],
        binned.bin_mass[keep],
        binned.bin_density[keep],
        binned.bin_center[keep],
        binned.bins_per_decade,
        binned.zero_mass,
        step,
    )


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """Least squares of y on x: slope, intercept, r^2, slope stderr."""
    n = x.size
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise InsufficientDataError("all points share one log-x position", n)
    slope = float(dx @ (y - ym)) / sxx
    intercept = ym - slope * xm
    residuals = y - (slope * x + intercept)
    ss_res = float(residuals @ residuals)
    ss_tot = float((y - ym) @ (y - ym))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    r_squared = min(1.0, max(0.0, r_squared))
    stderr = math.sqrt(ss_res / (n - 2) / sxx) if n > 2 else float("nan")
    return slope, intercept, r_squared, stderr


def fit_powerlaw(
    dist: EmpiricalDistribution,
    fit_range: FitRange = DEFAULT_FIT_RANGE,
    bins_per_decade: int = DEFAULT_BINS_PER_DECADE,
) -> PowerLawFit:
    """Estimate alpha by OLS of log density vs log bin center in the range.

    Empty bins inside the range are skipped, never zero-filled. Raises
    :class:`InsufficientDataError` when fewer than 3 nonempty bins land
    inside the range.
    """
    binned = bins_in_range(log_bin(dist, bins_per_decade), fit_range)
    n = int(binned.bin_mass.size)
    if n < 3:
        raise InsufficientDataError(
            f"need >= 3 nonempty log bins inside [{fit_range.x_min}, {fit_range.x_max}], found {n}",
            n,
        )
    slope, intercept, r_squared, stderr = _ols(np.log(binned.bin_center), np.log(binned.bin_density))
    return PowerLawFit(
        alpha=-slope,
        log_c=intercept,
        range=fit_range,
        r_squared=r_squared,
        points_used=n,
        method="logbin-least-squares",
        alpha_stderr=stderr,
    )


def fit_powerlaw_mle(dist: EmpiricalDistribution, fit_range: FitRange = DEFAULT_FIT_RANGE) -> PowerLawFit:
    """Cross-check estimator: discrete truncated power-law likelihood.

    Maximizes the likelihood of the in-range mass under
    p(x) = x**-alpha / Z(alpha), Z summing over the integers of
    [x_min, x_max], by one-dimensional bounded search. ``r_squared`` is the
    coefficient of determination of the MLE-implied line against the default
    log-binned points, so the two methods' fit quality is comparable;
    ``points_used`` counts distinct in-range support values.
    """
    in_range = (dist.support >= fit_range.x_min) & (dist.support <= fit_range.x_max)
    support = dist.support[in_range].astype(np.float64)
    mass = dist.mass[in_range]
    n_points = int(support.size)
    covered = float(mass.sum())
    if covered <= 0.0 or n_points < 3:
        raise InsufficientDataError(
            f"need >= 3 distinct in-range counts with mass, found {n_points}",
            n_points,
        )
    grid = np.arange(fit_range.x_min, fit_range.x_max + 1, dtype=np.float64)
    log_grid = np.log(grid)
    mean_log_x = float((mass / covered) @ np.log(support))

    def negative_log_likelihood(alpha: float) -> float:
        # log Z via logsumexp for stability at large alpha
        terms = -alpha * log_grid
        peak = terms.max()
        log_z = peak + math.log(float(np.exp(terms - peak).sum()))
        return alpha * mean_log_x + log_z

    result = minimize_scalar(negative_log_likelihood, bounds=(1e-3, 30.0), method="bounded", options={"xatol": 1e-9})
    alpha = float(result.x)
    terms = -alpha * log_grid
    peak = terms.max()
    log_z = peak + math.log(float(np.exp(terms - peak).sum()))
    log_c = math.log(covered) - log_z

    binned = bins_in_range(log_bin(dist, DEFAULT_BINS_PER_DECADE), fit_range)
    if binned.bin_mass.size >= 2:
        y = np.log(binned.bin_density)
        y_hat = log_c - alpha * np.log(binned.bin_center)
        ss_res = float(((y - y_hat) ** 2).sum())
        ss_tot = float(((y - y.mean()) ** 2).sum())
        r_squared = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    else:
        r_squared = 1.0
    return PowerLawFit(
        alpha=alpha,
        log_c=log_c,
        range=fit_range,
        r_squared=r_squared,
        points_used=n_points,
        method="mle-discrete",
    )


def fit_report_dict(fit: PowerLawFit) -> dict:
    """Fit report payload for JSON serialization."""
    report = {
        "alpha": fit.alpha,
        "log_c": fit.log_c,
        "x_min": fit.range.x_min,
        "x_max": fit.range.x_max,
        "r_squared": fit.r_squared,
        "points_used": fit.points_used,
        "method": fit.method,
        "weighting": "unweighted",
    }
    if math.isfinite(fit.alpha_stderr):
        report["alpha_stderr"] = fit.alpha_stderr
    return report
