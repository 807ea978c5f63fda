"""Map fitted decay rates to intelligence levels and build region plot data.

The decay rate of the failure-count tail determines which moments of the
distribution exist: a tail shallower than x^-2 has no finite mean, one
between x^-2 and x^-3 has a mean but no finite variance, and a steeper one
has both. Those three regimes are the Limited, Capable, and Autonomous
levels; boundary values belong to the lower level.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .distributions import EmpiricalDistribution, log_bin
from .powerlaw import DEFAULT_BINS_PER_DECADE, PowerLawFit

__all__ = [
    "Level",
    "IntelligenceLevel",
    "ClassificationRegions",
    "RegionPlotData",
    "BOUNDARY_LOW",
    "BOUNDARY_HIGH",
    "classify",
    "classify_alpha",
    "region_plot_data",
    "classification_report_dict",
]

BOUNDARY_LOW = 2.0
BOUNDARY_HIGH = 3.0


class Level(enum.Enum):
    LIMITED = "Limited"
    CAPABLE = "Capable"
    AUTONOMOUS = "Autonomous"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class IntelligenceLevel:
    """A level call together with the alpha that produced it."""

    level: Level
    alpha: float
    boundary_low: float = BOUNDARY_LOW
    boundary_high: float = BOUNDARY_HIGH

    def __post_init__(self) -> None:
        expected = _level_for(self.alpha, self.boundary_low, self.boundary_high)
        if expected is not self.level:
            raise ValueError(f"level {self.level} inconsistent with alpha {self.alpha}")


def _level_for(alpha: float, low: float, high: float) -> Level:
    if alpha <= low:
        return Level.LIMITED
    if alpha <= high:
        return Level.CAPABLE
    return Level.AUTONOMOUS


def classify_alpha(alpha: float) -> IntelligenceLevel:
    """Total step function of alpha; boundaries map to the lower level."""
    if not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha}")
    return IntelligenceLevel(_level_for(alpha, BOUNDARY_LOW, BOUNDARY_HIGH), alpha)


def classify(fit: PowerLawFit) -> IntelligenceLevel:
    return classify_alpha(fit.alpha)


@dataclass(frozen=True)
class ClassificationRegions:
    """Reference exponents and the anchor the reference lines pivot on.

    Both reference lines pass through (anchor_x, anchor_y), so the plane
    above the x^-2 line is the Limited region, between the lines Capable,
    and below the x^-3 line Autonomous.
    """

    anchor_x: float
    anchor_y: float
    reference_exponents: tuple[float, float] = (BOUNDARY_LOW, BOUNDARY_HIGH)

    def __post_init__(self) -> None:
        if not self.anchor_x >= 1:
            raise ValueError(f"anchor_x must be >= 1, got {self.anchor_x}")
        if not 0 < self.anchor_y <= 1:
            raise ValueError(f"anchor_y must be a probability, got {self.anchor_y}")

    def reference_density(self, exponent: float, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return self.anchor_y * (x / self.anchor_x) ** (-exponent)


@dataclass(frozen=True)
class RegionPlotData:
    """Everything a renderer needs for the log-log classification plot."""

    regions: ClassificationRegions
    scatter_x: np.ndarray
    scatter_y: np.ndarray
    line_x: np.ndarray
    fitted_y: np.ndarray
    reference_y: tuple[np.ndarray, np.ndarray]
    region_labels: tuple[str, str, str] = ("Limited", "Capable", "Autonomous")


def region_plot_data(
    dist: EmpiricalDistribution,
    fit: PowerLawFit,
    bins_per_decade: int = DEFAULT_BINS_PER_DECADE,
    line_points: int = 128,
) -> RegionPlotData:
    """Binned scatter, fitted line, and anchored x^-2 / x^-3 reference lines.

    The reference lines are anchored at (x_min, fitted density at x_min);
    regions read top to bottom as Limited, Capable, Autonomous.
    """
    binned = log_bin(dist, bins_per_decade).nonempty()
    anchor_x = float(fit.range.x_min)
    anchor_y = float(fit.density_at(anchor_x))
    regions = ClassificationRegions(anchor_x=anchor_x, anchor_y=anchor_y)
    x_hi = max(float(dist.support[-1]), anchor_x * 10.0)
    line_x = np.geomspace(anchor_x, x_hi, line_points)
    return RegionPlotData(
        regions=regions,
        scatter_x=binned.bin_center,
        scatter_y=binned.bin_density,
        line_x=line_x,
        fitted_y=fit.density_at(line_x),
        reference_y=(
            regions.reference_density(BOUNDARY_LOW, line_x),
            regions.reference_density(BOUNDARY_HIGH, line_x),
        ),
    )


def classification_report_dict(run_id: str, fit: PowerLawFit, level: IntelligenceLevel) -> dict:
    """Classification report payload for JSON serialization."""
    report = {
        "run_id": run_id,
        "alpha": fit.alpha,
        "r_squared": fit.r_squared,
        "level": level.level.value,
        "boundaries": [level.boundary_low, level.boundary_high],
    }
    if math.isfinite(fit.alpha_stderr):
        report["alpha_stderr"] = fit.alpha_stderr
    return report
