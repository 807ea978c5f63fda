"""Model-size extrapolation: when does the decay rate reach a target level?

Fits log10(alpha) against log10(parameter count) across runs, inverts the
line at a target decay rate, and converts the required parameter count into
a chip-doubling timeline, a GPU count needed just to hold the weights, and
a cost comparison against a reference market capitalization. The
extrapolation is optimistic by construction: observed curves bend downward
at the largest model sizes, so a top-half fit is reported alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

__all__ = [
    "ScalingPoint",
    "ScalingLine",
    "HardwareAssumptions",
    "ScalingProjection",
    "NonExtrapolableError",
    "HUMAN_NEURON_TOTAL",
    "fit_scaling_line",
    "project_required_size",
    "moores_law_years",
    "hardware_cost",
    "neuron_comparison",
    "build_projection",
    "projection_report_dict",
]

# Combined neuron count of all living human brains, the yardstick used to put
# very large parameter counts in biological perspective.
HUMAN_NEURON_TOTAL = 1e21


class NonExtrapolableError(ValueError):
    """The fitted size-vs-rate line does not rise, so no projection exists."""


@dataclass(frozen=True)
class ScalingPoint:
    """One run's decay rate at a known model size."""

    param_count: int
    alpha: float
    run_id: str = ""

    def __post_init__(self) -> None:
        if self.param_count <= 0:
            raise ValueError(f"param_count must be > 0, got {self.param_count}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")


@dataclass(frozen=True)
class ScalingLine:
    """OLS line of log10(alpha) on log10(param_count)."""

    slope: float
    intercept: float
    r_squared: float
    points_used: int

    def __iter__(self) -> Iterator[float]:
        return iter((self.slope, self.intercept, self.r_squared))

    def alpha_at(self, param_count: float) -> float:
        return 10.0 ** (self.intercept + self.slope * math.log10(param_count))


@dataclass(frozen=True)
class HardwareAssumptions:
    """Constants behind the timeline and cost arithmetic.

    Defaults: 4 bytes per parameter, 80 GB devices at 30,000 USD each, a
    3.7 trillion USD reference market capitalization, chip performance
    doubling every 18 months, and 10^12 parameters as the largest model
    trainable today.
    """

    bytes_per_param: float = 4.0
    gpu_memory_bytes: float = 8e10
    gpu_unit_cost: float = 3e4
    reference_market_cap: float = 3.7e12
    doubling_months: float = 18.0
    current_max_params: float = 1e12

    def __post_init__(self) -> None:
        for name in ("bytes_per_param", "gpu_memory_bytes", "gpu_unit_cost", "reference_market_cap", "doubling_months", "current_max_params"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class ScalingProjection:
    """A full projection: line, inversion target, and headline figures."""

    slope: float
    intercept: float
    r_squared: float
    target_alpha: float
    required_params: float
    years_until: float
    gpu_count: float
    cost_ratio_vs_reference: float
    neuron_ratio: float
    assumptions: HardwareAssumptions
    top_half: ScalingLine | None = None

    def __post_init__(self) -> None:
        if not self.slope > 0:
            raise ValueError("a projection requires a rising line (slope > 0)")


def fit_scaling_line(points: Sequence[ScalingPoint]) -> ScalingLine:
    """OLS of log10(alpha) on log10(param_count); needs 2 distinct sizes."""
    if len({p.param_count for p in points}) < 2:
        raise ValueError(f"need >= 2 points with distinct param_count, got {len(points)}")
    xs = [math.log10(p.param_count) for p in points]
    ys = [math.log10(p.alpha) for p in points]
    n = len(xs)
    xm = sum(xs) / n
    ym = sum(ys) / n
    sxx = sum((x - xm) ** 2 for x in xs)
    sxy = sum((x - xm) * (y - ym) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = ym - slope * xm
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - ym) ** 2 for y in ys)
    r_squared = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return ScalingLine(slope, intercept, r_squared, n)


def project_required_size(line: ScalingLine, target_alpha: float = 3.0) -> float:
    """Invert the fitted line: the param count where alpha reaches target."""
    if not target_alpha > 0:
        raise ValueError(f"target_alpha must be > 0, got {target_alpha}")
    if line.slope <= 0:
        raise NonExtrapolableError(f"fitted slope {line.slope} is not positive; rate does not grow with size")
    return 10.0 ** ((math.log10(target_alpha) - line.intercept) / line.slope)


def moores_law_years(required_params: float, hw: HardwareAssumptions = HardwareAssumptions()) -> float:
    """Years of chip doubling to reach the required size from today's max."""
    if required_params <= hw.current_max_params:
        return 0.0
    return (hw.doubling_months / 12.0) * math.log2(required_params / hw.current_max_params)


def hardware_cost(required_params: float, hw: HardwareAssumptions = HardwareAssumptions()) -> tuple[float, float]:
    """(GPU count to hold the weights, that fleet's cost vs the reference cap)."""
    if not required_params > 0:
        raise ValueError(f"required_params must be > 0, got {required_params}")
    gpu_count = required_params * hw.bytes_per_param / hw.gpu_memory_bytes
    cost_ratio = gpu_count * hw.gpu_unit_cost / hw.reference_market_cap
    return gpu_count, cost_ratio


def neuron_comparison(required_params: float) -> float:
    """Required size as a multiple of every human neuron on Earth combined."""
    if not required_params > 0:
        raise ValueError(f"required_params must be > 0, got {required_params}")
    return required_params / HUMAN_NEURON_TOTAL


def _top_half_line(points: Sequence[ScalingPoint]) -> ScalingLine | None:
    ordered = sorted(points, key=lambda p: p.param_count)
    top = ordered[len(ordered) // 2 :]
    try:
        return fit_scaling_line(top)
    except ValueError:
        return None


def build_projection(
    points: Sequence[ScalingPoint],
    target_alpha: float = 3.0,
    hw: HardwareAssumptions = HardwareAssumptions(),
) -> ScalingProjection:
    """Fit, invert at the target rate, and attach the headline figures."""
    line = fit_scaling_line(points)
    required = project_required_size(line, target_alpha)
    gpu_count, cost_ratio = hardware_cost(required, hw)
    return ScalingProjection(
        slope=line.slope,
        intercept=line.intercept,
        r_squared=line.r_squared,
        target_alpha=target_alpha,
        required_params=required,
        years_until=moores_law_years(required, hw),
        gpu_count=gpu_count,
        cost_ratio_vs_reference=cost_ratio,
        neuron_ratio=neuron_comparison(required),
        assumptions=hw,
        top_half=_top_half_line(points),
    )


def projection_report_dict(projection: ScalingProjection) -> dict:
    """Projection report payload for JSON serialization."""
    hw = projection.assumptions
    report = {
        "slope": projection.slope,
        "intercept": projection.intercept,
        "r_squared": projection.r_squared,
        "target_alpha": projection.target_alpha,
        "required_params": projection.required_params,
        "years_until": projection.years_until,
        "gpu_count": projection.gpu_count,
        "cost_ratio": projection.cost_ratio_vs_reference,
        "neuron_ratio": projection.neuron_ratio,
        "extrapolation": "optimistic",
        "assumptions": {
            "bytes_per_param": hw.bytes_per_param,
            "gpu_memory_bytes": hw.gpu_memory_bytes,
            "gpu_unit_cost": hw.gpu_unit_cost,
            "reference_market_cap": hw.reference_market_cap,
            "doubling_months": hw.doubling_months,
            "current_max_params": hw.current_max_params,
        },
    }
    if projection.top_half is not None:
        report["top_half_fit"] = {
            "slope": projection.top_half.slope,
            "intercept": projection.top_half.intercept,
            "r_squared": projection.top_half.r_squared,
            "points_used": projection.top_half.points_used,
        }
    else:
        report["top_half_fit"] = None
    return report
