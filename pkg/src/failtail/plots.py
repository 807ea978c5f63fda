"""Plot-data emission: CSV series tables and static log-log SVG charts.

CSV is the primary format (consumers are scripts and papers); SVG rendering
is hand-rolled so the package needs no plotting dependency. Charts are
deterministic: identical data produces identical bytes, with the tool
version appearing only in an SVG metadata comment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .classifier import ClassificationRegions

__all__ = [
    "PlotSeries",
    "LogLogMapper",
    "emit_plot",
    "series_csv_bytes",
    "series_svg_bytes",
]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")
_REGION_FILLS = ("#d62728", "#ff7f0e", "#2ca02c")  # Limited, Capable, Autonomous


@dataclass(frozen=True)
class PlotSeries:
    """One named series of positive points for a log-log chart."""

    name: str
    xs: np.ndarray
    ys: np.ndarray
    kind: str = "line"

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=np.float64)
        ys = np.asarray(self.ys, dtype=np.float64)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if xs.shape != ys.shape or xs.ndim != 1:
            raise ValueError("series xs and ys must be parallel 1-D arrays")
        if self.kind not in ("scatter", "line"):
            raise ValueError(f"unknown series kind {self.kind!r}")


@dataclass(frozen=True)
class LogLogMapper:
    """Maps data coordinates to pixel coordinates on log-scaled axes.

    One decade along either axis always spans the same pixel distance, so
    to_px(10 * x, y).x - to_px(x, y).x == decade_width_px for any x.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    left: float = 70.0
    top: float = 40.0
    width: float = 520.0
    height: float = 420.0

    def __post_init__(self) -> None:
        if not (0 < self.x_min < self.x_max and 0 < self.y_min < self.y_max):
            raise ValueError("log-log bounds must be positive and ordered")

    @property
    def decade_width_px(self) -> float:
        return self.width / (math.log10(self.x_max) - math.log10(self.x_min))

    def to_px(self, x: float, y: float) -> tuple[float, float]:
        fx = (math.log10(x) - math.log10(self.x_min)) / (math.log10(self.x_max) - math.log10(self.x_min))
        fy = (math.log10(self.y_max) - math.log10(y)) / (math.log10(self.y_max) - math.log10(self.y_min))
        return self.left + fx * self.width, self.top + fy * self.height

    def clamp_y(self, y: float) -> float:
        return min(max(y, self.y_min), self.y_max)


def series_csv_bytes(series: Sequence[PlotSeries]) -> bytes:
    """Flat x,y,series table; floats use repr so parsing back is lossless."""
    if not series:
        raise ValueError("no series to emit")
    lines = ["x,y,series"]
    for s in series:
        for x, y in zip(s.xs, s.ys):
            lines.append(f"{float(x)!r},{float(y)!r},{s.name}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _bounds(series: Sequence[PlotSeries]) -> tuple[float, float, float, float]:
    xs = np.concatenate([s.xs for s in series])
    ys = np.concatenate([s.ys for s in series])
    xs = xs[xs > 0]
    ys = ys[ys > 0]
    if xs.size == 0 or ys.size == 0:
        raise ValueError("log-log chart needs positive data")
    # Snap to surrounding decades so tick labels land on powers of ten.
    x_lo = 10.0 ** math.floor(math.log10(xs.min()))
    x_hi = 10.0 ** math.ceil(math.log10(xs.max()) + 1e-12)
    y_lo = 10.0 ** math.floor(math.log10(ys.min()))
    y_hi = 10.0 ** math.ceil(math.log10(ys.max()) + 1e-12)
    if x_hi == x_lo:
        x_hi = x_lo * 10
    if y_hi == y_lo:
        y_hi = y_lo * 10
    return x_lo, x_hi, y_lo, y_hi


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _region_polygons(mapper: LogLogMapper, regions: ClassificationRegions, samples: int = 64) -> list[str]:
    """Three shaded bands: above the x^-2 line, between the lines, below x^-3."""
    xs = np.geomspace(mapper.x_min, mapper.x_max, samples)
    low_exp, high_exp = regions.reference_exponents
    upper_line = [mapper.to_px(x, mapper.clamp_y(float(regions.reference_density(low_exp, x)))) for x in xs]
    lower_line = [mapper.to_px(x, mapper.clamp_y(float(regions.reference_density(high_exp, x)))) for x in xs]
    top_edge = [(mapper.left, mapper.top), (mapper.left + mapper.width, mapper.top)]
    bottom_edge = [
        (mapper.left + mapper.width, mapper.top + mapper.height),
        (mapper.left, mapper.top + mapper.height),
    ]
    polygons = []
    limited = top_edge + list(reversed(upper_line))
    capable = upper_line + list(reversed(lower_line))
    autonomous = lower_line + bottom_edge
    for points, fill in zip((limited, capable, autonomous), _REGION_FILLS):
        path = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in points)
        polygons.append(f'<polygon points="{path}" fill="{fill}" fill-opacity="0.10" stroke="none"/>')
    return polygons


def _decade_ticks(lo: float, hi: float) -> list[int]:
    return list(range(int(round(math.log10(lo))), int(round(math.log10(hi))) + 1))


def series_svg_bytes(
    series: Sequence[PlotSeries],
    title: str = "",
    regions: ClassificationRegions | None = None,
    version: str = "",
) -> bytes:
    """Static log-log chart with optional shaded classification regions."""
    if not series:
        raise ValueError("no series to emit")
    x_lo, x_hi, y_lo, y_hi = _bounds(series)
    mapper = LogLogMapper(x_lo, x_hi, y_lo, y_hi)
    total_w = mapper.left + mapper.width + 170
    total_h = mapper.top + mapper.height + 60
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0f}" height="{total_h:.0f}" '
        f'viewBox="0 0 {total_w:.0f} {total_h:.0f}" font-family="sans-serif" font-size="12">',
        f"<!-- generated by failtail {version} -->" if version else "<!-- generated by failtail -->",
        f'<rect x="0" y="0" width="{total_w:.0f}" height="{total_h:.0f}" fill="white"/>',
    ]
    if regions is not None:
        parts.extend(_region_polygons(mapper, regions))
        label_x = mapper.left + mapper.width - 8
        for name, frac, fill in zip(("Limited", "Capable", "Autonomous"), (0.12, 0.5, 0.88), _REGION_FILLS):
            parts.append(
                f'<text x="{_fmt(label_x)}" y="{_fmt(mapper.top + frac * mapper.height)}" '
                f'text-anchor="end" fill="{fill}">{name}</text>'
            )
    # Frame and decade ticks.
    parts.append(
        f'<rect x="{_fmt(mapper.left)}" y="{_fmt(mapper.top)}" width="{_fmt(mapper.width)}" '
        f'height="{_fmt(mapper.height)}" fill="none" stroke="#333"/>'
    )
    bottom = mapper.top + mapper.height
    for exp in _decade_ticks(x_lo, x_hi):
        px, _ = mapper.to_px(10.0**exp, y_lo)
        parts.append(f'<line x1="{_fmt(px)}" y1="{_fmt(bottom)}" x2="{_fmt(px)}" y2="{_fmt(bottom + 5)}" stroke="#333"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{_fmt(bottom + 20)}" text-anchor="middle">1e{exp}</text>')
    for exp in _decade_ticks(y_lo, y_hi):
        _, py = mapper.to_px(x_lo, 10.0**exp)
        parts.append(f'<line x1="{_fmt(mapper.left - 5)}" y1="{_fmt(py)}" x2="{_fmt(mapper.left)}" y2="{_fmt(py)}" stroke="#333"/>')
        parts.append(f'<text x="{_fmt(mapper.left - 8)}" y="{_fmt(py + 4)}" text-anchor="end">1e{exp}</text>')
    if title:
        parts.append(f'<text x="{_fmt(mapper.left + mapper.width / 2)}" y="24" text-anchor="middle" font-size="14">{title}</text>')
    # Series.
    legend_y = mapper.top + 10
    for i, s in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        keep = (s.xs > 0) & (s.ys > 0)
        pts = [mapper.to_px(float(x), mapper.clamp_y(float(y))) for x, y in zip(s.xs[keep], s.ys[keep])]
        if not pts:
            continue
        if s.kind == "line":
            path = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in pts)
            parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        else:
            for px, py in pts:
                parts.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="3" fill="{color}" fill-opacity="0.8"/>')
        lx = mapper.left + mapper.width + 12
        parts.append(f'<line x1="{_fmt(lx)}" y1="{_fmt(legend_y)}" x2="{_fmt(lx + 18)}" y2="{_fmt(legend_y)}" stroke="{color}" stroke-width="3"/>')
        parts.append(f'<text x="{_fmt(lx + 24)}" y="{_fmt(legend_y + 4)}">{s.name}</text>')
        legend_y += 18
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


def emit_plot(
    series: Sequence[PlotSeries],
    out_base: Path,
    formats: Sequence[str] = ("csv",),
    title: str = "",
    regions: ClassificationRegions | None = None,
    version: str = "",
) -> list[Path]:
    """Write the series to out_base.csv and/or out_base.svg; returns paths."""
    if not series:
        raise ValueError("no series to emit")
    written = []
    for fmt in formats:
        if fmt == "csv":
            path = out_base.with_suffix(".csv")
            path.write_bytes(series_csv_bytes(series))
        elif fmt == "svg":
            path = out_base.with_suffix(".svg")
            path.write_bytes(series_svg_bytes(series, title=title, regions=regions, version=version))
        else:
            raise ValueError(f"unknown plot format {fmt!r}")
        written.append(path)
    return written
