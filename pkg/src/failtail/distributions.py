"""Empirical failure-count distributions: PMFs, log binning, averaging.

The PMF view keeps every observed count with its probability mass; the
log-binned view groups counts >= 1 into multiplicative bins for tail fitting
and plotting. Zero counts never enter a log bin (log 0 is undefined, and a
zero means the subject needed no retries at all); their mass is reported
separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .records import FailureRecord

__all__ = [
    "EmpiricalDistribution",
    "LogBinnedDistribution",
    "empirical_distribution",
    "distribution_from_counts",
    "average_distributions",
    "log_bin",
    "ccdf",
    "pmf_csv_bytes",
    "binned_csv_bytes",
]

_MASS_TOL = 1e-9


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Discrete probability distribution over non-negative integer counts.

    ``support`` is sorted and distinct, ``mass`` is the parallel probability
    of each value (all positive, summing to 1 within 1e-9), and
    ``total_weight`` is the weight the distribution was built from, kept so
    averaged distributions remember how much data backs them.
    """

    support: np.ndarray
    mass: np.ndarray
    total_weight: float

    def __post_init__(self) -> None:
        support = np.asarray(self.support, dtype=np.int64)
        mass = np.asarray(self.mass, dtype=np.float64)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mass", mass)
        if support.ndim != 1 or mass.shape != support.shape:
            raise ValueError("support and mass must be parallel 1-D sequences")
        if support.size == 0:
            raise ValueError("distribution must have non-empty support")
        if support[0] < 0:
            raise ValueError("support values must be >= 0")
        if support.size > 1 and not np.all(np.diff(support) > 0):
            raise ValueError("support must be strictly increasing")
        if not np.all(mass > 0):
            raise ValueError("every mass must be > 0")
        if abs(float(mass.sum()) - 1.0) > _MASS_TOL:
            raise ValueError(f"masses must sum to 1, got {float(mass.sum())!r}")
        if not self.total_weight > 0:
            raise ValueError(f"total_weight must be > 0, got {self.total_weight}")

    def mass_at(self, x: int) -> float:
        idx = np.searchsorted(self.support, x)
        if idx < self.support.size and self.support[idx] == x:
            return float(self.mass[idx])
        return 0.0

    def as_mapping(self) -> dict[int, float]:
        return {int(x): float(m) for x, m in zip(self.support, self.mass)}


@dataclass(frozen=True)
class LogBinnedDistribution:
    """Multiplicative binning of the positive part of a distribution.

    Bins are contiguous half-open intervals [lower, upper) with integer
    edges snapped to the support lattice (edges are multiples of
    ``lattice_step``, the gcd of the positive support). ``bin_density`` is
    bin mass divided by the bin's integer width, so density x width sums
    back to the covered mass. ``bin_center`` is the geometric mean of the
    half-step-shifted edges, sqrt((lower - s/2)(upper - s/2)) for lattice
    step s: the midpoint-rule edges of the covered block, which keeps the
    regression centers unbiased for discrete power laws. :func:`log_bin`
    emits a contiguous cover with empty bins kept (density 0); filtered
    views such as :meth:`nonempty` may have gaps, so instances only require
    ascending, non-overlapping bins. ``zero_mass`` is the probability at
    count 0, reported here because it never enters a bin.
    """

    bin_lower: np.ndarray
    bin_upper: np.ndarray
    bin_mass: np.ndarray
    bin_density: np.ndarray
    bin_center: np.ndarray
    bins_per_decade: int
    zero_mass: float
    lattice_step: int

    def __post_init__(self) -> None:
        lower = np.asarray(self.bin_lower, dtype=np.float64)
        upper = np.asarray(self.bin_upper, dtype=np.float64)
        for name, arr in (("bin_mass", self.bin_mass), ("bin_density", self.bin_density), ("bin_center", self.bin_center)):
            object.__setattr__(self, name, np.asarray(arr, dtype=np.float64))
        object.__setattr__(self, "bin_lower", lower)
        object.__setattr__(self, "bin_upper", upper)
        if not (lower.shape == upper.shape == self.bin_mass.shape == self.bin_density.shape == self.bin_center.shape):
            raise ValueError("bin arrays must be parallel")
        if self.bins_per_decade < 1:
            raise ValueError("bins_per_decade must be >= 1")
        if lower.size:
            if np.any(upper <= lower):
                raise ValueError("bins must have positive width")
            if np.any(lower[1:] < upper[:-1]):
                raise ValueError("bins must be ascending and non-overlapping")
            covered = float((self.bin_density * (upper - lower)).sum())
            if abs(covered - float(self.bin_mass.sum())) > _MASS_TOL:
                raise ValueError("density x width must reproduce bin mass")

    @property
    def covered_mass(self) -> float:
        return float(self.bin_mass.sum())

    def nonempty(self) -> "LogBinnedDistribution":
        """The same binning with empty bins dropped (for plotting/fitting)."""
        keep = self.bin_mass > 0
        return LogBinnedDistribution(
            self.bin_lower[keep],
            self.bin_upper[keep],
            self.bin_mass[keep],
            self.bin_density[keep],
            self.bin_center[keep],
            self.bins_per_decade,
            self.zero_mass,
            self.lattice_step,
        )


def empirical_distribution(records: Sequence[FailureRecord]) -> EmpiricalDistribution:
    """Weighted frequency distribution of the records' failure counts."""
    if not records:
        raise ValueError("cannot build a distribution from zero records")
    totals: dict[int, float] = {}
    for record in records:
        totals[record.failure_count] = totals.get(record.failure_count, 0.0) + record.weight
    return distribution_from_counts(totals)


def distribution_from_counts(counts: Mapping[int, float]) -> EmpiricalDistribution:
    """Distribution from a mapping of count -> non-negative weight."""
    items = [(int(x), float(w)) for x, w in counts.items() if w > 0]
    if not items:
        raise ValueError("no positive weights")
    items.sort()
    support = np.array([x for x, _ in items], dtype=np.int64)
    weights = np.array([w for _, w in items], dtype=np.float64)
    total = float(weights.sum())
    return EmpiricalDistribution(support, weights / total, total)


def average_distributions(dists: Sequence[EmpiricalDistribution]) -> EmpiricalDistribution:
    """Pointwise arithmetic mean of the masses over the union support.

    This mirrors cross-seed averaging: each input distribution contributes
    equally regardless of its total weight. The result is renormalized to
    absorb floating-point drift; total_weight is the sum of the inputs'.
    """
    if not dists:
        raise ValueError("cannot average zero distributions")
    union = dists[0].support
    for dist in dists[1:]:
        union = np.union1d(union, dist.support)
    accum = np.zeros(union.shape, dtype=np.float64)
    for dist in dists:
        idx = np.searchsorted(union, dist.support)
        accum[idx] += dist.mass
    mean = accum / len(dists)
    mean /= mean.sum()
    return EmpiricalDistribution(union, mean, sum(d.total_weight for d in dists))


def _snapped_edges(lo: int, hi: int, bins_per_decade: int) -> list[int]:
    """Integer bin edges from lo to hi+1, multiplicative within rounding.

    The ladder ascends by a factor of 10^(1/bins_per_decade), each edge
    snapped to the nearest integer; duplicates collapse. A final edge that
    lands exactly on hi is merged into the terminal edge hi+1 so the last
    bin includes the right endpoint instead of becoming a sliver.
    """
    edges = [lo]
    ratio = 10.0 ** (1.0 / bins_per_decade)
    j = 1
    while True:
        cand = round(lo * ratio**j)
        j += 1
        if cand <= edges[-1]:
            continue
        if cand > hi:
            break
        edges.append(int(cand))
    if len(edges) > 1 and edges[-1] == hi:
        edges.pop()
    edges.append(hi + 1)
    return edges


def log_bin(dist: EmpiricalDistribution, bins_per_decade: int = 10) -> LogBinnedDistribution:
    """Group the positive support into multiplicative bins.

    Edges are built on the support lattice: with g = gcd of the positive
    support, the ladder is laid out on support/g and scaled back by g, so a
    distribution whose counts are all multiples of g gets bins that map
    exactly to the unscaled binning. Count 0 is excluded and its mass
    reported as ``zero_mass``.
    """
    if bins_per_decade < 1:
        raise ValueError("bins_per_decade must be >= 1")
    positive = dist.support >= 1
    zero_mass = float(dist.mass[~positive].sum())
    support = dist.support[positive]
    mass = dist.mass[positive]
    if support.size == 0:
        empty = np.array([], dtype=np.float64)
        return LogBinnedDistribution(empty, empty, empty, empty, empty, bins_per_decade, zero_mass, 1)
    step = int(np.gcd.reduce(support))
    reduced_lo = int(support[0] // step)
    reduced_hi = int(support[-1] // step)
    edges = np.array(_snapped_edges(reduced_lo, reduced_hi, bins_per_decade), dtype=np.int64) * step
    cum = np.concatenate([[0.0], np.cumsum(mass)])
    idx = np.searchsorted(support, edges, side="left")
    bin_mass = cum[idx[1:]] - cum[idx[:-1]]
    lower = edges[:-1].astype(np.float64)
    upper = edges[1:].astype(np.float64)
    density = bin_mass / (upper - lower)
    half = step / 2.0
    center = np.sqrt((lower - half) * (upper - half))
    return LogBinnedDistribution(lower, upper, bin_mass, density, center, bins_per_decade, zero_mass, step)


def ccdf(dist: EmpiricalDistribution, x: int) -> float:
    """P(X >= x), computed exactly as 1 minus the mass strictly below x."""
    if x < 0:
        raise ValueError("x must be >= 0")
    idx = int(np.searchsorted(dist.support, x, side="left"))
    below = float(dist.mass[:idx].sum())
    return 1.0 - below


def pmf_csv_bytes(dist: EmpiricalDistribution) -> bytes:
    lines = ["x,mass"]
    lines += [f"{int(x)},{float(m)!r}" for x, m in zip(dist.support, dist.mass)]
    return ("\n".join(lines) + "\n").encode("utf-8")


def binned_csv_bytes(binned: LogBinnedDistribution) -> bytes:
    lines = ["bin_lower,bin_upper,density"]
    lines += [
        f"{float(lo)!r},{float(up)!r},{float(d)!r}"
        for lo, up, d in zip(binned.bin_lower, binned.bin_upper, binned.bin_density)
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")
