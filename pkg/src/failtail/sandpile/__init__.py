"""Abelian sandpile simulator on d-dimensional hypercubic lattices.

Grains drop on uniformly random sites; a site holding at least 2d grains
topples, sending one grain to each of its 2d lattice neighbors, and grains
that leave the open boundary dissipate. Logged avalanche sizes (toppling
events per drive) exhibit a power-law tail in the self-organized critical
state, giving the toolkit a physical system with a known heavy tail to
exercise the fitting pipeline end to end.

The relaxation loop is the package's one hot kernel: a compiled extension
is used when available, with a pure-numpy fallback selected at import time
(override via the FAILTAIL_SANDPILE_KERNEL environment variable).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..distributions import EmpiricalDistribution, distribution_from_counts

__all__ = [
    "SandpileConfig",
    "SandpileState",
    "AvalancheLog",
    "drive_and_stabilize",
    "run_simulation",
    "avalanche_distribution",
    "kernel_backend",
    "simulation_metadata_dict",
]


def _load_backend(name: str | None):
    if name == "python":
        from . import _kernel_py

        return _kernel_py
    if name == "compiled":
        from . import _kernel  # type: ignore[attr-defined]

        return _kernel
    try:
        from . import _kernel  # type: ignore[attr-defined]

        return _kernel
    except ImportError:
        from . import _kernel_py

        return _kernel_py


_kernel_impl = _load_backend(os.environ.get("FAILTAIL_SANDPILE_KERNEL"))


def kernel_backend() -> str:
    """Name of the active relaxation kernel: "compiled" or "python"."""
    return _kernel_impl.BACKEND


@dataclass(frozen=True)
class SandpileConfig:
    """Simulation parameters; threshold is fixed at 2 x dimension.

    ``burn_in_drives`` defaults to 50 x side_length**dimension, enough
    drives to reach the stationary critical state before recording starts.
    """

    dimension: int
    side_length: int
    recorded_drives: int
    rng_seed: int = 0
    burn_in_drives: int | None = None
    threshold: int | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.dimension <= 6:
            raise ValueError(f"dimension must be in 1..6, got {self.dimension}")
        if self.side_length < 2:
            raise ValueError(f"side_length must be >= 2, got {self.side_length}")
        if self.recorded_drives < 1:
            raise ValueError(f"recorded_drives must be >= 1, got {self.recorded_drives}")
        expected = 2 * self.dimension
        if self.threshold is None:
            object.__setattr__(self, "threshold", expected)
        elif self.threshold != expected:
            raise ValueError(f"threshold must equal 2 x dimension = {expected}, got {self.threshold}")
        if self.burn_in_drives is None:
            object.__setattr__(self, "burn_in_drives", 50 * self.side_length**self.dimension)
        elif self.burn_in_drives < 0:
            raise ValueError(f"burn_in_drives must be >= 0, got {self.burn_in_drives}")

    @property
    def site_count(self) -> int:
        return self.side_length**self.dimension

    @property
    def sides(self) -> tuple[int, ...]:
        return (self.side_length,) * self.dimension


@dataclass
class SandpileState:
    """Mutable lattice state plus grain accounting.

    ``heights`` is flat (mixed-radix site indexing, last dimension fastest);
    use :attr:`lattice` for the shaped view. Conservation holds exactly at
    every stable point: grains_added == heights.sum() + grains_dissipated.
    """

    heights: np.ndarray
    sides: tuple[int, ...]
    threshold: int
    grains_added: int = 0
    grains_dissipated: int = 0

    @classmethod
    def zeros(cls, config: SandpileConfig) -> "SandpileState":
        return cls(
            heights=np.zeros(config.site_count, dtype=np.int64),
            sides=config.sides,
            threshold=config.threshold,
        )

    @property
    def lattice(self) -> np.ndarray:
        return self.heights.reshape(self.sides)

    def flat_index(self, site: Sequence[int]) -> int:
        if len(site) != len(self.sides):
            raise ValueError(f"site has {len(site)} coordinates, lattice has {len(self.sides)}")
        flat = 0
        for coord, side in zip(site, self.sides):
            if not 0 <= coord < side:
                raise ValueError(f"site {tuple(site)} outside lattice of sides {self.sides}")
            flat = flat * side + coord
        return flat

    def conservation_holds(self) -> bool:
        return self.grains_added == int(self.heights.sum()) + self.grains_dissipated


def _drive_flat(state: SandpileState, flat_site: int, sides_arr: np.ndarray, kernel) -> int:
    state.heights[flat_site] += 1
    state.grains_added += 1
    if state.heights[flat_site] < state.threshold:
        return 0
    topplings, dissipated = kernel.stabilize(state.heights, sides_arr, state.threshold, flat_site)
    state.grains_dissipated += dissipated
    return topplings


def drive_and_stabilize(state: SandpileState, site: Sequence[int]) -> tuple[SandpileState, int]:
    """Drop one grain at the given lattice coordinate and relax fully.

    Returns the (mutated) state and the avalanche size in toppling events.
    """
    flat = state.flat_index(site)
    sides_arr = np.asarray(state.sides, dtype=np.int64)
    size = _drive_flat(state, flat, sides_arr, _kernel_impl)
    return state, size


@dataclass(frozen=True)
class AvalancheLog:
    """Avalanche sizes for the recorded drives of one simulation."""

    sizes: np.ndarray
    config: SandpileConfig

    def __post_init__(self) -> None:
        sizes = np.asarray(self.sizes, dtype=np.int64)
        object.__setattr__(self, "sizes", sizes)
        if sizes.size != self.config.recorded_drives:
            raise ValueError(f"log has {sizes.size} sizes, config records {self.config.recorded_drives}")
        if sizes.size and int(sizes.min()) < 0:
            raise ValueError("avalanche sizes must be >= 0")


def run_simulation(config: SandpileConfig, backend: str | None = None) -> tuple[AvalancheLog, SandpileState]:
    """Drive a fresh lattice with seeded uniform random grain drops.

    Burn-in drives run first without logging; sizes are recorded for the
    remaining drives. The same config and seed always produce the same log,
    whichever kernel backend runs the relaxation.
    """
    kernel = _kernel_impl if backend is None else _load_backend(backend)
    state = SandpileState.zeros(config)
    sides_arr = np.asarray(config.sides, dtype=np.int64)
    rng = np.random.default_rng(config.rng_seed)
    sites = rng.integers(0, config.site_count, size=config.burn_in_drives + config.recorded_drives)
    sizes = np.empty(config.recorded_drives, dtype=np.int64)
    burn_in = config.burn_in_drives
    for i, flat_site in enumerate(sites):
        size = _drive_flat(state, int(flat_site), sides_arr, kernel)
        if i >= burn_in:
            sizes[i - burn_in] = size
    return AvalancheLog(sizes, config), state


def avalanche_distribution(log: AvalancheLog) -> tuple[EmpiricalDistribution, float]:
    """Distribution of nonzero avalanche sizes plus the zero-size fraction."""
    sizes = log.sizes
    if sizes.size == 0:
        raise ValueError("empty avalanche log")
    zero_fraction = float((sizes == 0).sum()) / sizes.size
    nonzero = sizes[sizes > 0]
    if nonzero.size == 0:
        raise ValueError("all avalanches had size zero; nothing to distribute")
    values, counts = np.unique(nonzero, return_counts=True)
    dist = distribution_from_counts({int(v): int(c) for v, c in zip(values, counts)})
    return dist, zero_fraction


def simulation_metadata_dict(
    config: SandpileConfig,
    state: SandpileState,
    log: AvalancheLog,
    backend: str | None = None,
) -> dict:
    """Metadata payload for JSON serialization, including conservation."""
    return {
        "dimension": config.dimension,
        "side_length": config.side_length,
        "threshold": config.threshold,
        "burn_in_drives": config.burn_in_drives,
        "recorded_drives": config.recorded_drives,
        "rng_seed": config.rng_seed,
        "avalanche_size_convention": "toppling-events",
        "kernel_backend": backend or kernel_backend(),
        "conservation": {
            "grains_added": state.grains_added,
            "height_sum": int(state.heights.sum()),
            "grains_dissipated": state.grains_dissipated,
            "exact": state.conservation_holds(),
        },
    }
