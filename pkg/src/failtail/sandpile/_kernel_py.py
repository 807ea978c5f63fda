"""Pure-Python stabilization kernel using synchronized numpy sweeps.

Each sweep topples every unstable site simultaneously, moving as many
threshold-sized grain packets as the site can shed at once. Because
stabilization of this model is order-independent, the sweep order reaches
the same final configuration and the same total toppling count as any
sequential order. This kernel is the fallback when the compiled one is
unavailable; it is exact, just slower.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def stabilize(heights: np.ndarray, sides: np.ndarray, threshold: int, start: int = -1) -> tuple[int, int]:
    """Relax every unstable site in place; return (topplings, dissipated).

    ``heights`` is the flat lattice array, ``sides`` the per-dimension
    extents. ``start`` is accepted for signature parity with the compiled
    kernel; the sweep always inspects the whole lattice.
    """
    arr = heights.reshape(tuple(int(s) for s in sides))
    topplings = 0
    dissipated = 0
    while True:
        q = arr // threshold
        moved = int(q.sum())
        if moved == 0:
            break
        topplings += moved
        arr -= q * threshold
        for axis in range(arr.ndim):
            lower = [slice(None)] * arr.ndim
            upper = [slice(None)] * arr.ndim
            lower[axis] = slice(None, -1)
            upper[axis] = slice(1, None)
            arr[tuple(lower)] += q[tuple(upper)]
            arr[tuple(upper)] += q[tuple(lower)]
            dissipated += int(q.take(0, axis=axis).sum()) + int(q.take(-1, axis=axis).sum())
    return topplings, dissipated
