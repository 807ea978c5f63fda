# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stabilization kernel: stack-driven relaxation.

Sites are flat indices into a mixed-radix layout (last dimension fastest),
so the lattice dimension is a runtime parameter. A candidate stack holds
sites that may be unstable; each pop topples the site as many times as its
height allows in one step, which is legal because stabilization order never
changes the outcome.
"""

import numpy as np

cimport numpy as cnp

BACKEND = "compiled"

_MAX_DIM = 8


def stabilize(cnp.int64_t[::1] heights, cnp.int64_t[::1] sides, long long threshold, long long start=-1):
    """Relax every unstable site in place; return (topplings, dissipated).

    ``start`` >= 0 seeds the candidate stack with that site alone (enough
    after a single grain lands on an otherwise stable lattice); -1 scans the
    whole lattice for unstable sites first.
    """
    cdef Py_ssize_t n = heights.shape[0]
    cdef int ndim = <int> sides.shape[0]
    cdef cnp.int64_t stride[8]
    cdef cnp.int64_t side[8]
    cdef int d
    if ndim > 8:
        raise ValueError(f"at most {_MAX_DIM} dimensions supported, got {ndim}")
    for d in range(ndim):
        side[d] = sides[d]
    stride[ndim - 1] = 1
    for d in range(ndim - 2, -1, -1):
        stride[d] = stride[d + 1] * side[d + 1]

    stack_arr = np.empty(4096, dtype=np.int64)
    cdef cnp.int64_t[::1] stack = stack_arr
    cdef Py_ssize_t top = 0
    cdef Py_ssize_t i
    if start >= 0:
        if heights[start] >= threshold:
            stack[top] = start
            top += 1
    else:
        for i in range(n):
            if heights[i] >= threshold:
                if top >= stack.shape[0]:
                    stack_arr = np.concatenate([stack_arr, np.empty(stack_arr.shape[0], dtype=np.int64)])
                    stack = stack_arr
                stack[top] = i
                top += 1

    cdef long long topplings = 0
    cdef long long dissipated = 0
    cdef cnp.int64_t site, q, rem, coord, nb
    while top > 0:
        top -= 1
        site = stack[top]
        if heights[site] < threshold:
            continue
        q = heights[site] // threshold
        heights[site] -= q * threshold
        topplings += q
        if top + 2 * ndim > stack.shape[0]:
            stack_arr = np.concatenate([stack_arr, np.empty(stack_arr.shape[0], dtype=np.int64)])
            stack = stack_arr
        rem = site
        for d in range(ndim):
            coord = rem // stride[d]
            rem -= coord * stride[d]
            if coord > 0:
                nb = site - stride[d]
                heights[nb] += q
                if heights[nb] >= threshold:
                    stack[top] = nb
                    top += 1
            else:
                dissipated += q
            if coord < side[d] - 1:
                nb = site + stride[d]
                heights[nb] += q
                if heights[nb] >= threshold:
                    stack[top] = nb
                    top += 1
            else:
                dissipated += q
    return int(topplings), int(dissipated)
