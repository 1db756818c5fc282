"""Grid-then-golden-section minimization on a box."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10):
    """Minimize a unimodal `f` on [a, b]; returns (x, f(x))."""
    if b - a <= tol:
        x = 0.5 * (a + b)
        return x, f(x)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    # the bracket endpoints may beat the interior when the minimum sits on the boundary
    for cand, fcand in ((c, fc), (d, fd)):
        if fcand < fx:
            x, fx = cand, fcand
    return x, fx


def coordinate_refine(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    lower: Sequence[float],
    upper: Sequence[float],
    step: Sequence[float],
    passes: int,
    tol: float,
):
    """Coordinate-wise golden-section descent from `x0`.

    Each coordinate is searched on [x - step, x + step] clipped to the box.
    Stops early once a full pass improves the objective by less than `tol`.
    Returns (x, f(x), converged).
    """
    x = np.array(x0, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    step = np.asarray(step, dtype=float)
    fx = f(x)
    for _ in range(passes):
        before = fx
        for i in range(x.size):
            lo = max(lower[i], x[i] - step[i])
            hi = min(upper[i], x[i] + step[i])

            def along(v, i=i):
                y = x.copy()
                y[i] = v
                return f(y)

            v, fv = golden_section(along, lo, hi, tol=1e-12)
            if fv < fx:
                x[i], fx = v, fv
        if before - fx < tol:
            return x, fx, True
    return x, fx, False
