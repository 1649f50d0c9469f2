"""One-dimensional search helpers."""

from __future__ import annotations

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, a, b, tol=1e-4, maxiter=200):
    """Maximize a unimodal ``f`` on ``[a, b]``.

    Only interior points are evaluated, so ``f`` may be undefined at the
    endpoints. Returns ``(x, f(x))`` for the best point seen.
    """
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if b - a <= tol:
            break
        # ties move right; a NaN on either side is treated as -inf
        if fc > fd or (math.isnan(fd) and not math.isnan(fc)):
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    if fc >= fd or math.isnan(fd):
        return c, fc
    return d, fd

