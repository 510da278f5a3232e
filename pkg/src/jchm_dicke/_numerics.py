"""Small numerical helpers shared across modules."""
from __future__ import annotations

import numpy as np


def richardson(values, ratio=2.0, orders=(1, 2)):
    """Richardson table for samples ``values[i] = f(h / ratio**i)``.

    ``orders`` are the powers of ``h`` eliminated level by level.  Returns the
    most extrapolated estimate and its change relative to the best estimate
    of the previous level, used as a conservative error bar.
    """
    row = [float(v) for v in values]
    if len(row) < len(orders) + 1:
        raise ValueError("need one more sample than eliminated orders")
    best = prev = row[-1]
    for p in orders:
        f = ratio ** p
        row = [(f * row[i + 1] - row[i]) / (f - 1.0) for i in range(len(row) - 1)]
        prev, best = best, row[-1]
    return best, abs(best - prev)


def polynomial_extrapolate(h, values, degree=2):
    """Extrapolate samples at spacings ``h`` to ``h = 0`` with a polynomial.

    Uses the ``degree + 1`` samples with the smallest ``h``.  The error
    estimate is the change relative to the fit one degree lower.
    """
    h = np.asarray(h, dtype=float)
    v = np.asarray(values, dtype=float)
    order = np.argsort(h)
    h, v = h[order], v[order]
    if len(h) < degree + 1:
        raise ValueError("not enough samples for the requested degree")

    def at_zero(deg):
        hs, vs = h[:deg + 1], v[:deg + 1]
        # Neville on the fit points, evaluated at 0
        p = [vs[i] for i in range(len(hs))]
        for m in range(1, len(hs)):
            for i in range(len(hs) - m):
                p[i] = (hs[i + m] * p[i] - hs[i] * p[i + 1]) / (hs[i + m] - hs[i])
        return p[0]

    best = at_zero(degree)
    err = abs(best - at_zero(degree - 1)) if degree > 0 else float("nan")
    return best, err
