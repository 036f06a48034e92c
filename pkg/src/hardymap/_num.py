"""Small numeric helpers shared across modules."""

import math

import numpy as np


def ret(x):
    """Collapse 0-d numpy results back to python scalars."""
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


def golden_min(f, a, b, tol=1e-10):
    """Golden-section minimum of f on [a, b]; returns (x, f(x)).

    Assumes a single interior minimum; endpoints are included in the
    final comparison so a monotone f still yields the boundary value.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    fa, fb = f(a), f(b)
    while (b - a) > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    candidates = [(f1, x1), (f2, x2), (fa, a), (fb, b)]
    best = min(candidates, key=lambda t: t[0])
    return best[1], best[0]
