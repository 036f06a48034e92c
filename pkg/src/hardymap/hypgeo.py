"""Hyperbolic distance and Green function of the unit disk.

The two are linked by g = log((e^d + 1)/(e^d - 1)) where d is the
hyperbolic distance between the points.  Everything here is closed-form
disk geometry, plus the sharp constant of the exponential envelope
log((e^x + 1)/(e^x - 1)) <= C e^{-x} used by the tail criteria.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._num import ret
from .errors import OutsideDiskError, PoleError


def _require_in_disk(z, who):
    r = np.abs(z)
    if np.any(r >= 1.0):
        raise OutsideDiskError(
            f"{who} must lie in the open unit disk, got max |{who}| = {float(np.max(r)):.17g}"
        )


def hyp_dist(z, w):
    """Hyperbolic distance log((1 + t)/(1 - t)) with t = |z - w| / |1 - z conj(w)|.

    Evaluated as 2 log(a + b) - log((1 - |z|^2)(1 - |w|^2)) with
    a = |z - w| and b = |1 - z conj(w)|, using b^2 - a^2 =
    (1 - |z|^2)(1 - |w|^2); this stays accurate as t -> 1.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _require_in_disk(z, "z")
    _require_in_disk(w, "w")
    a = np.abs(z - w)
    b = np.abs(1.0 - z * np.conj(w))
    rz = np.abs(z)
    rw = np.abs(w)
    s = (1.0 - rz) * (1.0 + rz) * (1.0 - rw) * (1.0 + rw)
    d = 2.0 * np.log(a + b) - np.log(s)
    d = np.where(z == w, 0.0, np.maximum(d, 0.0))
    return ret(d)


def hyp_dist_origin(r):
    """Distance from 0 to any point of modulus r: log((1 + r)/(1 - r))."""
    r = np.asarray(r, dtype=float)
    if np.any((r < 0.0) | (r >= 1.0)):
        raise OutsideDiskError("modulus must satisfy 0 <= r < 1")
    return ret(np.log1p(r) - np.log1p(-r))


def green_disk(z, w):
    """Green function of the disk, log |(1 - z conj(w)) / (z - w)|."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _require_in_disk(z, "z")
    _require_in_disk(w, "w")
    a = np.abs(z - w)
    if np.any(a == 0.0):
        raise PoleError("Green function has a pole at z = w")
    b = np.abs(1.0 - z * np.conj(w))
    return ret(np.log(b) - np.log(a))


def green_via_distance(d):
    """Green function value from hyperbolic distance: log((e^d + 1)/(e^d - 1)).

    Strictly decreasing, +inf at d -> 0 and ~ 2 e^{-d} at infinity.  The
    identity with 2 artanh(e^{-d}) picks whichever form is stable.
    """
    shape = np.shape(d)
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if np.any(d <= 0.0):
        raise PoleError("distance must be positive; the value has a pole at d = 0")
    out = np.empty_like(d)
    small = d < 1.0
    ds = d[small]
    out[small] = np.log((np.exp(ds) + 1.0) / np.expm1(ds))
    dl = d[~small]
    out[~small] = 2.0 * np.arctanh(np.exp(-dl))
    return ret(out.reshape(shape))


def bound_constant(x0):
    """Smallest C with log((e^x + 1)/(e^x - 1)) <= C e^{-x} for all x >= x0.

    With t = e^{-x} the left side equals 2 artanh(t), and 2 artanh(t)/t
    increases in t, so the supremum over x >= x0 sits at x0 itself:
    C = 2 artanh(e^{-x0}) e^{x0}.  Decreases to 2 as x0 grows.
    """
    x0 = float(x0)
    if not x0 > 0.0:
        raise ValueError("x0 must be positive")
    t = math.exp(-x0)
    if t < 1e-8:
        return 2.0
    return 2.0 * math.atanh(t) / t


@dataclass(frozen=True)
class DiskAutomorphism:
    """Möbius automorphism z -> e^{i phase} (z - a) / (1 - conj(a) z)."""

    a: complex = 0j
    phase: float = 0.0

    def __post_init__(self):
        if abs(self.a) >= 1.0:
            raise OutsideDiskError("automorphism center must satisfy |a| < 1")

    @property
    def _rot(self):
        return complex(math.cos(self.phase), math.sin(self.phase))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return ret(self._rot * (z - self.a) / (1.0 - np.conj(self.a) * z))

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        aa = abs(self.a)
        return ret(self._rot * (1.0 - aa * aa) / (1.0 - np.conj(self.a) * z) ** 2)

    def inverse(self, w):
        w = np.asarray(w, dtype=complex)
        u = w / self._rot
        return ret((u + self.a) / (1.0 + np.conj(self.a) * u))
