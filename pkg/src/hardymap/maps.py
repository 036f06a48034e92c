"""Catalog of conformal maps of the unit disk onto unbounded domains.

Each entry bundles closed-form value and derivative, an inverse where
one exists, the image-membership predicate backing the inverse's branch
domain, and the known Hardy number used as an end-to-end oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._num import ret
from .errors import (
    BranchDomainError,
    InverseUnavailableError,
    OutsideDiskError,
    ParameterRangeError,
    UnknownMapError,
)
from .hypgeo import DiskAutomorphism

# Evaluators refuse points this close to the unit circle.
BOUNDARY_GUARD = 1e-15


def _check_disk(z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0 - BOUNDARY_GUARD):
        raise OutsideDiskError("map evaluation requires |z| < 1 - 1e-15")
    return z


@dataclass(frozen=True)
class ConformalMap:
    """One catalog map psi and its closed-form companions.

    value_fn / deriv_fn / inverse_fn / contains_fn operate on raw
    complex scalars or arrays without argument checking; the public
    methods add the disk guard and branch-domain test.  contains_fn
    decides membership of a point in the image domain and is what the
    inverse's branch test uses.
    """

    name: str
    params: tuple[float, ...]
    base_value: complex
    known_hardy_number: float
    conj_symmetric: bool
    value_fn: Callable
    deriv_fn: Callable
    inverse_fn: Optional[Callable]
    contains_fn: Callable

    def __call__(self, z):
        return ret(self.value_fn(_check_disk(z)))

    def deriv(self, z):
        return ret(self.deriv_fn(_check_disk(z)))

    @property
    def has_inverse(self):
        return self.inverse_fn is not None

    def contains(self, w):
        w = np.asarray(w, dtype=complex)
        return ret(self.contains_fn(w))

    def inverse(self, w):
        if self.inverse_fn is None:
            raise InverseUnavailableError(f"{self.spec} has no closed-form inverse")
        w = np.asarray(w, dtype=complex)
        if not np.all(self.contains_fn(w)):
            raise BranchDomainError(f"point outside the image domain of {self.spec}")
        return ret(self.inverse_fn(w))

    @property
    def spec(self):
        """CLI spelling of this map, e.g. 'sector:0.5'."""
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{p:g}" for p in self.params)


def _halfplane():
    def val(z):
        return (1.0 + z) / (1.0 - z)

    def der(z):
        return 2.0 / (1.0 - z) ** 2

    def inv(w):
        return (w - 1.0) / (w + 1.0)

    def ins(w):
        return np.real(w) > 0.0

    return ConformalMap("halfplane", (), 1.0 + 0j, 1.0, True, val, der, inv, ins)


def _sector(beta):
    beta = float(beta)
    if not 0.0 < beta <= 2.0:
        raise ParameterRangeError("sector opening parameter must lie in (0, 2]")
    half_open = beta * (math.pi / 2.0)

    def val(z):
        return np.exp(beta * np.log((1.0 + z) / (1.0 - z)))

    def der(z):
        return 2.0 * beta * val(z) / (1.0 - z * z)

    def inv(w):
        u = np.exp(np.log(w) / beta)
        return (u - 1.0) / (u + 1.0)

    def ins(w):
        return (w != 0) & (np.abs(np.angle(w)) < half_open)

    return ConformalMap("sector", (beta,), 1.0 + 0j, 1.0 / beta, True, val, der, inv, ins)


def _strip():
    def val(z):
        return np.log((1.0 + z) / (1.0 - z))

    def der(z):
        return 2.0 / (1.0 - z * z)

    def inv(w):
        return np.tanh(w / 2.0)

    def ins(w):
        return np.abs(np.imag(w)) < math.pi / 2.0

    return ConformalMap("strip", (), 0j, math.inf, True, val, der, inv, ins)


def _koebe():
    def val(z):
        return z / (1.0 - z) ** 2

    def der(z):
        return (1.0 + z) / (1.0 - z) ** 3

    def inv(w):
        s = np.sqrt(1.0 + 4.0 * w)
        return 2.0 * w / (2.0 * w + 1.0 + s)

    def ins(w):
        return ~((np.imag(w) == 0.0) & (np.real(w) <= -0.25))

    return ConformalMap("koebe", (), 0j, 0.5, True, val, der, inv, ins)


_FAMILIES = {
    "halfplane": (0, lambda: _halfplane()),
    "sector": (1, _sector),
    "strip": (0, lambda: _strip()),
    "koebe": (0, lambda: _koebe()),
}


def catalog_get(name, params=()):
    """Build a catalog map by family name and parameter tuple."""
    if name not in _FAMILIES:
        known = ", ".join(sorted(_FAMILIES))
        raise UnknownMapError(f"unknown catalog map {name!r}; known families: {known}")
    arity, builder = _FAMILIES[name]
    params = tuple(float(p) for p in params)
    if len(params) != arity:
        raise ParameterRangeError(
            f"{name} takes {arity} parameter(s), got {len(params)}"
        )
    return builder(*params)


def parse_map_spec(spec):
    """Parse 'name' or 'name:param[,param...]' into a catalog map."""
    name, _, raw = spec.partition(":")
    if raw:
        try:
            params = tuple(float(x) for x in raw.split(","))
        except ValueError as exc:
            raise ParameterRangeError(f"could not parse parameters in {spec!r}") from exc
    else:
        params = ()
    return catalog_get(name.strip(), params)


def catalog_entries():
    """Family metadata for the CLI listing."""
    return [
        ("halfplane", "", "right half-plane", "1"),
        ("sector", "beta in (0, 2]", "sector of opening beta*pi", "1/beta"),
        ("strip", "", "horizontal strip of height pi", "infinity"),
        ("koebe", "", "plane minus the slit (-inf, -1/4]", "0.5"),
    ]


def precompose(m, aut):
    """psi o T for a disk automorphism T; the Hardy number is unchanged."""
    if not isinstance(aut, DiskAutomorphism):
        raise TypeError("precompose expects a DiskAutomorphism")

    def val(z):
        return m.value_fn(aut(z))

    def der(z):
        return m.deriv_fn(aut(z)) * aut.deriv(z)

    inv = None
    if m.inverse_fn is not None:

        def inv(w):
            return aut.inverse(m.inverse_fn(w))

    base = complex(np.asarray(m.value_fn(np.asarray(aut(0j), dtype=complex))))
    return ConformalMap(
        m.name + "+aut",
        m.params,
        base,
        m.known_hardy_number,
        False,
        val,
        der,
        inv,
        m.contains_fn,
    )
