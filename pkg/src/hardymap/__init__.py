"""Hardy-space membership of conformal disk maps, decided numerically.

The toolkit ties together four views of the same question: hyperbolic
distance to level sets of |psi|, harmonic measure of those level sets,
the weighted area integral of |psi|^(p-2) |psi'|^2, and direct growth
of circle means.  Each view is implemented independently so that they
can cross-check one another.
"""

__version__ = "0.1.0"

from .maps import catalog_get, parse_map_spec  # noqa: F401
