"""Walk-on-spheres estimation of harmonic measure for level curves.

The quantity estimated here is the probability that Brownian motion
released at the origin hits the curve where ``|psi| = alpha`` before it
reaches the unit circle.  Each walker repeatedly jumps to a uniformly
random point on the largest centered circle touching neither boundary
piece and is absorbed once it enters an epsilon shell around either one.

The curve is represented by a polyline through the points returned by
:func:`hardymap.levelset.sample_levelset`.  Distance queries run against
a KD-tree over segment midpoints: the tree distance minus the longest
half-segment is a lower bound on the true distance, so exact point to
segment distances are only computed for walkers that might be close.
Step radii are always lower bounds on the distance to the curve, which
keeps every jump inside the domain.

Walkers run in fixed blocks of 4096, each block driven by its own
counter-based Philox stream keyed on (seed, block index).  Block tallies
are integers and the reduction is an exact sum, so the estimate is
bit-identical however many threads process blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ._threads import parallel_map
from .errors import EmptyLevelSetError
from .levelset import dist_to_levelset, sample_levelset
from .maps import ConformalMap

BLOCK_SIZE = 4096
DEFAULT_EPSILON = 1e-3
DEFAULT_WALKERS = 100_000
TIMEOUT_FRACTION = 1e-3

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class WoSConfig:
    """Estimator knobs: absorption shell, step cap, sample size, seed."""

    epsilon: float = DEFAULT_EPSILON
    max_steps: int = 10_000
    n_walkers: int = DEFAULT_WALKERS
    seed: int = 0

    def __post_init__(self) -> None:
        if not 1e-6 <= self.epsilon <= 1e-2:
            raise ValueError(f"epsilon must lie in [1e-6, 1e-2], got {self.epsilon}")
        if self.max_steps < 1_000:
            raise ValueError(f"max_steps must be >= 1000, got {self.max_steps}")
        if self.n_walkers < 1_000:
            raise ValueError(f"n_walkers must be >= 1000, got {self.n_walkers}")


@dataclass(frozen=True)
class MeasureEstimate:
    """Hitting probability with its binomial standard error.

    ``degenerate`` marks the short-circuit case where the origin itself
    lies inside the absorption shell.  Timeouts are counted as circle
    hits; an estimate with more than 0.1% of them is ``unreliable``.
    """

    value: float
    std_error: float
    n_walkers: int
    n_timeouts: int
    degenerate: bool = False

    @property
    def unreliable(self) -> bool:
        return self.n_timeouts > TIMEOUT_FRACTION * self.n_walkers


def build_polyline(points) -> tuple[np.ndarray, np.ndarray]:
    """Connect level-set sample points into polyline segments.

    Points are ordered by angle (then radius) and consecutive points are
    joined unless the angular gap jumps well past its median or the
    chord is long both globally and next to its neighbors; the second
    condition separates distinct arcs without severing the smoothly
    accelerating chords near a tangency with the unit circle, where the
    crossing radius changes fast from one ray to the next.  A
    near-closed curve gets an explicit closing segment so walkers
    cannot slip through the seam.  Returns (a, b) complex endpoint
    arrays.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size < 2:
        raise EmptyLevelSetError("need at least two sample points to build a polyline")
    ang = np.angle(pts)
    order = np.lexsort((np.abs(pts), ang))
    p = pts[order]
    ang = ang[order]
    dth = np.diff(ang)
    chord = np.abs(np.diff(p))
    th_cut = max(0.02, 8.0 * float(np.median(dth)))
    len_cut = 8.0 * max(float(np.median(chord)), 1e-12)
    before = np.concatenate([chord[:1], chord[:-1]])
    after = np.concatenate([chord[1:], chord[-1:]])
    isolated = chord > 4.0 * np.minimum(before, after)
    keep = (dth <= th_cut) & ~((chord > len_cut) & isolated)
    a = p[:-1][keep]
    b = p[1:][keep]
    wrap_th = ang[0] + 2.0 * math.pi - ang[-1]
    wrap_chord = abs(p[0] - p[-1])
    if wrap_th <= th_cut and wrap_chord <= len_cut:
        a = np.append(a, p[-1])
        b = np.append(b, p[0])
    if a.size == 0:
        raise EmptyLevelSetError("sample points too scattered to form a polyline")
    # a chain stopping near the unit circle is a curve that terminates
    # on it; no ray crosses past the tangency, so carry the loose end
    # radially onto the boundary to close the channel walkers would
    # otherwise slip through
    ends, counts = np.unique(np.concatenate([a, b]), return_counts=True)
    tips = ends[(counts == 1) & (np.abs(ends) >= 0.9)]
    if tips.size:
        a = np.concatenate([a, tips])
        b = np.concatenate([b, tips / np.abs(tips)])
    return a, b


class _CurveIndex:
    """KD-tree distance oracle for a polyline.

    Long segments are subdivided first so that the global half-segment
    bound stays tight; the tree then indexes midpoints.  ``query``
    returns, per point, a safe step radius (a lower bound on the true
    distance) and whether the point is within ``eps`` of the curve.
    """

    def __init__(self, seg_a: np.ndarray, seg_b: np.ndarray):
        a = np.asarray(seg_a, dtype=complex).ravel()
        b = np.asarray(seg_b, dtype=complex).ravel()
        lengths = np.abs(b - a)
        target = max(2.0 * float(np.median(lengths)), float(np.sum(lengths)) / 8192.0)
        pieces_a, pieces_b = [], []
        for ai, bi, li in zip(a, b, lengths):
            n = max(1, int(math.ceil(li / target))) if target > 0 else 1
            t = np.linspace(0.0, 1.0, n + 1)
            nodes = ai + t * (bi - ai)
            pieces_a.append(nodes[:-1])
            pieces_b.append(nodes[1:])
        a = np.concatenate(pieces_a)
        b = np.concatenate(pieces_b)
        self._axy = np.column_stack([a.real, a.imag])
        ab = np.column_stack([(b - a).real, (b - a).imag])
        self._ab = ab
        self._len2 = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
        mid = self._axy + 0.5 * ab
        self.half_max = 0.5 * float(np.abs(b - a).max())
        self._tree = cKDTree(mid)
        self.n_segments = a.size
        self._k = min(16, self.n_segments)

    def _exact(self, xy: np.ndarray, idx: np.ndarray) -> np.ndarray:
        # minimum point-to-segment distance over the candidate set
        a = self._axy[idx]
        ab = self._ab[idx]
        t = np.einsum("mki,mki->mk", xy[:, None, :] - a, ab) / self._len2[idx]
        np.clip(t, 0.0, 1.0, out=t)
        d = xy[:, None, :] - (a + t[..., None] * ab)
        return np.sqrt(np.einsum("mki,mki->mk", d, d).min(axis=1))

    def query(self, xy: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
        d1, _ = self._tree.query(xy, k=1)
        lb = np.maximum(d1 - self.half_max, 0.0)
        safe = lb.copy()
        absorbed = np.zeros(xy.shape[0], dtype=bool)
        near = lb <= eps
        if near.any():
            sub = xy[near]
            dk, ik = self._tree.query(sub, k=self._k)
            if self._k == 1:
                dk = dk[:, None]
                ik = ik[:, None]
            exact = self._exact(sub, ik)
            if self._k == self.n_segments:
                guard = np.full(sub.shape[0], np.inf)
            else:
                guard = dk[:, -1] - self.half_max
            absorbed[near] = exact <= eps
            safe[near] = np.maximum(np.minimum(exact, guard), lb[near])
        return safe, absorbed


def _walk_block(curve: _CurveIndex, n: int, block: int, cfg: WoSConfig) -> tuple[int, int]:
    rng = np.random.Generator(
        np.random.Philox(key=(block << 64) | (cfg.seed & _MASK64))
    )
    z = np.zeros((n, 2))
    alive = np.ones(n, dtype=bool)
    hit = np.zeros(n, dtype=bool)
    for _ in range(cfg.max_steps):
        if not alive.any():
            break
        idx = np.flatnonzero(alive)
        za = z[idx]
        safe, on_curve = curve.query(za, cfg.epsilon)
        d_circ = 1.0 - np.sqrt(np.einsum("ij,ij->i", za, za))
        on_circle = (d_circ <= cfg.epsilon) & ~on_curve
        hit[idx[on_curve]] = True
        alive[idx[on_curve | on_circle]] = False
        moving = ~(on_curve | on_circle)
        if not moving.any():
            continue
        rad = np.minimum(safe, d_circ)[moving]
        theta = rng.uniform(0.0, 2.0 * math.pi, rad.size)
        z[idx[moving]] += rad[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
    n_timeout = int(alive.sum())
    return int(hit.sum()), n_timeout


def wos_hitting_probability(seg_a, seg_b, cfg: WoSConfig | None = None) -> MeasureEstimate:
    """Probability that a walker from the origin hits the polyline first.

    The polyline is given directly as segment endpoint arrays; counting
    ``value = hits / n_walkers`` with timeouts tallied as circle hits.
    """
    cfg = cfg if cfg is not None else WoSConfig()
    curve = _CurveIndex(seg_a, seg_b)
    origin = np.zeros((1, 2))
    _, at_origin = curve.query(origin, cfg.epsilon)
    if at_origin[0]:
        return MeasureEstimate(1.0, 0.0, cfg.n_walkers, 0, degenerate=True)
    sizes = [BLOCK_SIZE] * (cfg.n_walkers // BLOCK_SIZE)
    if cfg.n_walkers % BLOCK_SIZE:
        sizes.append(cfg.n_walkers % BLOCK_SIZE)
    tallies = parallel_map(
        lambda job: _walk_block(curve, job[1], job[0], cfg), list(enumerate(sizes))
    )
    hits = sum(t[0] for t in tallies)
    timeouts = sum(t[1] for t in tallies)
    value = hits / cfg.n_walkers
    std_error = math.sqrt(value * (1.0 - value) / cfg.n_walkers)
    return MeasureEstimate(value, std_error, cfg.n_walkers, timeouts)


def harmonic_measure(
    m: ConformalMap, alpha: float, cfg: WoSConfig | None = None
) -> MeasureEstimate:
    """Harmonic measure at 0 of the level curve ``|psi| = alpha``.

    An empty level set has measure 0 exactly.  If the origin already
    lies within the absorption shell the estimate is 1 exactly and the
    degeneracy flag is set.
    """
    cfg = cfg if cfg is not None else WoSConfig()
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if abs(abs(m.base_value) - alpha) <= 1e-9 * alpha:
        # level curve passes through the start point; ray bracketing
        # cannot sample it, and the walk would be absorbed at step 0
        return MeasureEstimate(1.0, 0.0, cfg.n_walkers, 0, degenerate=True)
    try:
        sample = sample_levelset(m, alpha, n=2048)
    except EmptyLevelSetError:
        return MeasureEstimate(0.0, 0.0, cfg.n_walkers, 0)
    seg_a, seg_b = build_polyline(sample.points)
    return wos_hitting_probability(seg_a, seg_b, cfg)


@dataclass(frozen=True)
class BeurlingReport:
    """Outcome of the projection-bound test at one level.

    ``passed`` records whether exp(-dist) <= (pi/2) * (omega + 3 sigma),
    the Monte Carlo reading of the lower bound of harmonic measure by
    hyperbolic distance.  ``ratio`` is rhs / lhs; large values mean the
    bound holds with room to spare.
    """

    map_spec: str
    alpha: float
    lhs: float
    rhs: float
    ratio: float
    passed: bool
    estimate: MeasureEstimate


def beurling_check(
    m: ConformalMap, alpha: float, cfg: WoSConfig | None = None
) -> BeurlingReport:
    """Test exp(-d(0, F_alpha)) against (pi/2)(omega + 3 sigma)."""
    cfg = cfg if cfg is not None else WoSConfig()
    lhs = math.exp(-dist_to_levelset(m, alpha))
    est = harmonic_measure(m, alpha, cfg)
    rhs = 0.5 * math.pi * (est.value + 3.0 * est.std_error)
    ratio = rhs / lhs if lhs > 0 else math.inf
    return BeurlingReport(m.spec, alpha, lhs, rhs, ratio, lhs <= rhs, est)
