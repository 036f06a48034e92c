"""Membership criteria for Hardy spaces and their convergence verdicts.

Four views of the same question, whether the integral means of |psi|^p
stay bounded as r -> 1, are computed side by side:

* direct circle means on a dyadic radius ladder (:func:`hardy_norm_direct`),
* the area integral of |psi|^{p-2} |psi'|^2 log(1/|z|) (:func:`yamashita_integral`),
* the decay integral of alpha^{p-1} exp(-d(0, F_alpha)) (:func:`hyp_criterion`),
* the decay integral of alpha^{p-1} omega(0, F_alpha) (:func:`harm_criterion`).

Convergence of an improper integral cannot be read off finitely many
samples, so every classifier returns a three-valued verdict: a tail
exponent is fitted on the last three decades and compared against p
with an explicit margin, and sequences on dyadic ladders are classified
by the ratio of successive increments.  Superpolynomial decay (the
local slope steepening decade over decade) short-circuits to
"converges" for every p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from ._num import ret
from ._threads import parallel_map
from .errors import (
    EmptyLevelSetError,
    FitInconclusiveError,
    InverseUnavailableError,
    QuadratureError,
)
from .hmeasure import MeasureEstimate, WoSConfig, harmonic_measure
from .levelset import SEARCH_CAP, dist_to_levelset, min_modulus
from .maps import ConformalMap

MARGIN = 0.05
FIT_RESIDUAL_MAX = 0.1
SUPERPOLY_STEP = 0.5
RATIO_BOUNDED = 0.97
RATIO_UNBOUNDED = 1.03
INCREMENT_FLOOR = 1e-7

_GLX12, _GLW12 = leggauss(12)
_GLX16, _GLW16 = leggauss(16)
_GLX32, _GLW32 = leggauss(32)


# ---------------------------------------------------------------------------
# grids and result records


@dataclass(frozen=True)
class AlphaGrid:
    """Geometric grid of levels alpha, the integration variable.

    Covers at least three decades so that tail-exponent fits have room;
    ``values`` is strictly increasing with ``points_per_decade`` samples
    per factor of 10.
    """

    alpha_min: float = 1e-2
    alpha_max: float = 1e6
    points_per_decade: int = 16

    def __post_init__(self) -> None:
        if self.alpha_min <= 0.0:
            raise ValueError(f"alpha_min must be positive, got {self.alpha_min}")
        if self.points_per_decade < 1:
            raise ValueError("points_per_decade must be >= 1")
        decades = math.log10(self.alpha_max / self.alpha_min)
        if decades < 3.0 - 1e-9:
            raise ValueError(
                f"grid must cover at least 3 decades, got {decades:.3g}"
            )

    @property
    def values(self) -> np.ndarray:
        lo = math.log10(self.alpha_min)
        hi = math.log10(self.alpha_max)
        count = int(round((hi - lo) * self.points_per_decade)) + 1
        return 10.0 ** np.linspace(lo, hi, count)


@dataclass(frozen=True)
class CriterionResult:
    """Verdict of one decay-integral criterion at a given p.

    ``tail_exponent`` is the fitted s in decay ~ alpha^{-s} (+inf when
    superpolynomial decay was detected, nan when no fit was possible);
    ``truncated_value`` is the trapezoid value of the integral over the
    grid and ``head_budget`` bounds the unsampled head alpha < alpha_min
    via decay <= 1.
    """

    kind: str
    p: float
    truncated_value: float
    tail_exponent: float
    fit_residual: float
    verdict: str
    margin: float = MARGIN
    head_budget: float = 0.0
    n_points: int = 0
    superpolynomial: bool = False

    @property
    def decisive(self) -> bool:
        return self.verdict != "inconclusive"


@dataclass(frozen=True)
class NormGrowth:
    """Growth summary of the circle means along r = 1 - 2^{-k}.

    ``growth_exponent`` is the fitted power of 1/(1-r) when the sequence
    is unbounded (log2 of the increment ratio); ``log_like`` marks the
    boundary signature of nearly constant increments, i.e. growth like
    log(1/(1-r)).
    """

    p: float
    r_values: tuple
    means: tuple
    nondecreasing: bool
    classification: str
    increment_ratio: float
    growth_exponent: float
    log_like: bool

    @property
    def sup_estimate(self) -> float:
        return math.inf if self.classification == "unbounded" else self.means[-1]


@dataclass(frozen=True)
class YamashitaResult:
    """Partial area integrals over |z| <= 1 - 2^{-k} and their verdict."""

    p: float
    r_values: tuple
    partials: tuple
    value: float
    classification: str
    increment_ratio: float
    growth_exponent: float
    singular_origin: bool

    @property
    def divergent(self) -> bool:
        return self.classification == "unbounded"


@dataclass(frozen=True)
class Verdict:
    """Joint membership conclusion with the per-criterion evidence kept."""

    map_spec: str
    p: float
    conclusion: str
    evidence: tuple


# ---------------------------------------------------------------------------
# circle integrals with geometric refinement toward the integrand peaks


def _ladder_edges(a: float, b: float, h: float) -> np.ndarray:
    # dyadic panels growing away from both endpoints, meeting in the middle
    mid = 0.5 * (a + b)
    left = [a]
    t = h
    while a + t < mid:
        left.append(a + t)
        t *= 2.0
    right = [b]
    t = h
    while b - t > mid:
        right.append(b - t)
        t *= 2.0
    return np.array(left + [mid] + right[::-1])


def _panel_sums(
    fn: Callable[[np.ndarray], np.ndarray], edges: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    c = 0.5 * (edges[:-1] + edges[1:])
    s = 0.5 * np.diff(edges)
    f16 = fn((c[:, None] + s[:, None] * _GLX16).ravel()).reshape(-1, 16)
    f32 = fn((c[:, None] + s[:, None] * _GLX32).ravel()).reshape(-1, 32)
    return (f16 @ _GLW16) * s, (f32 @ _GLW32) * s


def _circle_integral(
    fn: Callable[[np.ndarray], np.ndarray], width: float, n_probe: int = 4096
) -> float:
    """Integrate fn over one period [0, 2pi) to ~1e-8 relative.

    The integrand is probed on a uniform grid to locate its maxima
    (boundary peaks of |psi| have width ~ 1-r) and its depressed local
    minima (power-law notches at zeros of the boundary function, the
    same width); panels grow geometrically away from each such anchor
    so fixed Gauss-Legendre rules resolve them.  A 16 vs 32 node comparison per panel supplies
    the error estimate, and offending panels are bisected until the
    total meets tolerance.
    """
    th = np.arange(n_probe) * (2.0 * math.pi / n_probe)
    vals = fn(th)
    vmax = float(vals.max())
    up = vals >= np.roll(vals, 1)
    dn = vals >= np.roll(vals, -1)
    peaks = np.flatnonzero(up & dn & (vals >= 1e-12 * max(vmax, 1e-300)))
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(vals))])
    if peaks.size > 16:
        peaks = peaks[np.argsort(vals[peaks])[::-1][:16]]
    lo_ = vals <= np.roll(vals, 1)
    lo2 = vals <= np.roll(vals, -1)
    dips = np.flatnonzero(lo_ & lo2 & (vals <= 0.5 * max(vmax, 1e-300)))
    if dips.size > 8:
        dips = dips[np.argsort(vals[dips])[:8]]
    anchors = np.unique(np.sort(th[np.concatenate([peaks, dips])]))
    h = max(width, 1e-13)
    segments = []
    for i in range(anchors.size):
        a = anchors[i]
        b = anchors[i + 1] if i + 1 < anchors.size else anchors[0] + 2.0 * math.pi
        if b - a > 1e-15:
            segments.append(_ladder_edges(a, b, min(h, 0.25 * (b - a))))
    edges = np.unique(np.concatenate(segments))
    rel = math.inf
    for _ in range(24):
        v16, v32 = _panel_sums(fn, edges)
        total = float(v32.sum())
        diffs = np.abs(v32 - v16)
        err = float(diffs.sum())
        rel = err / max(abs(total), 1e-300)
        if rel <= 1e-8 or err <= 1e-300:
            return total
        mids = 0.5 * (edges[:-1] + edges[1:])
        edges = np.unique(
            np.concatenate([edges, mids[diffs > err / (2.0 * diffs.size)]])
        )
    raise QuadratureError(f"circle integral reached relative tolerance {rel:.2e}")


def hardy_mean(m: ConformalMap, p: float, r: float) -> float:
    """Circle integral of |psi(r e^{i theta})|^p over [0, 2pi]."""
    if p <= 0.0:
        raise ValueError(f"p must be positive, got {p}")
    if not 0.0 <= r < 1.0:
        raise ValueError(f"r must lie in [0, 1), got {r}")
    if r == 0.0:
        return 2.0 * math.pi * abs(m.base_value) ** p
    fn = lambda th: np.abs(m.value_fn(r * np.exp(1j * th))) ** p
    return _circle_integral(fn, width=0.5 * (1.0 - r))


# ---------------------------------------------------------------------------
# increment-ratio classification of sequences on dyadic ladders


@dataclass(frozen=True)
class _GrowthClass:
    classification: str
    increment_ratio: float
    growth_exponent: float
    log_like: bool


def _classify_increments(marks: Sequence[float], tail: int = 6) -> _GrowthClass:
    """Classify a nondecreasing sequence on a dyadic ladder.

    Marks at r = 1 - 2^{-k} grow like (1/(1-r))^t iff successive
    increments have ratio 2^t; the median ratio of the last ``tail``
    increments lands below RATIO_BOUNDED (sum converges geometrically),
    above RATIO_UNBOUNDED (grows without bound), or in the dead zone in
    between, which is exactly the log-growth signature of the boundary
    case p = h.  Increments below the relative noise floor count as a
    plateau.
    """
    marks = np.asarray(marks, dtype=float)
    inc = np.diff(marks)
    floor = INCREMENT_FLOOR * max(abs(marks[-1]), 1e-300)
    tail_inc = inc[-tail:]
    if np.all(np.abs(tail_inc) <= floor):
        return _GrowthClass("bounded", 0.0, 0.0, False)
    valid = np.abs(tail_inc[:-1]) > floor
    if not valid.any():
        return _GrowthClass("bounded", 0.0, 0.0, False)
    ratios = tail_inc[1:][valid] / tail_inc[:-1][valid]
    rho = float(np.median(ratios))
    exponent = math.log2(rho) if rho > 0 else -math.inf
    if rho < RATIO_BOUNDED:
        return _GrowthClass("bounded", rho, exponent, False)
    if rho > RATIO_UNBOUNDED:
        return _GrowthClass("unbounded", rho, exponent, False)
    return _GrowthClass("inconclusive", rho, exponent, True)


def hardy_norm_direct(
    m: ConformalMap, p: float, r_grid: Sequence[float] | None = None
) -> NormGrowth:
    """Direct boundedness test of the circle means along a radius ladder."""
    if r_grid is None:
        r_grid = [1.0 - 2.0 ** (-k) for k in range(1, 25)]
    r_grid = list(r_grid)
    if any(b <= a for a, b in zip(r_grid, r_grid[1:])):
        raise ValueError("r_grid must be strictly increasing")
    means = parallel_map(lambda r: hardy_mean(m, p, r), r_grid)
    arr = np.asarray(means)
    slack = 1e-9 * np.abs(arr[1:]) + 1e-300
    nondecreasing = bool(np.all(np.diff(arr) >= -slack))
    cls = _classify_increments(means)
    return NormGrowth(
        p=p,
        r_values=tuple(r_grid),
        means=tuple(float(v) for v in means),
        nondecreasing=nondecreasing,
        classification=cls.classification,
        increment_ratio=cls.increment_ratio,
        growth_exponent=cls.growth_exponent,
        log_like=cls.log_like,
    )


# ---------------------------------------------------------------------------
# the area integral


_INNER_ZERO_LEVELS = 24


def _radial_cells(base_is_zero: bool, r_max: float) -> list[tuple[float, float]]:
    # inner cells grade geometrically toward 0 where |psi|^{p-2} can be
    # singular; outer cells halve the gap to 1 so partials land on the
    # dyadic ladder.  Cell boundaries are clipped at r_max.  For maps
    # vanishing at 0, cells stop at 2^-24 and the head below is handled
    # by the caller in closed form; evaluating the map at much smaller
    # radii only measures float cancellation noise, while the linear
    # model there is accurate to O(2^-24) relative.
    if base_is_zero:
        edges = [2.0 ** (-j) for j in range(_INNER_ZERO_LEVELS, 0, -1)]
    else:
        edges = [0.0] + [2.0 ** (-j) for j in range(24, 0, -1)]
    k = 1
    while 1.0 - 2.0 ** (-k) < r_max:
        edges.append(1.0 - 2.0 ** (-k))
        k += 1
    edges.append(r_max)
    edges = sorted(set(e for e in edges if e <= r_max))
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def _origin_head(c0: float, p: float, delta: float) -> float:
    # integral over |z| < delta of |c0 z|^{p-2} |c0|^2 log(1/|z|) dA,
    # the local model of a map with a simple zero at the origin
    return (
        2.0
        * math.pi
        * c0**p
        * delta**p
        * (math.log(1.0 / delta) / p + 1.0 / p**2)
    )


def yamashita_integral(m: ConformalMap, p: float, r_max: float | None = None) -> YamashitaResult:
    """Area integral of |psi|^{p-2} |psi'|^2 log(1/|z|) over the disk.

    Computed in polar coordinates: a Gauss-Legendre rule per radial cell
    with the angular factor integrated by :func:`_circle_integral` at
    each radial node.  Partial integrals over |z| <= 1 - 2^{-k} are
    recorded for k = 1..24 and classified by increment ratios, which is
    the convergence verdict (the total is finite iff the partials
    plateau).
    """
    if p <= 0.0:
        raise ValueError(f"p must be positive, got {p}")
    if r_max is None:
        r_max = 1.0 - 2.0 ** (-24)
    if not 0.0 < r_max < 1.0:
        raise ValueError(f"r_max must lie in (0, 1), got {r_max}")
    base_is_zero = m.base_value == 0
    singular = base_is_zero and p < 2.0

    def angular(r: float) -> float:
        fn = lambda th: (
            np.abs(m.value_fn(r * np.exp(1j * th))) ** (p - 2.0)
            * np.abs(m.deriv_fn(r * np.exp(1j * th))) ** 2
        )
        return _circle_integral(fn, width=0.5 * (1.0 - r), n_probe=2048)

    def cell_value(cell: tuple[float, float]) -> float:
        a, b = cell
        c = 0.5 * (a + b)
        s = 0.5 * (b - a)
        nodes = c + s * _GLX12
        vals = np.array([angular(r) * math.log(1.0 / r) * r for r in nodes])
        return s * float(vals @ _GLW12)

    cells = _radial_cells(base_is_zero, r_max)
    contributions = parallel_map(cell_value, cells)
    head = 0.0
    if base_is_zero:
        head = _origin_head(
            abs(m.deriv_fn(0.0 + 0.0j)), p, 2.0 ** (-_INNER_ZERO_LEVELS)
        )
    ladder = [1.0 - 2.0 ** (-k) for k in range(1, 25)]
    cum = head
    partials = []
    i = 0
    for rk in ladder:
        while i < len(cells) and cells[i][1] <= rk + 1e-18:
            cum += contributions[i]
            i += 1
        partials.append(cum)
    total = head + float(sum(contributions))
    cls = _classify_increments(partials)
    return YamashitaResult(
        p=p,
        r_values=tuple(r for r in ladder),
        partials=tuple(partials),
        value=total,
        classification=cls.classification,
        increment_ratio=cls.increment_ratio,
        growth_exponent=cls.growth_exponent,
        singular_origin=singular,
    )


# ---------------------------------------------------------------------------
# the Green-function angular integral and the change-of-variables check


def green_angular(m: ConformalMap, alpha: float) -> float:
    """G(alpha) = integral over theta of the Green function of the image
    domain, pole at psi(0), evaluated along the circle |w| = alpha.

    By conformal invariance the Green function at w is log(1/|z|) for
    z the preimage of w, and it vanishes off the domain, so the
    integrand is supported on the angular windows where alpha e^{i
    theta} lies inside.  Windows are located by probing the membership
    test and bisecting the transitions.
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if m.inverse_fn is None:
        raise InverseUnavailableError(f"map {m.name} has no closed-form inverse")
    n_probe = 4096
    th = -math.pi + 2.0 * math.pi * np.arange(n_probe) / n_probe
    inside = m.contains(alpha * np.exp(1j * th))
    if not inside.any():
        return 0.0

    def integrand(t: float) -> float:
        w = alpha * complex(math.cos(t), math.sin(t))
        if not m.contains(w):
            return 0.0
        return max(-math.log(abs(m.inverse_fn(w))), 0.0)

    if inside.all():
        windows = [(-math.pi, math.pi)]
    else:
        def edge(lo: float, hi: float) -> float:
            # invariant: membership differs at lo and hi
            flo = bool(m.contains(alpha * np.exp(1j * lo)))
            for _ in range(48):
                mid = 0.5 * (lo + hi)
                if bool(m.contains(alpha * np.exp(1j * mid))) == flo:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)

        step = 2.0 * math.pi / n_probe
        starts = np.flatnonzero(inside & ~np.roll(inside, 1))
        ends = np.flatnonzero(inside & ~np.roll(inside, -1))
        windows = []
        for i0 in starts:
            j0 = ends[np.searchsorted(ends, i0)] if (ends >= i0).any() else ends[0]
            lo = edge(th[i0] - step, th[i0])
            hi_anchor = th[j0]
            hi = edge(hi_anchor + step, hi_anchor)
            if hi < lo:
                hi += 2.0 * math.pi
            windows.append((lo, hi))

    w0 = m.base_value
    total = 0.0
    for lo, hi in windows:
        points = None
        if w0 != 0 and abs(math.log(alpha / abs(w0))) < 0.7:
            t0 = ret(np.angle(complex(w0)))
            for shift in (-2.0 * math.pi, 0.0, 2.0 * math.pi):
                if lo < t0 + shift < hi:
                    points = [t0 + shift]
                    break
        val, _ = quad(
            integrand, lo, hi, points=points, epsabs=1e-12, epsrel=1e-8, limit=200
        )
        total += val
    return total


def change_of_variables_check(m: ConformalMap, p: float, alpha_max: float = 1e7) -> float:
    """Relative difference between the area integral and its alpha form.

    The area integral over |z| <= r_cut is compared with
    integral of alpha^{p-1} G(alpha) over (0, alpha_max], where
    r_cut = min_modulus(m, alpha_max) links the truncations through the
    substitution alpha = |psi|.  The head alpha < alpha_lo is added in
    closed form when psi(0) = 0 (G is logarithmic there) and is
    negligible otherwise.
    """
    if p <= 0.0:
        raise ValueError(f"p must be positive, got {p}")
    try:
        r_cut = min_modulus(m, alpha_max)
    except EmptyLevelSetError:
        # image never reaches alpha_max (e.g. bounded-growth maps); clamp
        # to half the largest modulus attained inside the search cap
        th = np.arange(4096) * (2.0 * math.pi / 4096)
        reach = float(np.abs(m.value_fn(SEARCH_CAP * np.exp(1j * th))).max())
        alpha_max = 0.5 * reach
        r_cut = min_modulus(m, alpha_max)
    lhs = yamashita_integral(m, p, r_max=r_cut).value

    w0_abs = abs(m.base_value)
    if w0_abs == 0.0:
        alpha_lo = 1e-8
        c0 = abs(m.deriv_fn(0.0 + 0.0j))
        head = (
            2.0
            * math.pi
            * alpha_lo**p
            * (math.log(c0 / alpha_lo) / p + 1.0 / p**2)
        )
    else:
        alpha_lo = 1e-4
        head = 0.0

    u_lo = math.log(alpha_lo)
    u_hi = math.log(alpha_max)
    edges = set()
    k = math.ceil(math.log10(alpha_lo))
    while 10.0**k < alpha_max:
        if 10.0**k > alpha_lo:
            edges.add(math.log(10.0**k))
        k += 1
    if w0_abs > 0:
        # refine toward the kink of G at alpha = |psi(0)|
        for expo in (-1.0, -0.5, -0.25, -0.125, 0.0, 0.125, 0.25, 0.5, 1.0):
            e = math.log(w0_abs) + expo * math.log(10.0)
            if u_lo < e < u_hi:
                edges.add(e)
    edges = np.array(sorted({u_lo, u_hi} | edges))

    rhs = head
    for a, b in zip(edges[:-1], edges[1:]):
        c = 0.5 * (a + b)
        s = 0.5 * (b - a)
        nodes = c + s * _GLX16
        vals = np.array(
            [math.exp(p * u) * green_angular(m, math.exp(u)) for u in nodes]
        )
        rhs += s * float(vals @ _GLW16)
    return abs(lhs - rhs) / lhs


# ---------------------------------------------------------------------------
# decay-integral criteria on the alpha grid


def levelset_decay_profile(m: ConformalMap, grid: AlphaGrid) -> np.ndarray:
    """exp(-d(0, F_alpha)) per grid point, 0.0 where the level set is
    empty within the radial search range (the curve has escaped to the
    boundary, so its contribution is below resolution)."""

    def one(alpha: float) -> float:
        try:
            return math.exp(-dist_to_levelset(m, alpha))
        except EmptyLevelSetError:
            return 0.0

    return np.asarray(parallel_map(one, list(grid.values)))


def _decade_slopes(lx: np.ndarray, ly: np.ndarray) -> list[float]:
    # local log-log slope per decade window, windows needing >= 4 points
    slopes = []
    j = math.floor(lx.min() / math.log(10.0) - 1e-9)
    while j * math.log(10.0) < lx.max():
        lo = j * math.log(10.0)
        hi = lo + math.log(10.0)
        mask = (lx >= lo - 1e-12) & (lx < hi)
        if mask.sum() >= 4:
            slopes.append(float(np.polyfit(lx[mask], ly[mask], 1)[0]))
        j += 1
    return slopes


def _superpolynomial(lx: np.ndarray, ly: np.ndarray) -> bool:
    slopes = _decade_slopes(lx, ly)
    for s0, s1, s2 in zip(slopes, slopes[1:], slopes[2:]):
        if s1 <= s0 - SUPERPOLY_STEP and s2 <= s1 - SUPERPOLY_STEP:
            return True
    return False


def _tail_fit(lx: np.ndarray, ly: np.ndarray, weights: np.ndarray | None = None):
    """Fit ly ~ c - s lx over the top three decades; returns (s, residual)."""
    window = lx >= lx.max() - 3.0 * math.log(10.0) - 1e-12
    x = lx[window]
    y = ly[window]
    if x.size < 4 or x.max() - x.min() < 0.5 * math.log(10.0):
        return math.nan, math.inf
    w = None if weights is None else weights[window]
    coef = np.polyfit(x, y, 1, w=w)
    resid = y - np.polyval(coef, x)
    if w is None:
        rms = float(np.sqrt(np.mean(resid**2)))
    else:
        rms = float(np.sqrt(np.sum((w * resid) ** 2) / np.sum(w**2)))
    return float(-coef[0]), rms


def _verdict_from_fit(
    p: float, s: float, residual: float, superpoly: bool, margin: float
) -> str:
    if superpoly:
        return "converges"
    if math.isnan(s) or residual > FIT_RESIDUAL_MAX:
        return "inconclusive"
    if p < s - margin:
        return "converges"
    if p > s + margin:
        return "diverges"
    return "inconclusive"


def hyp_criterion(
    m: ConformalMap,
    p: float,
    grid: AlphaGrid | None = None,
    *,
    margin: float = MARGIN,
    profile: np.ndarray | None = None,
) -> CriterionResult:
    """Convergence verdict for the hyperbolic-distance decay integral.

    ``profile`` may carry a precomputed :func:`levelset_decay_profile`
    for the same grid, so sweeps over p reuse one set of level-set
    searches.
    """
    if p <= 0.0:
        raise ValueError(f"p must be positive, got {p}")
    grid = grid if grid is not None else AlphaGrid()
    alphas = grid.values
    if profile is None:
        profile = levelset_decay_profile(m, grid)
    profile = np.asarray(profile, dtype=float)
    if profile.shape != alphas.shape:
        raise ValueError("profile length does not match the grid")

    integrand = alphas ** (p - 1.0) * profile
    truncated = float(np.trapezoid(integrand * alphas, x=np.log(alphas)))
    head = grid.alpha_min**p / p

    pos = profile > 0.0
    if pos.sum() < 4:
        return CriterionResult(
            kind="hyperbolic",
            p=p,
            truncated_value=truncated,
            tail_exponent=math.nan,
            fit_residual=math.inf,
            verdict="inconclusive",
            margin=margin,
            head_budget=head,
            n_points=int(pos.sum()),
        )
    lx = np.log(alphas[pos])
    ly = np.log(profile[pos])
    superpoly = _superpolynomial(lx, ly)
    if superpoly:
        s, resid = math.inf, 0.0
    else:
        s, resid = _tail_fit(lx, ly)
    return CriterionResult(
        kind="hyperbolic",
        p=p,
        truncated_value=truncated,
        tail_exponent=s,
        fit_residual=resid,
        verdict=_verdict_from_fit(p, s, resid, superpoly, margin),
        margin=margin,
        head_budget=head,
        n_points=int(pos.sum()),
        superpolynomial=superpoly,
    )


def measure_profile(
    m: ConformalMap, grid: AlphaGrid, cfg: WoSConfig
) -> list[MeasureEstimate]:
    """Walk-on-spheres estimates of omega(0, F_alpha) along the grid.

    Each grid point gets its own seed, derived as cfg.seed + index, so
    rows are statistically independent yet reproducible.
    """
    return [
        harmonic_measure(m, float(a), replace(cfg, seed=cfg.seed + i))
        for i, a in enumerate(grid.values)
    ]


def harm_criterion(
    m: ConformalMap,
    p: float,
    grid: AlphaGrid | None = None,
    cfg: WoSConfig | None = None,
    *,
    margin: float = MARGIN,
    estimates: Sequence[MeasureEstimate] | None = None,
) -> CriterionResult:
    """Convergence verdict for the harmonic-measure decay integral.

    Same pipeline as :func:`hyp_criterion` with Monte Carlo values:
    unreliable or zero estimates are excluded from the fit, and the fit
    is weighted by the inverse variance of log omega.  Levels with
    exp(-d) <= 2 epsilon are also excluded: such curves hug the unit
    circle closely enough that the two absorption shells overlap, and
    walkers absorb on a curve they would have missed, inflating the
    estimate.
    """
    if p <= 0.0:
        raise ValueError(f"p must be positive, got {p}")
    grid = grid if grid is not None else AlphaGrid()
    cfg = cfg if cfg is not None else WoSConfig()
    if estimates is None:
        estimates = measure_profile(m, grid, cfg)
    alphas = grid.values
    if len(estimates) != alphas.size:
        raise ValueError("estimates length does not match the grid")
    omega = np.array([e.value for e in estimates])
    sigma = np.array([e.std_error for e in estimates])
    decay = np.array(levelset_decay_profile(m, grid))
    usable = np.array(
        [e.value > 0.0 and not e.unreliable for e in estimates]
    ) & (decay > 2.0 * cfg.epsilon)

    integrand = alphas ** (p - 1.0) * omega
    truncated = float(np.trapezoid(integrand * alphas, x=np.log(alphas)))
    head = grid.alpha_min**p / p

    if usable.sum() < 4:
        return CriterionResult(
            kind="harmonic",
            p=p,
            truncated_value=truncated,
            tail_exponent=math.nan,
            fit_residual=math.inf,
            verdict="inconclusive",
            margin=margin,
            head_budget=head,
            n_points=int(usable.sum()),
        )
    lx = np.log(alphas[usable])
    ly = np.log(omega[usable])
    sig_log = np.clip(sigma[usable] / omega[usable], 1e-3, None)
    superpoly = _superpolynomial(lx, ly)
    if superpoly:
        s, resid = math.inf, 0.0
    else:
        s, resid = _tail_fit(lx, ly, weights=1.0 / sig_log)
    return CriterionResult(
        kind="harmonic",
        p=p,
        truncated_value=truncated,
        tail_exponent=s,
        fit_residual=resid,
        verdict=_verdict_from_fit(p, s, resid, superpoly, margin),
        margin=margin,
        head_budget=head,
        n_points=int(usable.sum()),
        superpolynomial=superpoly,
    )


def hardy_number_estimate(m: ConformalMap, grid: AlphaGrid | None = None) -> float:
    """Fitted decay exponent of exp(-d(0, F_alpha)), the threshold p.

    The criterion integral converges exactly for p below the returned
    exponent; +inf when the decay is superpolynomial.  Raises
    FitInconclusiveError when the tail is not power-like.
    """
    grid = grid if grid is not None else AlphaGrid()
    profile = levelset_decay_profile(m, grid)
    pos = profile > 0.0
    if pos.sum() < 4:
        raise FitInconclusiveError("too few nonempty level sets to fit a tail")
    lx = np.log(grid.values[pos])
    ly = np.log(profile[pos])
    if _superpolynomial(lx, ly):
        return math.inf
    s, resid = _tail_fit(lx, ly)
    if math.isnan(s) or resid > FIT_RESIDUAL_MAX:
        raise FitInconclusiveError(
            f"tail fit residual {resid:.3g} exceeds {FIT_RESIDUAL_MAX}"
        )
    return s


# ---------------------------------------------------------------------------
# the joint verdict


_STANCE = {"bounded": "converges", "unbounded": "diverges"}


def membership_verdict(
    m: ConformalMap,
    p: float,
    *,
    grid: AlphaGrid | None = None,
    include_harm: bool = False,
    cfg: WoSConfig | None = None,
) -> Verdict:
    """Combine the criteria into one membership conclusion.

    member requires every computed criterion to report convergence,
    non_member requires every one to report divergence; anything else,
    including a single inconclusive vote, yields inconclusive with the
    full evidence attached.
    """
    hyp = hyp_criterion(m, p, grid)
    yam = yamashita_integral(m, p)
    norm = hardy_norm_direct(m, p)
    evidence = [
        ("hyperbolic_integral", hyp),
        ("yamashita_integral", yam),
        ("norm_growth", norm),
    ]
    stances = [
        hyp.verdict,
        _STANCE.get(yam.classification, "inconclusive"),
        _STANCE.get(norm.classification, "inconclusive"),
    ]
    if include_harm:
        harm = harm_criterion(m, p, grid, cfg)
        evidence.append(("harmonic_integral", harm))
        stances.append(harm.verdict)
    if all(s == "converges" for s in stances):
        conclusion = "member"
    elif all(s == "diverges" for s in stances):
        conclusion = "non_member"
    else:
        conclusion = "inconclusive"
    return Verdict(m.spec, p, conclusion, tuple(evidence))
