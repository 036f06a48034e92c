"""Level sets of |psi| in the disk and the hyperbolic distance to them.

A level set F_alpha = { z : |psi(z)| = alpha } is located ray by ray:
sign changes of |psi| - alpha on a radial grid graded toward the
boundary are bracketed and bisected.  Because the distance from 0 is a
monotone function of |z|, dist(0, F_alpha) reduces to the smallest
modulus attained on the level set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._num import golden_min
from .errors import EmptyLevelSetError
from .hypgeo import hyp_dist_origin

# Radial search grid: r = 1 - 10^{-u} for u in [0, 12], fifty points per
# decade of 1 - r.  Starts at r = 0 and stops at the search cap; level
# sets hiding beyond r = 1 - 1e-12 are reported as empty.
SEARCH_CAP = 1.0 - 1e-12
_RAY_R = 1.0 - np.power(10.0, -np.linspace(0.0, 12.0, 601))

# Accepted relative residual | |psi(z)| - alpha | / alpha for points of
# the sampled level set.
RESIDUAL_RTOL = 1e-9

_BISECT_WIDTH = 1e-13
DEFAULT_RAYS = 256
THETA_TOL = 1e-10


@dataclass(frozen=True)
class LevelSetSample:
    """Points of one level set, ordered by ray angle then by radius.

    r_min is the smallest modulus over the stored points, an upper
    bound (within the refinement tolerance) for min |z| over F_alpha.
    """

    alpha: float
    points: np.ndarray
    residuals: np.ndarray
    r_min: float


def _abs_on(m, z):
    return np.abs(m.value_fn(z))


def _check_alpha(alpha):
    alpha = float(alpha)
    if not alpha > 0.0 or not math.isfinite(alpha):
        raise ValueError("alpha must be a positive finite number")
    return alpha


def _origin_on_level(m, alpha):
    return abs(abs(m.base_value) - alpha) <= alpha * RESIDUAL_RTOL


def _bisect_many(m, alpha, theta, lo, hi, f_lo):
    """Vectorized bisection of bracketed crossings along rays.

    theta, lo, hi, f_lo are aligned 1-d arrays; every (lo, hi) pair
    brackets a sign change of |psi(r e^{i theta})| - alpha.
    """
    e = np.exp(1j * np.asarray(theta, dtype=float))
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    lo_pos = f_lo > 0.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        fm = _abs_on(m, mid * e) - alpha
        go_right = (fm > 0.0) == lo_pos
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
        width = hi - lo
        if np.all(width <= np.maximum(_BISECT_WIDTH, 4.0 * np.spacing(hi))):
            break
    return 0.5 * (lo + hi)


def _rays_first_crossing(m, alpha, thetas):
    """Smallest positive level radius on each ray, NaN where none.

    Grid points whose residual already meets RESIDUAL_RTOL are accepted
    directly; this is what terminates on rays that lie inside the level
    set, where |psi| - alpha never changes sign.
    """
    thetas = np.asarray(thetas, dtype=float)
    z = _RAY_R[None, :] * np.exp(1j * thetas)[:, None]
    f = _abs_on(m, z) - alpha

    n = thetas.size
    best = np.full(n, np.nan)

    qual = np.abs(f) <= alpha * RESIDUAL_RTOL
    qual[:, 0] = False  # the result is constrained to (0, 1)
    has_qual = qual.any(axis=1)
    if has_qual.any():
        first = np.argmax(qual, axis=1)
        best[has_qual] = _RAY_R[first[has_qual]]

    sign_change = (f[:, :-1] * f[:, 1:]) < 0.0
    has_br = sign_change.any(axis=1)
    if has_br.any():
        idx = np.argmax(sign_change, axis=1)
        rows = np.flatnonzero(has_br)
        cols = idx[rows]
        roots = _bisect_many(
            m, alpha, thetas[rows], _RAY_R[cols], _RAY_R[cols + 1], f[rows, cols]
        )
        best[rows] = np.fmin(best[rows], roots)
    return best


def level_radius_on_ray(m, alpha, theta):
    """Smallest r in (0, 1) with |psi(r e^{i theta})| = alpha, else None."""
    alpha = _check_alpha(alpha)
    r = _rays_first_crossing(m, alpha, np.array([float(theta)]))[0]
    return None if math.isnan(r) else float(r)


def min_modulus(m, alpha, n_rays=DEFAULT_RAYS):
    """Minimum modulus over F_alpha: ray scan plus golden refinement.

    The angular grid locates the best ray; a golden-section pass over
    the bracketing pair of grid angles refines theta to THETA_TOL.
    Raises EmptyLevelSetError when no ray crosses the level set inside
    the search cap.
    """
    alpha = _check_alpha(alpha)
    if n_rays < 64:
        raise ValueError("n_rays must be at least 64")
    if _origin_on_level(m, alpha):
        return 0.0

    thetas = 2.0 * math.pi * np.arange(n_rays) / n_rays
    per_ray = _rays_first_crossing(m, alpha, thetas)
    if np.all(np.isnan(per_ray)):
        raise EmptyLevelSetError(
            f"|{m.spec}| never meets alpha = {alpha:g} inside r <= {SEARCH_CAP}"
        )
    k = int(np.nanargmin(per_ray))
    step = 2.0 * math.pi / n_rays

    def objective(theta):
        r = level_radius_on_ray(m, alpha, theta)
        return math.inf if r is None else r

    _, r_best = golden_min(
        objective, thetas[k] - step, thetas[k] + step, tol=THETA_TOL
    )
    return min(float(np.nanmin(per_ray)), r_best)


def dist_to_levelset(m, alpha, n_rays=DEFAULT_RAYS):
    """Hyperbolic distance from 0 to F_alpha: log((1 + r)/(1 - r)) at r = r_min."""
    r = min_modulus(m, alpha, n_rays=n_rays)
    return hyp_dist_origin(r)


def _cross_points(m, alpha, thetas):
    """All bisected sign changes of |psi| - alpha along the given rays.

    Returns (f, crossed, theta_pts, r_pts) where f is the radial grid
    evaluation (for reuse), crossed flags rays with at least one sign
    change, and the point arrays hold every refined crossing.
    """
    z = _RAY_R[None, :] * np.exp(1j * thetas)[:, None]
    f = _abs_on(m, z) - alpha
    sign_change = (f[:, :-1] * f[:, 1:]) < 0.0
    rows, cols = np.nonzero(sign_change)
    if rows.size:
        roots = _bisect_many(
            m, alpha, thetas[rows], _RAY_R[cols], _RAY_R[cols + 1], f[rows, cols]
        )
        return f, sign_change.any(axis=1), thetas[rows], roots
    return f, sign_change.any(axis=1), np.empty(0), np.empty(0)


def _window_thetas(th_hit, pad, budget):
    """Fine ray angles covering merged windows [t - pad, t + pad].

    Windows around nearby hits are coalesced; each window receives rays
    in proportion to its width, at least 65 so a window around a single
    hit still resolves structure narrower than the parent grid.
    """
    t = np.sort(th_hit)
    windows = [[t[0] - pad, t[0] + pad]]
    for v in t[1:]:
        if v - pad <= windows[-1][1]:
            windows[-1][1] = v + pad
        else:
            windows.append([v - pad, v + pad])
    total = sum(hi - lo for lo, hi in windows)
    parts = [
        np.linspace(lo, hi, max(65, int(budget * (hi - lo) / total)))
        for lo, hi in windows
    ]
    return np.unique(np.concatenate(parts))


def sample_levelset(m, alpha, n=2048):
    """Sample F_alpha along n rays, bisecting every bracketed crossing.

    A level curve subtending a narrow angle (large alpha pushes it
    against the boundary) is caught by few rays; the angular windows
    around those rays are then resampled at finer and finer spacing
    until enough rays cross to trace the curve.  Rays that never change
    sign contribute their first grid point whose residual meets the
    tolerance (rays lying inside the level set).  Points failing the
    residual bound after refinement are dropped; that only happens when
    the crossing is too steep for double precision, far beyond the
    search cap's useful range.
    """
    alpha = _check_alpha(alpha)
    if n < 256:
        raise ValueError("n must be at least 256")

    thetas = 2.0 * math.pi * np.arange(n) / n
    f, crossed, order_theta, order_r = _cross_points(m, alpha, thetas)

    qual = np.abs(f) <= alpha * RESIDUAL_RTOL
    qual[:, 0] = False
    degen = ~crossed & qual.any(axis=1)

    pad = 2.0 * math.pi / n
    for _ in range(6):
        n_hit = np.unique(order_theta).size
        if degen.any() or n_hit == 0 or n_hit >= 64:
            break
        fine = _window_thetas(np.unique(order_theta), pad, budget=4096)
        _, _, th2, r2 = _cross_points(m, alpha, fine)
        if th2.size <= order_theta.size:
            break
        order_theta, order_r = th2, r2
        pad = float(np.median(np.diff(np.sort(np.unique(fine)))))

    if degen.any():
        first = np.argmax(qual, axis=1)
        d_rows = np.flatnonzero(degen)
        order_r = np.concatenate([order_r, _RAY_R[first[d_rows]]])
        order_theta = np.concatenate([order_theta, thetas[d_rows]])

    pts = np.empty(0, dtype=complex)
    if order_r.size:
        theta_mod = np.mod(order_theta, 2.0 * math.pi)
        order = np.lexsort((order_r, theta_mod))
        pts = order_r[order] * np.exp(1j * theta_mod[order])

    if _origin_on_level(m, alpha):
        pts = np.concatenate([[0j], pts])

    if pts.size == 0:
        raise EmptyLevelSetError(
            f"|{m.spec}| never meets alpha = {alpha:g} inside r <= {SEARCH_CAP}"
        )

    residuals = np.abs(_abs_on(m, pts) - alpha)
    ok = residuals <= alpha * RESIDUAL_RTOL
    pts, residuals = pts[ok], residuals[ok]
    if pts.size == 0:
        raise EmptyLevelSetError(
            f"level set of {m.spec} at alpha = {alpha:g} is too steep to resolve"
        )
    return LevelSetSample(
        alpha=alpha,
        points=pts,
        residuals=residuals,
        r_min=float(np.min(np.abs(pts))),
    )
