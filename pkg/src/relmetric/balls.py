"""Polar traces of metric spheres and shape tests for relative-metric balls.

Shapes are analysed in the 2-plane spanned by the center z and one fixed
orthogonal direction; rotation about the line through 0 and z carries the
verdicts to all of R^n. Angles are measured from the direction pointing
from z toward the origin, so that theta = 0 points at 0 and
e(theta) = -cos(theta) zhat + sin(theta) e2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._util import CheckResult, as_points, call_weight, norm, rounding_slack
from .relative import rho_M

S_CEILING = 1e12  # brackets beyond this many |z|-units mark an unbounded direction
BISECT_ITERS = 200


class UnboundedBallError(ValueError):
    pass


def plane_frame(z) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors (zhat, e2) spanning the tracing plane."""
    z = as_points(z).astype(float)
    n = z.size
    if n < 2:
        raise ValueError("ball tracing needs dimension >= 2")
    nz = norm(z)
    e1 = z / nz if nz > 0 else np.eye(n)[0]
    k = int(np.argmin(np.abs(e1)))
    e2 = np.eye(n)[k] - e1[k] * e1
    return e1, e2 / norm(e2)


def directions(z, thetas) -> np.ndarray:
    e1, e2 = plane_frame(z)
    t = np.asarray(thetas, dtype=float)[:, None]
    return -np.cos(t) * e1 + np.sin(t) * e2


@dataclass
class BallTrace:
    center: np.ndarray
    radius: float
    thetas: np.ndarray
    s_values: np.ndarray
    residual: float = 0.0
    dist: Optional[Callable] = field(default=None, repr=False, compare=False)

    def points(self) -> np.ndarray:
        """Boundary points in R^n (rows); unbounded directions give inf."""
        with np.errstate(invalid="ignore"):
            return self.center + self.s_values[:, None] * directions(self.center, self.thetas)

    def plane_coords(self) -> np.ndarray:
        """(x, y) coordinates in the tracing plane, with z at (|z|, 0)."""
        nz = norm(self.center)
        c, s = np.cos(self.thetas), np.sin(self.thetas)
        with np.errstate(invalid="ignore"):
            return np.column_stack([nz - self.s_values * c, self.s_values * s])

    def rows(self) -> list[tuple[float, float, float, float]]:
        xy = self.plane_coords()
        return [(float(t), float(s), float(a), float(b))
                for t, s, (a, b) in zip(self.thetas, self.s_values, xy)]


def default_thetas(n_angles: int) -> np.ndarray:
    return -np.pi + 2.0 * np.pi * np.arange(n_angles) / n_angles


def trace_metric(dist: Callable, z, r: float, n_angles: int = 1024, thetas=None,
                 s0: Optional[float] = None) -> BallTrace:
    """Solve dist(z, z + s e(theta)) = r for s in every direction.

    Brackets grow geometrically from ``s0`` (default r); bisection then runs
    to the floating-point resolution of s. Directions where no crossing is
    found below S_CEILING * max(1, |z|) get s = inf.
    """
    if not r > 0:
        raise ValueError("radius must be positive")
    z = as_points(z).astype(float)
    th = default_thetas(n_angles) if thetas is None else np.asarray(thetas, dtype=float)
    u = directions(z, th)
    ceiling = S_CEILING * max(1.0, norm(z))

    def g(s, uu=u):
        return np.asarray(dist(z, z + s[:, None] * uu), dtype=float) - r

    hi = np.full(th.size, float(s0) if s0 and np.isfinite(s0) and s0 > 0 else r)
    lo = np.zeros(th.size)
    f = g(hi)
    open_ = f <= 0
    while open_.any():
        lo = np.where(open_, hi, lo)
        hi = np.where(open_, 2.0 * hi, hi)
        open_ &= hi <= ceiling
        if not open_.any():
            break
        f[open_] = g(hi)[open_]
        open_ &= f <= 0
    unbounded = hi > ceiling
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        done = (mid <= lo) | (mid >= hi)
        if done.all():
            break
        below = g(mid) <= 0
        lo = np.where(below & ~done, mid, lo)
        hi = np.where(~below & ~done, mid, hi)
    # pick whichever end of the final bracket is closer to r
    flo, fhi = np.abs(g(lo)), np.abs(g(hi))
    s = np.where((flo < fhi) & (lo > 0), lo, hi)
    s = np.where(unbounded, np.inf, s)
    fin = np.isfinite(s)
    res = float(np.max(np.abs(g(s[fin], u[fin]))) / r) if fin.any() else 0.0
    return BallTrace(z, float(r), th, s, res, dist)


def trace_sphere(M, z, r: float, n_angles: int = 1024, thetas=None) -> BallTrace:
    """Trace the rho_M sphere of radius r about z."""
    z = as_points(z).astype(float)
    nz = norm(z)
    s0 = r * float(call_weight(M, nz, nz)) if nz > 0 else None
    return trace_metric(lambda a, b: rho_M(M, a, b), z, r, n_angles, thetas, s0)


def small_radius(M, z, fraction: float = 0.1) -> float:
    """A radius whose traced Euclidean diameter is at most fraction * |z|."""
    z = as_points(z).astype(float)
    nz = norm(z)
    if nz == 0:
        raise ValueError("small radius is relative to |z|; z must be nonzero")
    r = 0.5 * fraction * nz / float(call_weight(M, nz, nz))
    for _ in range(60):
        tr = trace_sphere(M, z, r, 64)
        if np.all(np.isfinite(tr.s_values)) and 2 * tr.s_values.max() <= fraction * nz:
            return r
        r *= 0.5
    raise ValueError("could not find a small radius")


# ---------------------------------------------------------------------------
# shape predicates


def isotropy_check(M, z, radii, n_angles: int = 256) -> tuple[bool, np.ndarray]:
    """Sup/inf over directions of rho_M(z, z + t e(theta)) at each Euclidean radius t.

    True when the ratio at the last (smallest) radius is within 1 + 1e-4.
    Directions that are all infinite count as a ratio of 1.
    """
    z = as_points(z).astype(float)
    radii = np.asarray(radii, dtype=float)
    u = directions(z, default_thetas(n_angles))
    ratios = np.empty(radii.size)
    for i, t in enumerate(radii):
        d = np.asarray(rho_M(M, z, z + t * u), dtype=float)
        hi, lo = d.max(), d.min()
        with np.errstate(all="ignore"):
            ratios[i] = 1.0 if hi == lo else hi / lo
    return bool(ratios[-1] <= 1.0 + 1e-4), ratios


def star_shaped_check(M, z, s_max: float, n_angles: int = 64, n_s: int = 256) -> CheckResult:
    """Is s -> rho_M(z, z + s e(theta)) nondecreasing on [0, s_max] in every direction?"""
    z = as_points(z).astype(float)
    if norm(z) == 0:
        return CheckResult(True)
    th = default_thetas(n_angles)
    u = directions(z, th)
    s = np.linspace(0.0, s_max, n_s)
    pts = z + s[None, :, None] * u[:, None, :]
    d = np.asarray(rho_M(M, np.broadcast_to(z, pts.shape), pts), dtype=float)
    bad = np.diff(d, axis=1) < -rounding_slack(d[:, 1:], d[:, :-1])
    if bad.any():
        i, j = np.argwhere(bad)[0]
        return CheckResult(False, {"theta": float(th[i]), "s": (float(s[j]), float(s[j + 1])),
                                   "rho": (float(d[i, j]), float(d[i, j + 1]))})
    return CheckResult(True)


@dataclass
class Corner:
    theta: float
    slope_left: float
    slope_right: float

    @property
    def jump(self) -> float:
        return abs(self.slope_right - self.slope_left)


@dataclass
class ConvexityReport:
    convex: bool
    corners: list = field(default_factory=list)
    min_cross: float = 0.0


CORNER_FACTOR = 10.0
FIT_WINDOW = 12


def _fit_side(t, s, t0, deg=3):
    return np.polynomial.Polynomial.fit(t - t0, s, deg).convert()


def _refine_corner(th, s, j, h):
    """Intersect cubic fits from the left of index j and the right of j + 1."""
    n = th.size
    L = np.arange(j - FIT_WINDOW + 1, j + 1)
    R = np.arange(j + 1, j + 1 + FIT_WINDOW)
    if L[0] < 0 or R[-1] >= n or not (np.isfinite(s[L]).all() and np.isfinite(s[R]).all()):
        return None
    t0 = th[j]
    pl, pr = _fit_side(th[L], s[L], t0), _fit_side(th[R], s[R], t0)
    diff = pl - pr
    roots = diff.roots()
    roots = roots[np.abs(roots.imag) < 1e-9].real
    roots = roots[(roots > -h) & (roots < 2 * h)]
    if roots.size == 0:
        tc = 0.5 * h
    else:
        tc = roots[np.argmin(np.abs(roots - 0.5 * h))]
    dl, dr = pl.deriv(), pr.deriv()
    err = float(np.abs(pl(th[L] - t0) - s[L]).max() + np.abs(pr(th[R] - t0) - s[R]).max())
    return Corner(float(t0 + tc), float(dl(tc)), float(dr(tc))), err


def _retrace_corner(trace: BallTrace, c: Corner, h: float, rounds: int = 2) -> Corner:
    """Re-solve the sphere on fine angle grids either side of a corner and refit."""
    step = h / 8
    for _ in range(rounds):
        k = np.arange(1, FIT_WINDOW + 1)
        left = c.theta - step * k[::-1]
        right = c.theta + step * k
        tr = trace_metric(trace.dist, trace.center, trace.radius, thetas=np.concatenate([left, right]))
        if not np.all(np.isfinite(tr.s_values)):
            return c
        out = _refine_corner(tr.thetas, tr.s_values, FIT_WINDOW - 1, step)
        if out is None:
            return c
        c = out[0]
        step /= 16
    return c


def find_corners(trace: BallTrace) -> list[Corner]:
    """Corners of s(theta): slope jumps above CORNER_FACTOR times the local median.

    Non-finite parts of the trace are skipped. Corner angles and one-sided
    slopes come from cubic fits on either side of the jump.
    """
    th, s = trace.thetas, trace.s_values
    h = float(np.median(np.diff(th)))
    with np.errstate(invalid="ignore"):
        slope = np.diff(s) / np.diff(th)
        jump = np.abs(np.diff(slope))  # at interior vertex k + 1
    jump = np.where(np.isfinite(jump), jump, np.nan)
    n = jump.size
    half = 16
    fin = s[np.isfinite(s)]
    floor = 1e-6 * (fin.max() if fin.size else 1.0)  # noise floor, slope units
    flagged = np.zeros(n, dtype=bool)
    for k in range(n):
        if not np.isfinite(jump[k]):
            continue
        win = jump[max(0, k - half):k + half + 1]
        med = np.nanmedian(win)
        flagged[k] = jump[k] > max(CORNER_FACTOR * med, floor)
    corners = []
    k = 0
    while k < n:
        if not flagged[k]:
            k += 1
            continue
        e = k
        while e + 1 < n and flagged[e + 1]:
            e += 1
        # a kink inside cell (j, j+1) flags vertices j and j+1 (jump indices j-1 and j)
        best = None
        for j in range(k, e + 2):
            out = _refine_corner(th, s, j, h)
            if out is not None and (best is None or out[1] < best[1]):
                best = out
        if best is not None:
            c = best[0]
            if trace.dist is not None:
                c = _retrace_corner(trace, c, h)
            corners.append(c)
        k = e + 1
    return corners


def convexity_check(trace: BallTrace, tol: float = 1e-8) -> ConvexityReport:
    """Convexity of the traced region by cross products of consecutive edges.

    The region is convex when every cross product is at least
    -tol * scale^2, scale being the largest s. Corners are reported from
    cross-product sign changes and from slope jumps.
    """
    if trace.thetas.size < 64:
        raise ValueError("need at least 64 angles")
    if not np.all(np.isfinite(trace.s_values)):
        raise UnboundedBallError("trace contains unbounded directions")
    xy = trace.plane_coords() - np.array([norm(trace.center), 0.0])
    e = np.roll(xy, -1, axis=0) - xy
    en = np.roll(e, -1, axis=0)
    cross = e[:, 0] * en[:, 1] - e[:, 1] * en[:, 0]
    # orient counterclockwise in the (x, y) plane
    area = 0.5 * np.sum(xy[:, 0] * np.roll(xy[:, 1], -1) - np.roll(xy[:, 0], -1) * xy[:, 1])
    if area < 0:
        cross = -cross
    scale = float(trace.s_values.max())
    convex = bool(cross.min() >= -tol * scale**2)
    corners = find_corners(trace)
    neg = np.flatnonzero(cross < -tol * scale**2)
    known = np.array([c.theta for c in corners])
    h = float(np.median(np.diff(trace.thetas)))
    for i in neg:
        t = float(trace.thetas[(i + 1) % trace.thetas.size])
        if known.size == 0 or np.min(np.abs(known - t)) > 4 * h:
            corners.append(Corner(t, np.nan, np.nan))
            known = np.append(known, t)
    return ConvexityReport(convex, sorted(corners, key=lambda c: c.theta), float(cross.min()))


def infty_q_corner(q: float, r: float) -> tuple[float, float]:
    """Corner angle arccos(r/2) and outer slope limit of the rho_{inf,q} sphere about e_1."""
    if not (0 < q <= 1 and 0 < r < 2):
        raise ValueError("need 0 < q <= 1 and 0 < r < 2")
    if r * r * q >= 2:
        raise ValueError("need r^2 q < 2")
    return float(np.arccos(r / 2)), float(r * r * q * np.sqrt(4 - r * r) / (2 - r * r * q))
