"""The alpha-quasihyperbolic metric k_alpha of the punctured space R^n \\ {0}.

k_alpha is the infimum over paths of the integral of ds/|gamma|^alpha. Its
closed form is evaluated here through the cancellation-free rewrite

    k = (2/b) (|x||y|)^(b/2) sqrt(sinh^2(b*D/2) + sin^2(b*theta/2)),

with b = 1 - alpha, D = log(|x|/|y|) and theta the angle x0y. As b -> 0 this
tends smoothly to sqrt(theta^2 + D^2), the quasihyperbolic distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from ._util import as_points, norm, scalar_or_array
from .means import _s_mean


class DomainError(ValueError):
    """Raised when a point lies outside the punctured space."""


def _angle(x: np.ndarray, y: np.ndarray, nx: np.ndarray, ny: np.ndarray) -> np.ndarray:
    u = x / nx[..., None]
    v = y / ny[..., None]
    return 2.0 * np.arctan2(norm(u - v), norm(u + v))


def _norms(x, y):
    x, y = as_points(x), as_points(y)
    nx, ny = norm(x), norm(y)
    if np.any(nx == 0) or np.any(ny == 0):
        raise DomainError("k_alpha is defined on R^n without the origin")
    return x, y, nx, ny


def _k_polar(alpha: float, nx, ny, theta):
    beta = 1.0 - alpha
    D = np.log(nx) - np.log(ny)
    if beta == 0.0:
        return np.hypot(theta, D)
    with np.errstate(over="ignore"):
        amp = np.exp(0.5 * beta * (np.log(nx) + np.log(ny)))
        return (2.0 / beta) * amp * np.hypot(np.sinh(0.5 * beta * D), np.sin(0.5 * beta * theta))


def _check_alpha(alpha: float, allow_one: bool = True):
    if not (0.0 <= alpha < 1.0 or (allow_one and alpha == 1.0)):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")


def k_alpha(alpha: float, x, y):
    """Closed-form alpha-quasihyperbolic distance on R^n \\ {0}.

    ``alpha = 1`` is accepted and returns the quasihyperbolic distance.
    """
    _check_alpha(alpha)
    x, y, nx, ny = _norms(x, y)
    return scalar_or_array(_k_polar(alpha, nx, ny, _angle(x, y, nx, ny)))


def k_one(x, y):
    """Quasihyperbolic distance sqrt(theta^2 + log^2(|x|/|y|))."""
    x, y, nx, ny = _norms(x, y)
    return scalar_or_array(np.hypot(_angle(x, y, nx, ny), np.log(nx / ny)))


def k_upper_bound(alpha: float, x, y):
    """(|x|^b + |y|^b)/b, an upper bound for k_alpha."""
    _check_alpha(alpha, allow_one=False)
    _, _, nx, ny = _norms(x, y)
    b = 1.0 - alpha
    return scalar_or_array((nx**b + ny**b) / b)


def inequality_chain(alpha: float, x, y) -> np.ndarray:
    """The five ratios bounding k_alpha(x, y)/|x - y|, stacked on the last axis.

    In order: the radial ratio, k/|x-y|, the opposite-ray ratio, the sum
    bound and the power bound 2^alpha |x-y|^-alpha / b.
    """
    _check_alpha(alpha, allow_one=False)
    x, y, nx, ny = _norms(x, y)
    b = 1.0 - alpha
    dxy = norm(x - y)
    e1 = 1.0 / np.asarray(_s_mean(alpha, nx, ny))
    e2 = _k_polar(alpha, nx, ny, _angle(x, y, nx, ny)) / dxy
    e3 = _k_polar(alpha, nx, ny, np.pi) / (nx + ny)
    e4 = (nx**b + ny**b) / (b * (nx + ny))
    e5 = (2.0**alpha / b) * dxy ** (-alpha)
    return np.stack([e1, e2, e3, e4, e5], axis=-1)


def inequality_chain_check(alpha: float, x, y, rtol: float = 1e-10):
    """Evaluate the chain and whether it is nondecreasing within ``rtol``."""
    x, y = as_points(x), as_points(y)
    if np.any(np.all(x == y, axis=-1)):
        raise ValueError("the chain needs x != y")
    e = inequality_chain(alpha, x, y)
    ok = np.all(e[..., 1:] >= e[..., :-1] * (1.0 - rtol), axis=-1)
    if e.ndim == 1:
        return tuple(float(v) for v in e), bool(ok)
    return e, ok


@dataclass
class GeodesicPolar:
    """An analytic k_alpha geodesic, r(theta)^b sin(b theta + c2) = c1.

    Coordinates are normalized so the shorter endpoint sits at radius 1 on
    the frame's first axis; ``scale`` is its original norm. ``frame`` holds
    the orthonormal 2-frame of the plane through both endpoints. A radial
    pair (theta1 = 0) is stored with c1 = 0 and ``radial=True``.
    """

    c1: float
    c2: float
    beta: float
    theta_range: tuple[float, float]
    scale: float
    frame: np.ndarray
    r_end: float
    radial: bool = False
    reversed: bool = False

    def radius(self, theta) -> np.ndarray:
        """Normalized polar radius r(theta)."""
        theta = np.asarray(theta, dtype=float)
        if self.radial:
            raise ValueError("a radial geodesic has no polar radius function")
        return (self.c1 / np.sin(self.beta * theta + self.c2)) ** (1.0 / self.beta)

    def length(self) -> float:
        """Analytic k_alpha length of the geodesic."""
        b = self.beta
        if self.radial:
            return (self.r_end**b - 1.0) / b * self.scale**b
        t1 = self.theta_range[1]
        cot = lambda a: np.cos(a) / np.sin(a)  # noqa: E731
        return float(self.c1 / b * (cot(self.c2) - cot(b * t1 + self.c2)) * self.scale**b)

    def sample(self, n: int, spacing: str = "theta") -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (theta, r, points) at n samples from the first input point to the second.

        ``spacing="length"`` places samples at equal k_alpha length,
        ``"theta"`` at equal polar angle. Radii are unnormalized.
        """
        if n < 2:
            raise ValueError("need at least 2 samples")
        t1 = self.theta_range[1]
        b = self.beta
        if self.radial:
            s = np.linspace(0.0, 1.0, n)
            if spacing == "length":
                rb = 1.0 + s * (self.r_end**b - 1.0)
                r = rb ** (1.0 / b)
            else:
                r = 1.0 + s * (self.r_end - 1.0)
            r[-1] = self.r_end
            theta = np.zeros(n)
        else:
            if spacing == "length":
                # length from theta=0 is proportional to cot(c2) - cot(b*theta + c2)
                c0 = 1.0 / np.tan(self.c2)
                c_end = 1.0 / np.tan(b * t1 + self.c2)
                w = c0 + np.linspace(0.0, 1.0, n) * (c_end - c0)
                phase = np.arctan2(1.0, w)  # in (0, pi), acot branch
                theta = (phase - self.c2) / b
                theta[0], theta[-1] = 0.0, t1
                theta = np.clip(theta, 0.0, t1)
            elif spacing == "theta":
                theta = np.linspace(0.0, t1, n)
            else:
                raise ValueError(f"unknown spacing {spacing!r}")
            r = self.radius(theta)
            r[0], r[-1] = 1.0, self.r_end
        radius = r * self.scale
        pts = radius[:, None] * (np.cos(theta)[:, None] * self.frame[0] + np.sin(theta)[:, None] * self.frame[1])
        if self.reversed:
            return theta[::-1], radius[::-1], pts[::-1]
        return theta, radius, pts


def _frame(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    e1 = y / norm(y)
    w = x - np.dot(x, e1) * e1
    nw = norm(w)
    if nw <= 1e-15 * norm(x):
        # collinear: any unit vector orthogonal to e1
        k = int(np.argmin(np.abs(e1)))
        w = np.zeros_like(e1)
        w[k] = 1.0
        w -= np.dot(w, e1) * e1
        nw = norm(w)
    return np.stack([e1, w / nw])


def geodesic(alpha: float, x, y) -> GeodesicPolar:
    """Analytic k_alpha geodesic from x to y in R^n \\ {0} (n >= 2)."""
    _check_alpha(alpha, allow_one=False)
    x, y = as_points(x), as_points(y)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("geodesics need single points of R^n with n >= 2")
    x, y, nx, ny = _norms(x, y)
    # samples run from the shorter endpoint outward; flip back when that is y
    rev = True
    if nx < ny:
        x, y, nx, ny, rev = y, x, ny, nx, False
    b = 1.0 - alpha
    frame = _frame(y, x)
    theta1 = float(_angle(x, y, nx, ny))
    r = float(nx / ny)
    if b * theta1 >= np.pi:
        raise DomainError("endpoints are antipodal through the origin for alpha = 0")
    if theta1 == 0.0:
        return GeodesicPolar(0.0, np.pi / 2, b, (0.0, 0.0), float(ny), frame, r, radial=True, reversed=rev)
    R = r**b
    sb, cb = np.sin(b * theta1), np.cos(b * theta1)
    c1 = R * sb / np.sqrt((R - 1.0) ** 2 + 4.0 * R * np.sin(0.5 * b * theta1) ** 2)
    # cos(c2) has the sign of 1 - R cos(b theta1): c2 is obtuse iff R cos(b theta1) >= 1
    c2 = float(np.arctan2(R * sb, 1.0 - R * cb))
    return GeodesicPolar(float(c1), c2, b, (0.0, theta1), float(ny), frame, r, reversed=rev)


# ---------------------------------------------------------------------------
# path length oracle


def adaptive_simpson(f: Callable, a, b, rtol: float = 1e-10, max_depth: int = 40) -> np.ndarray:
    """Vectorized adaptive Simpson quadrature of f over many intervals.

    ``f(idx, t)`` evaluates the integrand of interval ``idx`` at points t.
    ``a`` and ``b`` are arrays of interval ends; returns one integral per
    interval. Panels are split until the Richardson error estimate falls
    below ``rtol`` times the panel estimate, or ``max_depth`` is reached.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    idx = np.arange(a.size)
    m = 0.5 * (a + b)
    fa, fm, fb = f(idx, a), f(idx, m), f(idx, b)
    whole = (b - a) / 6.0 * (fa + 4 * fm + fb)
    total = np.zeros(a.size)
    lo, hi, depth = a, b, 0
    while idx.size:
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(idx, lm), f(idx, rm)
        left = (mid - lo) / 6.0 * (fa + 4 * flm + fm)
        right = (hi - mid) / 6.0 * (fm + 4 * frm + fb)
        err = left + right - whole
        done = (np.abs(err) <= 15.0 * rtol * np.abs(left + right)) | (depth >= max_depth)
        np.add.at(total, idx[done], (left + right + err / 15.0)[done])
        keep = ~done
        if not keep.any():
            break
        idx = np.concatenate([idx[keep], idx[keep]])
        lo, hi = np.concatenate([lo[keep], mid[keep]]), np.concatenate([mid[keep], hi[keep]])
        fa, fb = np.concatenate([fa[keep], fm[keep]]), np.concatenate([fm[keep], fb[keep]])
        fm = np.concatenate([flm[keep], frm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        depth += 1
    return total


def segment_weighted_lengths(weight: Callable, A: np.ndarray, B: np.ndarray, rtol: float = 1e-10,
                             max_depth: int = 40) -> np.ndarray:
    """Integral of weight(|gamma|) ds over each segment [A_i, B_i]."""
    seg = B - A
    L = norm(seg)
    out = np.zeros(L.size)
    keep = L > 0
    A, seg, L = A[keep], seg[keep], L[keep]
    # |A + t seg|^2 = aa + t (2 ab + t bb)
    aa = np.sum(A * A, axis=-1)
    ab2 = 2.0 * np.sum(A * seg, axis=-1)
    bb = L * L

    def integrand(i, t):
        r2 = aa[i] + t * (ab2[i] + t * bb[i])
        return L[i] * weight(np.sqrt(np.maximum(r2, 0.0)))

    n = A.shape[0]
    out[keep] = adaptive_simpson(integrand, np.zeros(n), np.ones(n), rtol, max_depth)
    return out


def polyline_weighted_length(weight: Callable, pts: np.ndarray, rtol: float = 1e-10,
                             max_depth: int = 40) -> float:
    """Integral of weight(|gamma|) ds along the polyline through ``pts``."""
    return float(np.sum(segment_weighted_lengths(weight, pts[:-1], pts[1:], rtol, max_depth)))


def path_lengths(alpha: float, paths: list, rtol: float = 1e-10) -> np.ndarray:
    """Lengths of many polylines under |x|^-alpha, integrated in one batch."""
    _check_alpha(alpha)
    A = np.vstack([np.asarray(p, dtype=float)[:-1] for p in paths])
    B = np.vstack([np.asarray(p, dtype=float)[1:] for p in paths])
    if np.any(norm(A) < 1e-300) or np.any(norm(B) < 1e-300):
        raise DomainError("path passes through the origin")
    seg = segment_weighted_lengths(lambda r: r ** (-alpha), A, B, rtol)
    starts = np.cumsum([0] + [len(p) - 1 for p in paths[:-1]])
    return np.add.reduceat(seg, starts)


PathLike = Union[np.ndarray, Callable]


def path_length(alpha: float, path: PathLike, refinement: int = 1024, rtol: float = 1e-10,
                max_samples: int = 1 << 20) -> float:
    """Length of a path under the density |x|^-alpha, by quadrature.

    ``path`` is either an array of points (a polyline, integrated exactly up
    to the quadrature tolerance) or a callable gamma(t) on [0, 1] accepting
    an array of parameters. Callables are sampled at ``refinement`` points
    and the sample count doubled until successive Richardson-extrapolated
    estimates agree to ``rtol`` or ``max_samples`` is reached.
    """
    _check_alpha(alpha)

    def w(r):
        if np.any(r < 1e-300):
            raise DomainError("path passes through the origin")
        return r ** (-alpha)

    if not callable(path):
        pts = np.asarray(path, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[0] < 2:
            raise ValueError("a path needs at least 2 samples")
        return polyline_weighted_length(w, pts, rtol)

    n = max(int(refinement), 2)
    prev_raw = polyline_weighted_length(w, np.asarray(path(np.linspace(0, 1, n)), dtype=float), rtol)
    prev_ext: Optional[float] = None
    while True:
        n = 2 * n - 1
        raw = polyline_weighted_length(w, np.asarray(path(np.linspace(0, 1, n)), dtype=float), rtol)
        ext = raw + (raw - prev_raw) / 3.0  # chord error is O(h^2)
        if prev_ext is not None and abs(ext - prev_ext) <= rtol * abs(ext):
            return ext
        if n >= max_samples:
            return ext
        prev_raw, prev_ext = raw, ext
