"""The M-relative distance rho_M(x, y) = |x - y| / M(|x|, |y|) and its tests.

Points are numpy arrays with coordinates on the last axis, so every distance
here evaluates row-wise over stacks of points.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from . import means
from ._util import (CheckResult, as_points, call_weight, log_uniform_points, norm,
                    rounding_slack, scalar_or_array)
from .fuzz import FuzzReport, point_sampler, triangle_fuzz
from .weights import WeightFunction, _apply1, pq_weight


def _ratio(num, den):
    # 0/0 = 0, t/0 = inf
    with np.errstate(all="ignore"):
        out = np.where(num == 0, 0.0, np.where(den == 0, np.inf, num / np.where(den == 0, 1.0, den)))
    return out


def rho_M(M, x, y):
    """|x - y| / M(|x|, |y|) with the convention 0/0 = 0."""
    x, y = as_points(x), as_points(y)
    den = call_weight(M, norm(x), norm(y))
    return scalar_or_array(_ratio(norm(x - y), den))


def rho_pq(p: float, q: float, x, y):
    """The (p, q)-relative distance |x - y| / (|x|^p + |y|^p)^(q/p)."""
    x, y = as_points(x), as_points(y)
    den = pq_weight(p, q, norm(x), norm(y))
    return scalar_or_array(_ratio(norm(x - y), den))


def pq_is_metric(p: float, q: float) -> bool:
    """Exact metricity region of the (p, q)-relative distance."""
    if p <= 0 or q < 0:
        raise ValueError("need p > 0 and q >= 0")
    if q == 0:
        return True
    return q <= 1 and p >= max(1.0 - q, (2.0 - q) / 3.0)


class Criterion(Enum):
    SUFFICIENT_HOLDS = "sufficient-holds"
    NECESSARY_FAILS = "necessary-fails"
    INCONCLUSIVE = "inconclusive"


def metric_criterion_quasimean(M, alpha: float, grid=None) -> tuple[Criterion, Optional[dict]]:
    """Compare the trace of an alpha-quasimean with that of S_alpha on x >= 1.

    Returns ``NECESSARY_FAILS`` (with witness) if M(x,1) < S_alpha(x,1) at a
    grid point, else ``SUFFICIENT_HOLDS`` if M(x,1)/S_alpha(x,1) is
    nondecreasing on the grid, else ``INCONCLUSIVE``.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    qm = means.quasimean_exponent_check(M, alpha, np.logspace(-4, 4, 129))
    if not qm.ok:
        raise ValueError(f"M is not an {alpha:g}-quasimean: {qm.witness}")
    g = np.logspace(0, 6, 512) if grid is None else np.unique(np.asarray(grid, dtype=float))
    if g.size < 2 or g[0] < 1:
        raise ValueError("grid must lie in [1, inf) with at least 2 points")
    m = call_weight(M, g, np.ones_like(g))
    s = np.asarray(means.s_quasimean(alpha, g, np.ones_like(g)))
    low = m < s - rounding_slack(s)
    if low.any():
        i = int(np.argmax(low))
        return Criterion.NECESSARY_FAILS, {"x": float(g[i]), "M": float(m[i]), "S": float(s[i])}
    ratio = m / s
    if np.all(np.diff(ratio) >= -rounding_slack(ratio[1:], ratio[:-1])):
        return Criterion.SUFFICIENT_HOLDS, None
    i = int(np.argmax(np.diff(ratio) < -rounding_slack(ratio[1:], ratio[:-1])))
    return Criterion.INCONCLUSIVE, {"x0": float(g[i]), "x1": float(g[i + 1])}


def line_sampler(lo: float = 1e-3, hi: float = 1e3) -> Callable:
    """Triples of signed reals with log-uniform magnitudes, as 1-D points."""

    def sample(rng, k):
        out = []
        for _ in range(3):
            mag = np.exp(rng.uniform(np.log(lo), np.log(hi), k))
            out.append((mag * rng.choice([-1.0, 1.0], k))[:, None])
        return tuple(out)

    return sample


def metric_on_line_fuzz(M, n_samples: int, seed: int = 0) -> FuzzReport:
    """Triangle campaign for rho_M on the real line."""
    return triangle_fuzz(lambda a, b: rho_M(M, a, b), line_sampler(), n_samples, seed)


def metric_fuzz(M, dim: int, n_samples: int, seed: int = 0) -> FuzzReport:
    """Triangle campaign for rho_M in R^dim."""
    return triangle_fuzz(lambda a, b: rho_M(M, a, b), point_sampler(dim), n_samples, seed)


def ptolemy_check(x, y, z, w):
    """Positive part of |z-w||x-y| - |y-w||x-z| - |x-w||z-y|."""
    x, y, z, w = (as_points(v) for v in (x, y, z, w))
    d = norm(z - w) * norm(x - y) - norm(y - w) * norm(x - z) - norm(x - w) * norm(z - y)
    return scalar_or_array(np.maximum(d, 0.0))


def ff_finite_metric_check(f: Callable, grid=None) -> CheckResult:
    """Grid test that f is nondecreasing, f(t)/t nonincreasing and convex.

    Convexity uses the three-point slope test on consecutive grid points.
    """
    if grid is None:
        grid = np.concatenate([[0.0], np.logspace(-6, 6, 512)])
    g = np.unique(np.asarray(grid, dtype=float))
    if g.size < 3 or g[0] < 0:
        raise ValueError("grid must lie in [0, inf) with at least 3 points")
    v = _apply1(f, g)
    bad = np.diff(v) < -rounding_slack(v[1:], v[:-1])
    if bad.any():
        i = int(np.argmax(bad))
        return CheckResult(False, {"reason": "decreasing", "t": (float(g[i]), float(g[i + 1]))})
    pos = g > 0
    r = v[pos] / g[pos]
    gp = g[pos]
    bad = np.diff(r) > rounding_slack(r[1:], r[:-1])
    if bad.any():
        i = int(np.argmax(bad))
        return CheckResult(False, {"reason": "f(t)/t increasing", "t": (float(gp[i]), float(gp[i + 1]))})
    h = np.diff(g)
    slope = np.diff(v) / h
    # rounding in f propagates into slopes as eps*|f|/h
    tol = 64 * np.finfo(float).eps * (np.abs(v[:-2]) + 2 * np.abs(v[1:-1]) + np.abs(v[2:])) * (1 / h[:-1] + 1 / h[1:])
    bad = np.diff(slope) < -tol
    if bad.any():
        i = int(np.argmax(bad))
        return CheckResult(False, {"reason": "not convex", "t": tuple(float(t) for t in g[i:i + 3])})
    return CheckResult(True)


class MetricKind(Enum):
    EUCLIDEAN = "euclidean"
    PQ = "pq"
    PRODUCT = "product"
    SPHERICAL = "spherical"
    CUSTOM = "custom"


@dataclass
class MetricDescriptor:
    """Names one of the relative metrics on R^dimension."""

    kind: MetricKind
    dimension: int = 2
    p: Optional[float] = None
    q: Optional[float] = None
    f: Optional[Callable] = None
    weight: Optional[WeightFunction] = None

    def __post_init__(self):
        self.kind = MetricKind(self.kind)
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if self.kind is MetricKind.PQ and not (self.p is not None and self.q is not None
                                               and self.p > 0 and self.q >= 0):
            raise ValueError("pq metrics need p > 0 and q >= 0")
        if self.kind is MetricKind.PRODUCT and self.f is None:
            raise ValueError("product metrics need f")
        if self.kind is MetricKind.CUSTOM and self.weight is None:
            raise ValueError("custom metrics need a weight")

    def as_weight(self) -> WeightFunction:
        if self.kind is MetricKind.EUCLIDEAN:
            return WeightFunction.constant(1.0)
        if self.kind is MetricKind.PQ:
            return WeightFunction.pq(self.p, self.q)
        if self.kind is MetricKind.PRODUCT:
            return WeightFunction.product(self.f)
        if self.kind is MetricKind.SPHERICAL:
            return WeightFunction.spherical()
        return self.weight

    def distance(self, x, y):
        if self.kind is MetricKind.PQ:
            return rho_pq(self.p, self.q, x, y)
        return rho_M(self.as_weight(), x, y)


def _apply_map(g, pts: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(g(pts), dtype=float)
        if out.shape == pts.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([np.asarray(g(p), dtype=float) for p in pts])


def bilipschitz_estimate(g: Callable, d, n_samples: int, seed: int = 0,
                         dim: Optional[int] = None) -> tuple[float, float]:
    """Sampled inf and sup of d(g(x), g(y)) / d(x, y) over random pairs.

    ``d`` is a MetricDescriptor or a row-wise distance callable (then ``dim``
    is required). The returned interval lies inside the true bilipschitz
    interval of g. Maps are expected to fix the origin.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    if isinstance(d, MetricDescriptor):
        dist, dim = d.distance, d.dimension
    else:
        if dim is None:
            raise ValueError("dim is required for a bare distance callable")
        dist = d
    rng = np.random.default_rng(seed)
    x = log_uniform_points(rng, n_samples, dim)
    y = log_uniform_points(rng, n_samples, dim)
    before = np.asarray(dist(x, y), dtype=float)
    after = np.asarray(dist(_apply_map(g, x), _apply_map(g, y)), dtype=float)
    ok = (before > 0) & np.isfinite(before) & np.isfinite(after)
    r = after[ok] / before[ok]
    return float(r.min()), float(r.max())


__all__ = [
    "Criterion", "FuzzReport", "MetricDescriptor", "MetricKind", "WeightFunction",
    "bilipschitz_estimate", "ff_finite_metric_check", "line_sampler", "metric_criterion_quasimean",
    "metric_fuzz", "metric_on_line_fuzz", "pq_is_metric", "ptolemy_check", "rho_M", "rho_pq",
]
