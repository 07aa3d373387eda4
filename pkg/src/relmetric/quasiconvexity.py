"""Quasiconvexity constants of relative metrics.

For an alpha-quasimean M with rho_M a metric, the best quasiconvexity
constant is the supremum over x >= 0, y > 0 of

    k_alpha(x, -y) / (x + y) * M(x, y),

which is estimated here by log-grid search plus golden-section refinement.
Path constructions for product weights M = f(x) f(y) measure lengths as
sums of rho_M over fine partitions, the definition of metric length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._util import CheckResult, as_points, call_weight, log_uniform_points, norm
from .quasihyperbolic import _k_polar
from .relative import rho_M
from .weights import WeightFunction, _apply1

INVGOLD = (np.sqrt(5.0) - 1.0) / 2.0
PATH_SAMPLES = 4096


@dataclass
class SearchConfig:
    """Grid and refinement settings for supremum searches."""

    r_max: float = 1e8
    n_ratio: int = 2048
    log10_box: float = 6.0
    n_box: int = 257
    xtol: float = 1e-10
    growth_tol: float = 1e-3


@dataclass
class QuasiconvexityEstimate:
    c_estimate: float
    argmax_r: float
    lower_bound: float
    upper_bound: float
    converged: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       xtol: float = 1e-10, max_iter: int = 200) -> tuple[float, float]:
    """Maximize a unimodal f on [a, b]; returns (argmax, max)."""
    x1 = b - INVGOLD * (b - a)
    x2 = a + INVGOLD * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if abs(b - a) <= xtol:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + INVGOLD * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - INVGOLD * (b - a)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _opposite_k(alpha: float, x, y):
    """k_alpha(x, -y) for x >= 0, y > 0 (points on opposite rays)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    b = 1.0 - alpha
    with np.errstate(all="ignore"):
        inner = _k_polar(alpha, np.where(x > 0, x, 1.0), y, np.pi)
        at_zero = np.inf * np.ones_like(y) if b == 0 else y**b / b
    return np.where(x > 0, inner, at_zero)


def quasiconvexity_objective(M, alpha: float, x, y):
    """k_alpha(x, -y)/(x + y) * M(x, y)."""
    with np.errstate(all="ignore"):
        return _opposite_k(alpha, x, y) / (np.asarray(x) + np.asarray(y)) * call_weight(M, x, y)


def _check_alpha(alpha):
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")


def c_M_estimate(M, alpha: float, config: Optional[SearchConfig] = None) -> QuasiconvexityEstimate:
    """Estimate sup_{x>=0, y>0} k_alpha(x,-y)/(x+y) M(x,y) for an alpha-quasimean M.

    For alpha < 1 the objective is bounded by 2/(1 - alpha), reported as the
    upper bound. For alpha = 1 the search reports divergence when the
    objective is infinite at x = 0 or still grows by more than
    ``growth_tol`` across the outermost decade of magnitude ratios.
    """
    _check_alpha(alpha)
    cfg = config or SearchConfig()
    D = cfg.log10_box
    ys = np.logspace(-D, D, cfg.n_box)
    xs = np.concatenate([[0.0], ys])
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    F = quasiconvexity_objective(M, alpha, X, Y)
    beta = 1.0 - alpha
    upper = 2.0 / beta if beta > 0 else np.inf
    if np.any(np.isposinf(F)):
        return QuasiconvexityEstimate(np.inf, np.inf, np.inf, upper, False)
    Fv = np.where(np.isnan(F), -np.inf, F)
    if beta == 0:
        with np.errstate(divide="ignore"):
            t = np.abs(np.log10(X[1:] / Y[1:]))
        top = t.max()
        last = Fv[1:][t > top - 1].max()
        prev = Fv[1:][(t > top - 2) & (t <= top - 1)].max()
        if last > prev * (1.0 + cfg.growth_tol):
            return QuasiconvexityEstimate(np.inf, np.inf, float(Fv.max()), upper, False)
    i, j = np.unravel_index(int(np.argmax(Fv)), Fv.shape)
    lower = float(Fv[i, j])
    best_x, best_y, best = float(xs[i]), float(ys[j]), lower
    step = 2 * D / (cfg.n_box - 1)
    # coordinate-wise refinement in log coordinates
    for _ in range(4):
        ly = np.log10(best_y)
        g = lambda s: float(quasiconvexity_objective(M, alpha, best_x, 10.0**s))  # noqa: E731
        s, v = golden_section_max(g, ly - step, ly + step, cfg.xtol)
        if v > best:
            best, best_y = v, 10.0**s
        if best_x > 0:
            lx = np.log10(best_x)
            h = lambda s: float(quasiconvexity_objective(M, alpha, 10.0**s, best_y))  # noqa: E731
            s, v = golden_section_max(h, lx - step, lx + step, cfg.xtol)
            if v > best:
                best, best_x = v, 10.0**s
    ratio = np.inf if best_x == 0 else max(best_x, best_y) / min(best_x, best_y)
    return QuasiconvexityEstimate(best, ratio, lower, max(upper, best), True)


def c_M_homogeneous(M, alpha: float, config: Optional[SearchConfig] = None) -> QuasiconvexityEstimate:
    """Estimate sup_{r>=1} k_alpha(r,-1)/(r+1) M(r,1) for alpha-homogeneous M, M(1,1)=1.

    The r -> inf limit M(1,0)/(1-alpha) is included as a candidate. The
    upper bound reported is 2^alpha/(1-alpha) (infinite for alpha = 1).
    """
    _check_alpha(alpha)
    if abs(float(call_weight(M, 1.0, 1.0)) - 1.0) > 1e-9:
        raise ValueError("M must be normalized so that M(1, 1) = 1")
    cfg = config or SearchConfig()
    beta = 1.0 - alpha
    lr = np.linspace(0.0, np.log10(cfg.r_max), cfg.n_ratio)
    r = 10.0**lr
    F = quasiconvexity_objective(M, alpha, r, np.ones_like(r))
    tail0 = float(call_weight(M, 1.0, 0.0))
    if beta > 0:
        limit = tail0 / beta
    else:
        limit = np.inf if tail0 > 0 else np.nan
    upper = 2.0**alpha / beta if beta > 0 else np.inf
    if np.isposinf(limit):
        return QuasiconvexityEstimate(np.inf, np.inf, float(F.max()), upper, False)
    if np.isnan(limit):
        last = F[lr > lr[-1] - 1].max()
        prev = F[(lr > lr[-1] - 2) & (lr <= lr[-1] - 1)].max()
        if last > prev * (1.0 + cfg.growth_tol):
            return QuasiconvexityEstimate(np.inf, np.inf, float(F.max()), upper, False)
        limit = -np.inf
    i = int(np.argmax(F))
    lower = float(max(F[i], limit))
    lo, hi = lr[max(i - 1, 0)], lr[min(i + 1, lr.size - 1)]
    g = lambda s: float(quasiconvexity_objective(M, alpha, 10.0**s, 1.0))  # noqa: E731
    s, v = golden_section_max(g, lo, hi, cfg.xtol)
    best, arg = float(F[i]), float(r[i])
    if v > best:
        best, arg = v, 10.0**s
    if limit >= best:
        best, arg = float(limit), np.inf
    return QuasiconvexityEstimate(best, arg, lower, upper, True)


def c_pq_bounds(p: float, q: float) -> tuple[float, float]:
    """Bounds on the quasiconvexity constant of the (p, q)-relative metric, 0 < q < 1."""
    if not 0.0 < q < 1.0:
        raise ValueError("need 0 < q < 1")
    if p <= 0:
        raise ValueError("need p > 0")
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    lower = 2.0 ** (-q * inv_p) / (1.0 - q)
    upper = max(2.0 ** (q * (1.0 - inv_p)), 1.0) / (1.0 - q)
    return lower, upper


def normalized_pq_weight(p: float, q: float) -> WeightFunction:
    """A_p^q, the (p, q) weight scaled so that M(1, 1) = 1."""
    return WeightFunction.power_mean(p).power(q)


# ---------------------------------------------------------------------------
# path constructions


def metric_path_length(dist: Callable, pts: np.ndarray) -> float:
    """Sum of dist over consecutive samples of a path."""
    return float(np.sum(dist(pts[:-1], pts[1:])))


def _plane(x: np.ndarray, y: np.ndarray):
    e1 = x / norm(x)
    w = y - np.dot(y, e1) * e1
    if norm(w) <= 1e-14 * norm(y):
        k = int(np.argmin(np.abs(e1)))
        w = np.zeros_like(e1)
        w[k] = 1.0
        w -= np.dot(w, e1) * e1
    e2 = w / norm(w)
    theta = float(np.arctan2(np.dot(y, e2), np.dot(y, e1)))
    return e1, e2, abs(theta)


def _arc(radius: float, e1, e2, theta: float, n: int) -> np.ndarray:
    t = np.linspace(0.0, theta, n)
    return radius * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)


def _radial(u: np.ndarray, r0: float, r1: float, n: int) -> np.ndarray:
    if r0 > 0 and r1 > 0:
        r = np.geomspace(r0, r1, n)
    else:
        r = np.linspace(r0, r1, n)
    r[0], r[-1] = r0, r1
    return r[:, None] * u


def radial_circular_paths(x, y, n: int = PATH_SAMPLES) -> list[np.ndarray]:
    """The two radial/circular paths from x to y (|x| >= |y|).

    The first runs radially from x to radius |y| and then along the circle
    of radius |y|; the second runs along the circle of radius |x| first.
    """
    x, y = as_points(x), as_points(y)
    nx, ny = norm(x), norm(y)
    if ny == 0:
        return [_radial(x / nx, nx, 0.0, n)]
    e1, e2, theta = _plane(x, y)
    yhat = y / ny
    g1 = np.vstack([_radial(e1, nx, ny, n), _arc(ny, e1, e2, theta, n)[1:]])
    g2 = np.vstack([_arc(nx, e1, e2, theta, n), _radial(yhat, nx, ny, n)[1:]])
    g1[-1], g2[-1] = y, y
    return [g1, g2]


def inversion_path(x, y, n: int = PATH_SAMPLES) -> np.ndarray:
    """Image under x -> x/|x|^2 of the segment between the inverted endpoints."""
    x, y = as_points(x), as_points(y)
    xi, yi = x / np.dot(x, x), y / np.dot(y, y)
    t = np.linspace(0.0, 1.0, n)
    p = xi + t[:, None] * (yi - xi)
    if np.any(np.sum(p * p, axis=-1) == 0):
        # a sample at the origin would map to infinity; use cell midpoints
        t = np.concatenate([[0.0], (np.arange(n - 1) + 0.5) / (n - 1), [1.0]])
        p = xi + t[:, None] * (yi - xi)
    pts = p / np.sum(p * p, axis=-1)[:, None]
    pts[0], pts[-1] = x, y
    return pts


def segment_path(x, y, n: int = PATH_SAMPLES) -> np.ndarray:
    x, y = as_points(x), as_points(y)
    t = np.linspace(0.0, 1.0, n)[:, None]
    pts = x + t * (y - x)
    pts[-1] = y
    return pts


def ff_path_length_bound(f: Callable, x, y, n: int = PATH_SAMPLES) -> tuple[float, float]:
    """Shortest constructed rho_M path for M = f(x) f(y), and its ratio to rho_M(x, y).

    For f(0) > 0 the candidates are the two radial/circular paths; the ratio
    never exceeds sqrt(pi^2/4 + 4) for moderately increasing convex f. For
    f(0) = 0 (so f(t) = ct) the inverted segment is used, which is a
    geodesic.
    """
    f0 = float(_apply1(f, np.array(0.0)))
    if f0 < 0 or np.isnan(f0):
        raise ValueError("f(0) must be nonnegative")
    x, y = as_points(x), as_points(y)
    if norm(x) < norm(y):
        x, y = y, x
    if f0 == 0:
        if norm(y) == 0:
            raise ValueError("rho_M is infinite at the origin when f(0) = 0")
        M = WeightFunction.product(f)
        paths = [inversion_path(x, y, n)]
    else:
        M = WeightFunction.product(lambda t: _apply1(f, t) / f0)
        paths = radial_circular_paths(x, y, n)
    dist = lambda a, b: rho_M(M, a, b)  # noqa: E731
    best = min(metric_path_length(dist, p) for p in paths)
    d = float(dist(x, y))
    return best, (best / d if d > 0 else 1.0)


def one_quasiconvex_classification_test(M, n_pairs: int = 64, seed: int = 0, dim: int = 2,
                                        n: int = PATH_SAMPLES, rtol: float = 1e-6) -> CheckResult:
    """Check sampled pairs for a constructed path of length rho_M(x, y).

    Candidates are the segment, the inverted segment and both radial/circular
    paths. Half of the pairs lie on opposite rays. Returns ok=False with the
    worst pair when some pair's best candidate exceeds rho_M by more than
    ``rtol``; by the classification only M = c and M = cxy pass.
    """
    rng = np.random.default_rng(seed)
    dist = lambda a, b: rho_M(M, a, b)  # noqa: E731
    worst = (0.0, None)
    for k in range(n_pairs):
        x, y = log_uniform_points(rng, 2, dim, 0.1, 10.0)
        if k % 2 == 0:
            y = -norm(y) * x / norm(x)
        d = float(dist(x, y))
        if not np.isfinite(d) or d == 0:
            continue
        a, b = (x, y) if norm(x) >= norm(y) else (y, x)
        cands = [segment_path(x, y, n), inversion_path(x, y, n), *radial_circular_paths(a, b, n)]
        lengths = [metric_path_length(dist, p) for p in cands]
        best = min(v for v in lengths if np.isfinite(v)) if any(np.isfinite(lengths)) else np.inf
        excess = best / d - 1.0
        if excess > worst[0]:
            worst = (excess, {"x": x.tolist(), "y": y.tolist(), "rho": d, "best_path": best,
                              "excess": excess})
    if worst[0] > rtol:
        return CheckResult(False, worst[1])
    return CheckResult(True)


def random_convex_moderate(rng: np.random.Generator) -> tuple[Callable, dict]:
    """Draw a convex, nondecreasing f with f(t)/t nonincreasing and f(0) > 0.

    Two families are used: a + bt + sum_j c_j (t - k_j)_+ with
    sum_j c_j k_j <= a, and sqrt(a^2 + b^2 t^2) + ct.
    """
    if rng.random() < 0.5:
        a = float(np.exp(rng.uniform(-2, 2)))
        b = float(np.exp(rng.uniform(-2, 2)))
        knots = np.sort(np.exp(rng.uniform(-2, 2, rng.integers(1, 4))))
        c = rng.dirichlet(np.ones(knots.size)) * a * rng.uniform(0.1, 1.0)
        c = c / knots

        def f(t):
            t = np.asarray(t, dtype=float)
            return a + b * t + np.sum(c * np.maximum(t[..., None] - knots, 0.0), axis=-1)

        return f, {"family": "hinge", "a": a, "b": b, "knots": knots.tolist(), "c": c.tolist()}
    a, b, c = (float(v) for v in np.exp(rng.uniform(-2, 2, 3)))
    return (lambda t: np.sqrt(a * a + b * b * np.asarray(t, dtype=float) ** 2) + c * np.asarray(t, dtype=float),
            {"family": "hyperbola", "a": a, "b": b, "c": c})
