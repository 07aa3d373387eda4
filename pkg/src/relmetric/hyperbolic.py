"""Chordal cross-ratios and hyperbolic-type metrics on domains of the extended space.

Points of the extended space are arrays with coordinates on the last axis;
the point at infinity is a row of ``inf`` (see :func:`infinity`). All
cross-ratios go through the chordal metric, so infinity needs no special
handling beyond the chordal branches.

Every distance here depends on a domain only through its boundary. A
boundary is a finite point set, a sphere, or a hyperplane together with
infinity; continuous boundaries are sampled and the supremum over boundary
pairs is refined locally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

from ._util import CheckResult, as_points, norm, random_orthogonal
from .means import power_mean
from .relative import rho_M
from .weights import _apply1

BOUNDARY_SAMPLES = 2048


def infinity(dim: int) -> np.ndarray:
    """The point at infinity of the extended space in dimension dim."""
    return np.full(dim, np.inf)


def is_infinite(p) -> np.ndarray:
    return np.any(np.isinf(np.asarray(p, dtype=float)), axis=-1)


def _sq1(p, inf):
    # sqrt(1 + |p|^2), with the inf rows set to 1 so they can be patched later
    return np.hypot(1.0, np.where(inf, 0.0, norm(np.where(inf[..., None], 0.0, p))))


def chordal(x, y):
    """Chordal distance q(x, y) = |x - y| / (sqrt(1 + |x|^2) sqrt(1 + |y|^2))."""
    x, y = np.broadcast_arrays(as_points(x).astype(float), as_points(y).astype(float))
    ix, iy = is_infinite(x), is_infinite(y)
    fx, fy = np.where(ix[..., None], 0.0, x), np.where(iy[..., None], 0.0, y)
    sx, sy = _sq1(fx, ix), _sq1(fy, iy)
    out = norm(fx - fy) / (sx * sy)
    out = np.where(ix & ~iy, 1.0 / sy, out)
    out = np.where(iy & ~ix, 1.0 / sx, out)
    out = np.where(ix & iy, 0.0, out)
    return out[()] if out.ndim == 0 else out


def chordal_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pairwise chordal distances between the rows of A and B."""
    A, B = np.atleast_2d(A).astype(float), np.atleast_2d(B).astype(float)
    ia, ib = is_infinite(A), is_infinite(B)
    fa, fb = np.where(ia[:, None], 0.0, A), np.where(ib[:, None], 0.0, B)
    sa, sb = np.hypot(1.0, norm(fa)), np.hypot(1.0, norm(fb))
    Q = cdist(fa, fb) / np.outer(sa, sb)
    Q[ia, :] = 1.0 / sb
    Q[:, ib] = (1.0 / sa)[:, None]
    Q[np.ix_(ia, ib)] = 0.0
    return Q


def _div(num, den):
    # 0/0 = 0, t/0 = inf
    with np.errstate(all="ignore"):
        return np.where(num == 0, 0.0, np.where(den == 0, np.inf, num / np.where(den == 0, 1.0, den)))


def cross_ratio(a, b, c, d):
    """|a, b, c, d| = q(a, c) q(b, d) / (q(a, b) q(c, d))."""
    out = _div(chordal(a, c) * chordal(b, d), chordal(a, b) * chordal(c, d))
    return out[()] if np.ndim(out) == 0 else out


def hyperbolic_ball(x, y):
    """Hyperbolic distance in the unit ball, 2 arsh(|x-y| / sqrt((1-|x|^2)(1-|y|^2)))."""
    x, y = as_points(x).astype(float), as_points(y).astype(float)
    nx, ny = norm(x), norm(y)
    if np.any(nx >= 1) or np.any(ny >= 1):
        raise ValueError("points must lie in the open unit ball")
    # 1 - |x|^2 = (1 - |x|)(1 + |x|) keeps precision near the boundary
    out = 2.0 * np.arcsinh(norm(x - y) / np.sqrt((1 - nx) * (1 + nx) * (1 - ny) * (1 + ny)))
    return out[()] if out.ndim == 0 else out


def hyperbolic_halfspace(x, y):
    """Hyperbolic distance in the upper half-space x_n > 0."""
    x, y = as_points(x).astype(float), as_points(y).astype(float)
    if np.any(x[..., -1] <= 0) or np.any(y[..., -1] <= 0):
        raise ValueError("points must satisfy x_n > 0")
    out = 2.0 * np.arcsinh(norm(x - y) / (2.0 * np.sqrt(x[..., -1] * y[..., -1])))
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Mobius maps


@dataclass
class Inversion:
    """Inversion in the sphere |x - center| = radius."""

    center: np.ndarray
    radius: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inf = is_infinite(x)
        d = np.where(inf[..., None], 0.0, x) - self.center
        r2 = np.sum(d * d, axis=-1, keepdims=True)
        with np.errstate(all="ignore"):
            out = self.center + self.radius**2 * d / r2
        out = np.where((r2 == 0) & ~inf[..., None], np.inf, out)
        return np.where(inf[..., None], self.center, out)


@dataclass
class Orthogonal:
    matrix: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inf = is_infinite(x)
        out = np.where(inf[..., None], 0.0, x) @ self.matrix.T
        return np.where(inf[..., None], np.inf, out)


@dataclass
class Translation:
    shift: np.ndarray

    def __call__(self, x):
        return np.asarray(x, dtype=float) + self.shift


@dataclass
class Dilation:
    factor: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inf = is_infinite(x)
        return np.where(inf[..., None], np.inf, self.factor * np.where(inf[..., None], 0.0, x))


@dataclass
class MobiusMap:
    """Composition of primitive maps, applied first to last."""

    parts: list = field(default_factory=list)

    def __call__(self, x):
        out = np.asarray(x, dtype=float)
        for f in self.parts:
            out = f(out)
        return out

    def then(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap(self.parts + other.parts)


def ball_self_map(a, Q: Optional[np.ndarray] = None) -> MobiusMap:
    """A Mobius self-map of the unit ball sending a to 0, followed by Q.

    The first step is the inversion in the sphere orthogonal to the unit
    sphere centred at a/|a|^2; it swaps a and 0.
    """
    a = as_points(a).astype(float)
    na = norm(a)
    if na >= 1:
        raise ValueError("a must lie in the open unit ball")
    parts = []
    if na > 0:
        parts.append(Inversion(a / na**2, np.sqrt((1 - na) * (1 + na)) / na))
    if Q is not None:
        parts.append(Orthogonal(np.asarray(Q, dtype=float)))
    return MobiusMap(parts)


def random_ball_self_map(rng: np.random.Generator, dim: int, max_radius: float = 0.9) -> MobiusMap:
    u = rng.normal(size=dim)
    a = u / norm(u) * max_radius * rng.random() ** (1.0 / dim)
    return ball_self_map(a, random_orthogonal(rng, dim))


def random_mobius(rng: np.random.Generator, dim: int, n_parts: int = 3) -> MobiusMap:
    """A random composition of primitive Mobius maps."""
    parts = []
    for _ in range(n_parts):
        kind = rng.integers(4)
        if kind == 0:
            parts.append(Inversion(rng.normal(size=dim), float(np.exp(rng.uniform(-1, 1)))))
        elif kind == 1:
            parts.append(Orthogonal(random_orthogonal(rng, dim)))
        elif kind == 2:
            parts.append(Translation(rng.normal(size=dim)))
        else:
            parts.append(Dilation(float(np.exp(rng.uniform(-1, 1)))))
    return MobiusMap(parts)


def random_ball_points(rng: np.random.Generator, n: int, dim: int, max_radius: float = 0.95) -> np.ndarray:
    u = rng.normal(size=(n, dim))
    return u / norm(u)[:, None] * max_radius * rng.random((n, 1)) ** (1.0 / dim)


# ---------------------------------------------------------------------------
# domains


def fibonacci_sphere(n: int, dim: int = 3) -> np.ndarray:
    """n nearly uniform unit vectors (Fibonacci lattice for dim 3, circle for dim 2)."""
    if dim == 2:
        t = 2 * np.pi * (np.arange(n) + 0.5) / n
        return np.column_stack([np.cos(t), np.sin(t)])
    if dim != 3:
        raise ValueError("sampled sphere boundaries support dimensions 2 and 3")
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    phi = np.pi * (1 + np.sqrt(5.0)) * k
    rho = np.sqrt(1 - z * z)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def _tangent_basis(s: np.ndarray) -> np.ndarray:
    # rows spanning the tangent space of the unit sphere at s
    _, _, vt = np.linalg.svd(s[None, :])
    return vt[1:]


@dataclass
class DomainSpec:
    """Boundary of a domain in the extended space.

    kind ``points``: finite boundary ``points`` (inf rows allowed).
    kind ``sphere``: sphere with ``center`` and ``radius``.
    kind ``halfspace``: hyperplane {x . normal = offset} together with infinity.
    """

    kind: str
    dim: int = 3
    points: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    radius: float = 1.0
    normal: Optional[np.ndarray] = None
    offset: float = 0.0
    samples: int = BOUNDARY_SAMPLES
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "points":
            pts = np.atleast_2d(np.asarray(self.points, dtype=float))
            if pts.shape[0] < 2:
                raise ValueError("the boundary needs at least two points")
            self.points = pts
            self.dim = pts.shape[1]
        elif self.kind == "sphere":
            self.center = np.zeros(self.dim) if self.center is None else np.asarray(self.center, float)
            self.dim = self.center.size
            if not self.radius > 0:
                raise ValueError("sphere radius must be positive")
        elif self.kind == "halfspace":
            nv = np.eye(self.dim)[-1] if self.normal is None else np.asarray(self.normal, float)
            self.dim = nv.size
            self.normal = nv / norm(nv)
        else:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def punctured(cls, dim: int = 3) -> "DomainSpec":
        """R^n minus the origin; its boundary is {0, inf}."""
        return cls("points", points=np.vstack([np.zeros(dim), infinity(dim)]))

    @classmethod
    def unit_ball(cls, dim: int = 3, samples: int = BOUNDARY_SAMPLES) -> "DomainSpec":
        return cls("sphere", dim=dim, center=np.zeros(dim), radius=1.0, samples=samples)

    @classmethod
    def upper_halfspace(cls, dim: int = 3, samples: int = BOUNDARY_SAMPLES) -> "DomainSpec":
        return cls("halfspace", dim=dim, samples=samples)

    @classmethod
    def from_dict(cls, d: dict) -> "DomainSpec":
        d = dict(d)
        kind = d.pop("kind")
        if kind == "punctured":
            return cls.punctured(int(d.get("dim", 3)))
        if kind == "points":
            d["points"] = [[np.inf if v in ("inf", "infinity") else float(v) for v in p]
                           if not isinstance(p, str) else None for p in d["points"]]
            dim = max(len(p) for p in d["points"] if p is not None)
            d["points"] = [p if p is not None else [np.inf] * dim for p in d["points"]]
        return cls(kind, **d)

    @classmethod
    def from_json(cls, path) -> "DomainSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def map(self, g: Callable) -> "DomainSpec":
        """Image of a finite boundary under a point map."""
        if self.kind != "points":
            raise ValueError("only finite boundaries can be pushed forward")
        return DomainSpec("points", points=g(self.points))

    # boundary charts -------------------------------------------------------

    def chart(self, s: np.ndarray, x=None, y=None) -> np.ndarray:
        """Boundary points for unit vectors s (continuous boundaries)."""
        if self.kind == "sphere":
            return self.center + self.radius * s
        if self.kind == "halfspace":
            c, scale, frame = self._plane_chart(x, y)
            with np.errstate(all="ignore"):
                t = s[..., :-1] / (1.0 - s[..., -1:])
                out = c + scale * t @ frame
            return np.where((s[..., -1:] >= 1.0), np.inf, out)
        raise ValueError("finite boundaries have no chart")

    def _plane_chart(self, x, y):
        # stereographic chart centred under the midpoint of x and y
        nv = self.normal
        frame = _tangent_basis(nv)
        m = 0.5 * (as_points(x) + as_points(y))
        c = m - (np.dot(m, nv) - self.offset) * nv
        h = max(abs(np.dot(as_points(x), nv) - self.offset), abs(np.dot(as_points(y), nv) - self.offset),
                norm(as_points(x) - as_points(y)), 1e-300)
        return c, h, frame

    def unit_samples(self) -> np.ndarray:
        if "unit" not in self._cache:
            self._cache["unit"] = fibonacci_sphere(self.samples, self.dim)
        return self._cache["unit"]

    def boundary_samples(self, x=None, y=None) -> np.ndarray:
        if self.kind == "points":
            return self.points
        pts = self.chart(self.unit_samples(), x, y)
        if self.kind == "halfspace":
            pts = np.vstack([pts, infinity(self.dim)])
        return pts

    def boundary_diameter(self) -> float:
        """Chordal diameter of the boundary (sampled for continuous boundaries)."""
        if self.kind == "halfspace":
            return 1.0  # the plane contains points chordally antipodal through inf
        pts = self.boundary_samples()
        return float(chordal_matrix(pts, pts).max())

    def contains_boundary_point(self, x) -> bool:
        x = as_points(x).astype(float)
        if self.kind == "points":
            return bool(np.any(chordal_matrix(self.points, x[None, :]) == 0))
        if self.kind == "sphere":
            return bool(norm(x - self.center) == self.radius)
        return bool(np.isinf(x).any() or np.dot(x, self.normal) == self.offset)


# ---------------------------------------------------------------------------
# suprema over boundary pairs


def _s_value(qx_a, qy_a, qx_b, qy_b, q_ab, qxy):
    # |a,x,b,y| |a,y,b,x|
    return _div((qxy * q_ab) ** 2, qx_a * qy_b * qy_a * qx_b)


def _m_value(M):
    def value(qx_a, qy_a, qx_b, qy_b, q_ab, qxy):
        u = _div(qx_a * qy_b, qxy * q_ab)  # |x, y, a, b|
        v = _div(qx_b * qy_a, qxy * q_ab)  # |x, y, b, a|
        with np.errstate(all="ignore"):
            out = _div(1.0, np.asarray(M(u, v), dtype=float))
        return np.where(q_ab == 0, 0.0, np.nan_to_num(out, nan=0.0, posinf=np.inf))
    return value


def _boundary_sup(G: DomainSpec, x, y, value, refine: bool = True, n_starts: int = 3) -> float:
    x, y = as_points(x).astype(float), as_points(y).astype(float)
    if x.size != G.dim or y.size != G.dim:
        raise ValueError("point dimension does not match the domain")
    qxy = float(chordal(x, y))
    if qxy == 0:
        return 0.0
    A = G.boundary_samples(x, y)
    qx = chordal_matrix(A, x[None, :])[:, 0]
    qy = chordal_matrix(A, y[None, :])[:, 0]
    if np.any((qx == 0) | (qy == 0)):
        raise ValueError("x and y must not lie on the boundary")
    if G.kind == "sphere":
        if "Q" not in G._cache:
            G._cache["Q"] = chordal_matrix(A, A)
        Q = G._cache["Q"]
    else:
        Q = chordal_matrix(A, A)
    V = value(qx[:, None], qy[:, None], qx[None, :], qy[None, :], Q, qxy)
    np.fill_diagonal(V, 0.0)
    best = float(V.max())
    if G.kind == "points" or not refine or not np.isfinite(best):
        return best
    U = G.unit_samples()
    m = U.shape[0]
    top = min(V.size - 1, 4 * n_starts)
    flat = np.argpartition(V, -top, axis=None)[-top:]
    flat = flat[np.argsort(V.flat[flat])[::-1]]
    starts, seen = [], set()
    for k in flat:
        i, j = divmod(int(k), V.shape[1])
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        starts.append((i, j))
        if len(starts) >= n_starts:
            break
    for i, j in starts:
        best = max(best, _refine_pair(G, x, y, qxy, value, U, i, j, m))
    return best


def _unit_or_pole(U, i, dim):
    # the extra halfspace sample at index m is infinity, the north pole of the chart
    if i < U.shape[0]:
        return U[i]
    return np.eye(dim)[-1] * (1 - 1e-9) + 1e-9 * np.eye(dim)[0]


def _refine_pair(G, x, y, qxy, value, U, i, j, m) -> float:
    dim = G.dim
    si = _unit_or_pole(U, i, dim)
    sj = _unit_or_pole(U, j, dim)
    si, sj = si / norm(si), sj / norm(sj)
    Ti, Tj = _tangent_basis(si), _tangent_basis(sj)
    k = dim - 1

    def points(t):
        a = si + t[:k] @ Ti
        b = sj + t[k:] @ Tj
        ab = np.vstack([a / norm(a), b / norm(b)])
        return G.chart(ab, x, y)

    def objective(t):
        ab = points(t)
        C = chordal_matrix(ab, np.vstack([x, y, ab[1]]))
        v = float(value(C[0, 0], C[0, 1], C[1, 0], C[1, 1], C[0, 2], qxy))
        return -np.log(v) if v > 0 and np.isfinite(v) else 1e300

    res = minimize(objective, np.zeros(2 * k), method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000 * k,
                            "initial_simplex": _simplex(2 * k, 0.02)})
    return float(np.exp(-res.fun)) if res.fun < 1e299 else 0.0


def _simplex(n, step):
    return np.vstack([np.zeros(n), step * np.eye(n)])


def rho_prime(M, G: DomainSpec, x, y, refine: bool = True) -> float:
    """sup over boundary pairs (a, b) of 1 / M(|x,y,a,b|, |x,y,b,a|)."""
    return _boundary_sup(G, x, y, _m_value(M), refine)


def seittenranta_weight(p: float) -> Callable:
    """max(1, 2^(-1/p)) A_p; p = 0 takes the factor 1 (the limit from both sides is 1 and inf)."""
    if p == 0 or p == np.inf:
        c = 1.0
    else:
        c = max(1.0, 2.0 ** (-1.0 / p))
    return lambda u, v: c * power_mean(p, u, v)


def seittenranta(p: float, G: DomainSpec, x, y, refine: bool = True) -> float:
    """log(1 + rho'_{M,G}(x, y)) with M = max(1, 2^(-1/p)) A_p."""
    return float(np.log1p(rho_prime(seittenranta_weight(p), G, x, y, refine)))


def arch_sup(G: DomainSpec, x, y, refine: bool = True) -> float:
    """S = sup over boundary pairs of |a,x,b,y| |a,y,b,x|."""
    return _boundary_sup(G, x, y, _s_value, refine)


def rho_G(G: DomainSpec, x, y, refine: bool = True) -> float:
    """arch(1 + S/2), evaluated as 2 arsh(sqrt(S)/2)."""
    return float(2.0 * np.arcsinh(np.sqrt(arch_sup(G, x, y, refine)) / 2.0))


def rho_G_closed_form(x, y):
    """rho_G on R^n minus the origin: 2 arsh(|x - y| / (2 sqrt(|x||y|)))."""
    x, y = as_points(x).astype(float), as_points(y).astype(float)
    with np.errstate(all="ignore"):
        out = 2.0 * np.arcsinh(_div(norm(x - y), 2.0 * np.sqrt(norm(x) * norm(y))))
    return out[()] if np.ndim(out) == 0 else out


def rho_G_p(p: float, G: DomainSpec, x, y, refine: bool = True) -> float:
    """Experimental: arch(1 + (rho'_{A_0,G})^p / p). No metric property is claimed."""
    if not p > 0:
        raise ValueError("p must be positive")
    S = arch_sup(G, x, y, refine)
    return float(np.arccosh(1.0 + S ** (p / 2.0) / p))


def chordal_lower_bound(G: DomainSpec, x, y) -> float:
    """cosh((q(dG) q(x, y))^2) - 1, with q(dG) the chordal diameter of the boundary."""
    return float(np.cosh((G.boundary_diameter() * float(chordal(x, y))) ** 2) - 1.0)


# ---------------------------------------------------------------------------
# test suites


def mobius_invariance_test(f: Callable, n_samples: int = 100, seed: int = 0, dim: int = 3,
                           rtol: float = 1e-9, forced_radii: Sequence[float] = (0.25, 0.5, 0.75)) -> CheckResult:
    """Is rho_M, M = f(|x|) f(|y|), invariant under Mobius self-maps of the ball?

    Random pairs and random self-maps are tried first; then for each r in
    ``forced_radii`` the pair |x| = |y| = r, |x - y| = r sqrt(1 - r^2) is
    mapped so that y goes to 0, which forces f(r) = sqrt(1 - r^2).
    The witness is the configuration with the largest relative residual.
    """
    if abs(float(_apply1(f, np.array(0.0))) - 1.0) > 1e-12:
        raise ValueError("f(0) must equal 1")
    M = lambda s, t: _apply1(f, s) * _apply1(f, t)  # noqa: E731
    rng = np.random.default_rng(seed)
    worst = (0.0, None)
    x = random_ball_points(rng, n_samples, dim)
    y = random_ball_points(rng, n_samples, dim)
    for i in range(n_samples):
        g = random_ball_self_map(rng, dim)
        before = float(rho_M(M, x[i], y[i]))
        after = float(rho_M(M, g(x[i]), g(y[i])))
        res = abs(after - before) / max(abs(before), 1e-300)
        if res > worst[0]:
            worst = (res, {"x": x[i].tolist(), "y": y[i].tolist(), "before": before, "after": after,
                           "residual": res, "kind": "sampled"})
    for r in forced_radii:
        d = r * np.sqrt(1 - r * r)
        phi = 2 * np.arcsin(d / (2 * r))
        xr = r * np.eye(dim)[0]
        yr = r * (np.cos(phi) * np.eye(dim)[0] + np.sin(phi) * np.eye(dim)[1])
        g = ball_self_map(yr)
        before = float(rho_M(M, xr, yr))
        after = float(rho_M(M, g(xr), g(yr)))
        res = abs(after - before) / max(abs(before), 1e-300)
        if res > worst[0]:
            worst = (res, {"x": xr.tolist(), "y": yr.tolist(), "before": before, "after": after,
                           "residual": res, "kind": "forced", "r": r,
                           "f(r)": float(_apply1(f, np.array(r))), "forced f(r)": d / r})
    if worst[0] > rtol:
        return CheckResult(False, worst[1])
    return CheckResult(True)


def forced_value(r: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Points x, y with |x| = |y| = r and |x - y| = r sqrt(1 - r^2), and d / r."""
    d = r * np.sqrt(1 - r * r)
    phi = 2 * np.arcsin(d / (2 * r))
    x = np.array([r, 0.0, 0.0])
    y = r * np.array([np.cos(phi), np.sin(phi), 0.0])
    return x, y, d / r


def rho_G_properties_test(n_samples: int = 20, seed: int = 0, dim: int = 3,
                          boundary_samples: int = BOUNDARY_SAMPLES) -> dict:
    """Sampled checks of the basic properties of rho_G.

    (i) invariance under random Mobius maps applied to points and a finite
    boundary; (ii) monotonicity for nested finite boundaries; (iii) the lower
    bound cosh((q(dG) q(x,y))^2) - 1; (iv) agreement with the hyperbolic
    metric in the unit ball and the upper half-space.
    """
    rng = np.random.default_rng(seed)
    report = {}
    inv, mono, low = 0.0, 0.0, np.inf
    for _ in range(n_samples):
        k = int(rng.integers(3, 8))
        B = rng.normal(size=(k, dim)) * np.exp(rng.uniform(-1, 1, (k, 1)))
        if rng.random() < 0.5:
            B = np.vstack([B, infinity(dim)])
        G = DomainSpec("points", points=B)
        x, y = rng.normal(size=(2, dim))
        g = random_mobius(rng, dim, int(rng.integers(1, 6)))
        a, b = rho_G(G, x, y), rho_G(G.map(g), g(x), g(y))
        inv = max(inv, abs(a - b) / max(a, 1e-300))
        sub = DomainSpec("points", points=B[: max(2, k - 2)])
        mono = max(mono, rho_G(sub, x, y) - a)
        low = min(low, a - chordal_lower_bound(G, x, y))
    report["mobius_invariance"] = {"ok": inv <= 1e-9, "worst_relative": inv}
    report["monotone_in_domain"] = {"ok": mono <= 0.0, "worst_excess": mono}
    report["lower_bound"] = {"ok": low >= -1e-12, "min_margin": low}
    ball = DomainSpec.unit_ball(dim, boundary_samples)
    half = DomainSpec.upper_halfspace(dim, boundary_samples)
    dev_b = dev_h = 0.0
    for _ in range(n_samples):
        x, y = random_ball_points(rng, 2, dim, 0.9)
        dev_b = max(dev_b, abs(rho_G(ball, x, y) - float(hyperbolic_ball(x, y))))
        x, y = rng.normal(size=(2, dim))
        x[-1], y[-1] = np.exp(rng.uniform(-1, 1, 2))
        dev_h = max(dev_h, abs(rho_G(half, x, y) - float(hyperbolic_halfspace(x, y))))
    report["ball_agreement"] = {"ok": dev_b <= 1e-4, "max_deviation": dev_b}
    report["halfspace_agreement"] = {"ok": dev_h <= 1e-4, "max_deviation": dev_h}
    return report
