"""Small shared helpers: point coercion, check results, rounding slack."""

from __future__ import annotations

from typing import Any, NamedTuple, Optional

import numpy as np

EPS = np.finfo(float).eps


class CheckResult(NamedTuple):
    """Outcome of a sampled predicate. Unpacks as ``ok, witness``."""

    ok: bool
    witness: Optional[dict[str, Any]] = None

    def __bool__(self) -> bool:  # pragma: no cover - trivial
        return bool(self.ok)


def as_points(x) -> np.ndarray:
    """Coerce to a float array whose last axis holds coordinates.

    Scalars become points of the real line.
    """
    a = np.asarray(x, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1)
    return a


def norm(x: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(x * x, axis=-1))


def scalar_or_array(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def rounding_slack(*vals: np.ndarray, factor: float = 64.0) -> np.ndarray:
    """Absolute slack covering accumulated rounding in a difference of ``vals``."""
    s = sum(np.abs(v) for v in vals)
    return factor * EPS * s


def log_uniform_points(rng: np.random.Generator, size: int, dim: int,
                       lo: float = 1e-3, hi: float = 1e3) -> np.ndarray:
    """Points with log-uniform magnitude in [lo, hi] and uniform direction."""
    d = rng.standard_normal((size, dim))
    d /= norm(d)[:, None]
    mag = np.exp(rng.uniform(np.log(lo), np.log(hi), size))
    return d * mag[:, None]


def random_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def call_weight(M, x, y) -> np.ndarray:
    """Evaluate a two-argument weight on broadcast arrays.

    Falls back to element-wise evaluation for callables that do not
    vectorize.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    try:
        with np.errstate(all="ignore"):
            out = np.asarray(M(x, y), dtype=float)
        if out.shape == x.shape:
            return out
        if out.ndim == 0:
            return np.full(x.shape, float(out))
    except (TypeError, ValueError):
        pass
    f = np.vectorize(lambda a, b: float(M(float(a), float(b))), otypes=[float])
    with np.errstate(all="ignore"):
        return f(x, y)
