"""Power means, the S_p quasimean family and structural predicates on weights.

All evaluators broadcast over numpy arrays and return a Python float for
scalar input.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._util import CheckResult, call_weight, rounding_slack, scalar_or_array

# Relative gap below which S_p switches to its midpoint expansion.
DIAGONAL_RTOL = 1e-8


def default_grid() -> np.ndarray:
    return np.logspace(-6, 6, 512)


def power_mean(p: float, x, y):
    """Power mean A_p(x, y) for p in [-inf, inf].

    The special cases p = -inf, 0, inf are the minimum, geometric mean and
    maximum. For p < 0 a zero argument gives 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    p = float(p)
    with np.errstate(all="ignore"):
        if p == -np.inf:
            out = lo
        elif p == np.inf:
            out = hi
        elif p == 0.0:
            out = np.sqrt(x * y)
        elif p > 0:
            # factor out the max; the log form keeps large and tiny p accurate
            ratio = np.where(hi > 0, lo / np.where(hi > 0, hi, 1.0), 0.0)
            out = hi * np.exp(np.log1p(np.expm1(p * np.log(ratio)) / 2.0) / p)
        else:
            ratio = np.where(lo > 0, hi / np.where(lo > 0, lo, 1.0), 1.0)
            out = np.where(lo > 0, lo * np.exp(np.log1p(np.expm1(p * np.log(ratio)) / 2.0) / p), 0.0)
    return scalar_or_array(out)


def s_quasimean(p: float, x, y):
    """The quasimean S_p for 0 < p <= 1; S_1 is the logarithmic mean.

    Off the diagonal S_p(x, y) = (1-p)(x-y)/(x^(1-p) - y^(1-p)); on it
    S_p(x, x) = x^p. Close to the diagonal a midpoint expansion is used.
    """
    p = float(p)
    if not 0.0 < p <= 1.0:
        raise ValueError(f"S_p needs 0 < p <= 1, got {p}")
    return _s_mean(p, x, y)


def _s_mean(p: float, x, y):
    # Also valid for p == 0 (identically 1); callers outside this module use it
    # for the alpha = 0 end of the quasihyperbolic family.
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    m = 0.5 * (x + y)
    h = 0.5 * np.abs(x - y)
    near = h < DIAGONAL_RTOL * np.maximum(x, y)
    with np.errstate(all="ignore"):
        # mean of t^-p over [y, x] is m^-p (1 + p(p+1) h^2 / (6 m^2)) + O(h^4)
        series = m**p / (1.0 + p * (p + 1.0) * (h / m) ** 2 / 6.0)
        # log1p/expm1 keep x^u - y^u accurate when x and y are close
        lo = np.minimum(x, y)
        d = np.abs(x - y)
        ell = np.log1p(d / lo)
        if p == 1.0:
            general = d / ell
        else:
            u = 1.0 - p
            general = u * d / (lo**u * np.expm1(u * ell))
        general = np.where(lo == 0, (1.0 - p) * np.maximum(x, y) ** p, general)
        out = np.where(near, series, general)
    out = np.where(m == 0, 0.0, out)
    return scalar_or_array(out)


def log_mean(x, y):
    """Logarithmic mean L(x, y) = (x - y)/(log x - log y)."""
    return _s_mean(1.0, x, y)


class MeanFamily(Enum):
    POWER = "power"
    S_QUASIMEAN = "s_quasimean"
    LOG = "log"
    CUSTOM = "custom"


@dataclass(frozen=True)
class MeanSpec:
    """A named member of one of the built-in mean families."""

    family: MeanFamily
    parameter: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.family is MeanFamily.S_QUASIMEAN and not 0.0 < self.parameter <= 1.0:
            raise ValueError("S_p is defined for 0 < p <= 1")
        if self.family is MeanFamily.POWER and np.isnan(self.parameter):
            raise ValueError("power mean parameter must not be NaN")

    def __call__(self, x, y):
        if self.family is MeanFamily.POWER:
            return power_mean(self.parameter, x, y)
        if self.family is MeanFamily.S_QUASIMEAN:
            return s_quasimean(self.parameter, x, y)
        if self.family is MeanFamily.LOG:
            return log_mean(x, y)
        raise TypeError("custom means carry their own evaluator")


def _check_grid(grid) -> np.ndarray:
    g = np.unique(np.asarray(grid, dtype=float))
    if g.ndim != 1 or g.size < 2:
        raise ValueError("grid needs at least 2 distinct points")
    return g


def is_moderately_increasing(M, grid=None) -> CheckResult:
    """Grid test that M(., y) is nondecreasing and M(t, y)/t nonincreasing.

    Both argument slots are tested. On failure the witness holds the first
    offending grid pair (lowest index).
    """
    g = _check_grid(default_grid() if grid is None else grid)
    if g[0] <= 0:
        raise ValueError("grid abscissae must be strictly positive")
    T, Y = np.meshgrid(g, g, indexing="ij")  # T varies along axis 0
    for slot, vals in (("first", call_weight(M, T, Y)), ("second", call_weight(M, Y, T))):
        dv = np.diff(vals, axis=0)
        bad = dv < -rounding_slack(vals[1:], vals[:-1])
        ratio = vals / T
        dr = np.diff(ratio, axis=0)
        bad_r = dr > rounding_slack(ratio[1:], ratio[:-1])
        for mask, reason in ((bad, "decreasing"), (bad_r, "M/t increasing")):
            if mask.any():
                idx = np.argwhere(mask.T)[0]  # lowest (y, t) index
                j, i = int(idx[0]), int(idx[1])
                return CheckResult(False, {
                    "reason": reason, "slot": slot, "fixed": float(g[j]),
                    "t0": float(g[i]), "t1": float(g[i + 1]),
                    "values": (float(vals[i, j]), float(vals[i + 1, j])),
                })
    return CheckResult(True)


def quasimean_exponent_check(M, alpha: float, grid=None) -> CheckResult:
    """Grid test of min(x^a, y^a) <= M(x, y) <= max(x^a, y^a)."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    g = _check_grid(default_grid() if grid is None else grid)
    X, Y = np.meshgrid(g, g, indexing="ij")
    vals = call_weight(M, X, Y)
    lo = np.minimum(X, Y) ** alpha
    hi = np.maximum(X, Y) ** alpha
    slack = rounding_slack(hi)
    bad = (vals < lo - slack) | (vals > hi + slack) | np.isnan(vals)
    if bad.any():
        i, j = (int(k) for k in np.argwhere(bad)[0])
        return CheckResult(False, {"x": float(g[i]), "y": float(g[j]), "value": float(vals[i, j]),
                                   "min": float(lo[i, j]), "max": float(hi[i, j])})
    return CheckResult(True)


def trace(M, x):
    """Trace t_M(x) = M(x, 1) of a symmetric weight, for x >= 1."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 1):
        raise ValueError("the trace is defined for x >= 1")
    return scalar_or_array(call_weight(M, x, np.ones_like(x)))
