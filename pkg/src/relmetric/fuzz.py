"""Randomized triangle-inequality campaigns.

A campaign draws triples (x, y, z) from a sampler and records the violation
d(x, y) - d(x, z) - d(z, y). Each triple's violation is also scaled by the
largest of its three distances; the reported witness is the triple with the
worst scaled violation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._util import log_uniform_points

# Scaled violations at or below this are treated as floating-point noise.
DEFAULT_RTOL = 1e-12
BLOCK = 100_000


@dataclass
class FuzzReport:
    samples: int
    worst_violation: float
    worst_relative: float
    witness: Optional[tuple] = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def violated(self, rtol: float = DEFAULT_RTOL) -> bool:
        return self.worst_relative > rtol

    def to_dict(self) -> dict:
        w = None
        if self.witness is not None:
            w = [np.asarray(p, dtype=float).tolist() for p in self.witness]
        return {
            "samples": self.samples,
            "seed": self.seed,
            "worst_violation": self.worst_violation,
            "worst_relative": self.worst_relative,
            "witness": w,
            **self.extra,
        }


def violations(metric: Callable, x, y, z):
    """Raw and scaled violations for arrays of triples (rows are points)."""
    with np.errstate(all="ignore"):
        dxy = np.asarray(metric(x, y), dtype=float)
        dxz = np.asarray(metric(x, z), dtype=float)
        dzy = np.asarray(metric(z, y), dtype=float)
        raw = dxy - dxz - dzy
        # inf - inf: an infinite side cannot be exceeded
        raw = np.where(np.isnan(raw), -np.inf, raw)
        scale = np.maximum(np.maximum(dxy, dxz), dzy)
        rel = np.where(raw > 0, raw / np.where(scale > 0, scale, 1.0), np.minimum(raw, 0.0))
        rel = np.where(np.isinf(raw) & (raw > 0), np.inf, rel)
    return raw, rel


def triangle_fuzz(metric: Callable, sampler: Callable, n_samples: int, seed: int = 0,
                  block: int = BLOCK) -> FuzzReport:
    """Run a triangle-inequality campaign.

    ``sampler(rng, k)`` returns three arrays of k points each. ``metric`` must
    accept arrays of points row-wise. Each block draws from its own seed
    spawned from ``seed``, so a run is fixed by (seed, n_samples, block).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n_blocks = -(-n_samples // block)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    best_rel, best_raw, witness = -np.inf, -np.inf, None
    for b, child in enumerate(children):
        k = min(block, n_samples - b * block)
        rng = np.random.default_rng(child)
        x, y, z = sampler(rng, k)
        raw, rel = violations(metric, x, y, z)
        i = int(np.argmax(rel))
        if rel[i] > best_rel:
            best_rel, best_raw = float(rel[i]), float(raw[i])
            witness = (np.array(x[i]), np.array(y[i]), np.array(z[i]))
    if best_raw <= 0:
        witness = None
    return FuzzReport(n_samples, best_raw, best_rel, witness, seed)


def point_sampler(dim: int, lo: float = 1e-3, hi: float = 1e3) -> Callable:
    """Triples with log-uniform magnitudes and uniform directions in R^dim."""
    def sample(rng, k):
        return tuple(log_uniform_points(rng, k, dim, lo, hi) for _ in range(3))

    return sample
