"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import time

import numpy as np
import pytest

from relmetric import balls, hyperbolic, quasiconvexity as qc, quasihyperbolic as qh, relative
from relmetric._util import log_uniform_points
from relmetric.fuzz import point_sampler, triangle_fuzz
from relmetric.weights import WeightFunction

RTOL = 1e-12

INSIDE = [(1, 0), (0.5, 0), (1, 1), (1 / 3, 1), (0.5, 0.5), (2, 0.5),
          (np.inf, 1), (0.9, 0.1), (0.7, 0.3), (0.8, 0.2), (0.42, 0.75), (5, 0.75)]
OUTSIDE = [(0.3, 0.5), (0.2, 0.1), (1, 1.2), (0.4, 0.7)]


def test_01_metricity_region(acceptance):
    t0 = time.perf_counter()
    worst_in, found_out = -np.inf, []
    for p, q in INSIDE:
        assert relative.pq_is_metric(p, q)
        rep = relative.metric_fuzz(WeightFunction.pq(p, q), 3, 100_000, seed=1)
        worst_in = max(worst_in, rep.worst_relative)
    for p, q in OUTSIDE:
        assert not relative.pq_is_metric(p, q)
        rep = relative.metric_on_line_fuzz(WeightFunction.pq(p, q), 100_000, seed=1)
        found_out.append(rep.violated(RTOL) and rep.witness is not None)
    elapsed = time.perf_counter() - t0
    ok = worst_in <= RTOL and all(found_out) and elapsed <= 120
    acceptance(1, ok, f"inside worst_relative={worst_in:.3e}, outside violations={sum(found_out)}/4, "
                      f"{elapsed:.1f}s")
    assert ok


def test_02_k_alpha_vs_geodesic_length(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for alpha in np.arange(1, 10) / 10:
        X = log_uniform_points(rng, 1000, 3, 1e-2, 1e2)
        Y = log_uniform_points(rng, 1000, 3, 1e-2, 1e2)
        paths = [qh.geodesic(alpha, x, y).sample(2049)[2] for x, y in zip(X, Y)]
        L = qh.path_lengths(alpha, paths)
        k = qh.k_alpha(alpha, X, Y)
        worst = max(worst, float(np.max(np.abs(L - k) / k)))
    worked = abs(qh.k_alpha(0.5, [2.0, 0.0], [0.0, 1.0]) - 2.0)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and worked <= 1e-12 and elapsed <= 60
    acceptance(2, ok, f"max relative gap={worst:.2e}, |k_1/2(2e1,e2)-2|={worked:.1e}, {elapsed:.1f}s")
    assert ok


def test_03_alpha_to_one_limit(acceptance):
    rng = np.random.default_rng(3)
    X = log_uniform_points(rng, 1000, 3, 0.2, 5.0)
    Y = log_uniform_points(rng, 1000, 3, 0.2, 5.0)
    gap = np.abs(qh.k_alpha(1 - 1e-4, X, Y) - qh.k_one(X, Y))
    ok = gap.max() <= 1e-3
    acceptance(3, ok, f"max |k_(1-1e-4) - k_1| = {gap.max():.2e}")
    assert ok


def test_04_inequality_chain(acceptance):
    rng = np.random.default_rng(4)
    n = 100_000
    alpha = rng.uniform(0.0, 0.99, n)
    X = log_uniform_points(rng, n, 3, 1e-2, 1e2)
    Y = log_uniform_points(rng, n, 3, 1e-2, 1e2)
    ok_all = np.ones(n, dtype=bool)
    # the chain takes a scalar alpha; group samples into alpha bins of one value each
    for a in np.unique(np.round(alpha, 2)):
        sel = np.round(alpha, 2) == a
        _, ok = qh.inequality_chain_check(float(a), X[sel], Y[sel], rtol=1e-10)
        ok_all[sel] = ok
    eq = []
    for a in (0.0, 0.3, 0.7):
        y = log_uniform_points(rng, 200, 3, 1e-2, 1e2)
        t = np.exp(rng.uniform(-3, 3, (200, 1)))
        e = qh.inequality_chain(a, t * y, y)
        eq.append(np.max(np.abs(e[:, 1] - e[:, 0]) / e[:, 0]))
        e = qh.inequality_chain(a, -t * y, y)
        eq.append(np.max(np.abs(e[:, 2] - e[:, 1]) / e[:, 1]))
    e = qh.inequality_chain(0.0, -y, y)
    eq.append(np.max(np.abs(e[:, 3] - e[:, 2]) / e[:, 2]))
    ok = bool(ok_all.all()) and max(eq) <= 1e-9
    acceptance(4, ok, f"chain ordered on {int(ok_all.sum())}/{n}, worst equality gap {max(eq):.1e}")
    assert ok


def test_05_corollary_q_half(acceptance):
    gaps = []
    for p in (0.5, 0.75, 1, 2, 10):
        est = qc.c_M_homogeneous(qc.normalized_pq_weight(p, 0.5), 0.5)
        gaps.append(abs(est.c_estimate - max(np.sqrt(2), 2 ** (1 - 1 / (2 * p)))))
    ok = max(gaps) <= 1e-6
    acceptance(5, ok, f"max |c - max(sqrt2, 2^(1-1/(2p)))| = {max(gaps):.1e}")
    assert ok


def test_06_quasiconvexity_bounds(acceptance):
    rng = np.random.default_rng(6)
    inside = []
    while len(inside) < 8:
        q = rng.uniform(0.05, 0.95)
        p = float(np.exp(rng.uniform(np.log(max(1 - q, (2 - q) / 3)), np.log(20))))
        inside.append((p, q))
    bracketed = []
    for p, q in inside:
        lo, hi = qc.c_pq_bounds(p, q)
        c = qc.c_M_homogeneous(qc.normalized_pq_weight(p, q), q).c_estimate
        bracketed.append(lo - 1e-6 <= c <= hi + 1e-6)
    diverged = [not qc.c_M_homogeneous(qc.normalized_pq_weight(p, 1.0), 1.0).converged
                for p in (1 / 3, 1, 2, np.inf)]
    ok = all(bracketed) and all(diverged)
    acceptance(6, ok, f"bracketed {sum(bracketed)}/8, q=1 divergence diagnosed {sum(diverged)}/4")
    assert ok


def test_07_ball_convexity_and_corners(acceptance):
    e1 = np.array([1.0, 0.0, 0.0])
    convex = []
    for p in (1, 2, 4):
        M = WeightFunction.pq(p, 0.5)
        tr = balls.trace_sphere(M, e1, balls.small_radius(M, e1))
        convex.append(balls.convexity_check(tr).convex)
    worst_angle, worst_slope = 0.0, 0.0
    for q in (0.25, 0.5, 1.0):
        for r in (0.2, 0.5, 1.0):
            theta0, jump = balls.infty_q_corner(q, r)
            corners = balls.find_corners(balls.trace_sphere(WeightFunction.pq(np.inf, q), e1, r))
            c = min(corners, key=lambda c: abs(c.theta - theta0))
            worst_angle = max(worst_angle, abs(c.theta - theta0))
            worst_slope = max(worst_slope, abs(c.jump - jump))
    ok = all(convex) and worst_angle <= 1e-3 and worst_slope <= 1e-4
    acceptance(7, ok, f"p<inf convex {sum(convex)}/3, corner angle err {worst_angle:.1e}, "
                      f"slope jump err {worst_slope:.1e}")
    assert ok


def test_08_product_weight_paths(acceptance):
    rng = np.random.default_rng(8)
    bound = np.sqrt(np.pi**2 / 4 + 4)
    worst = 0.0
    for _ in range(1000):
        f, _ = qc.random_convex_moderate(rng)
        dim = int(rng.choice([2, 3]))
        x, y = log_uniform_points(rng, 2, dim, 1e-2, 1e2)
        worst = max(worst, qc.ff_path_length_bound(f, x, y)[1])
    worst_cxy = 0.0
    for _ in range(200):
        c = float(np.exp(rng.uniform(-2, 2)))
        x, y = log_uniform_points(rng, 2, 3, 1e-2, 1e2)
        worst_cxy = max(worst_cxy, qc.ff_path_length_bound(lambda t, c=c: c * t, x, y)[1])
    ok = worst <= bound and worst_cxy <= 1 + 1e-6
    acceptance(8, ok, f"max ratio {worst:.4f} <= {bound:.5f}, M=cxy max ratio {worst_cxy:.10f}")
    assert ok


def test_09_mobius_invariance(acceptance):
    good = hyperbolic.mobius_invariance_test(lambda t: np.sqrt(1 - t * t), 100, seed=9)
    flat = hyperbolic.mobius_invariance_test(lambda t: np.ones_like(t), 100, seed=9)
    para = hyperbolic.mobius_invariance_test(lambda t: 1 - t * t, 100, seed=9)
    ok = good.ok and not flat.ok and flat.witness is not None and not para.ok and para.witness is not None
    acceptance(9, ok, f"sqrt(1-x^2) invariant={good.ok}, f=1 witness={flat.witness is not None}, "
                      f"1-x^2 witness={para.witness is not None}")
    assert ok


def test_10_rho_G_punctured_metric(acceptance):
    t0 = time.perf_counter()
    rep = triangle_fuzz(hyperbolic.rho_G_closed_form, point_sampler(3), 1_000_000, seed=10)
    rng = np.random.default_rng(10)
    worst_eq = 0.0
    for _ in range(200):
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        x, y = np.exp(rng.uniform(0, 3)) * u, np.exp(rng.uniform(-3, 0)) * u
        d = hyperbolic.rho_G_closed_form
        worst_eq = max(worst_eq, abs(d(x, y) - d(x, u) - d(u, y)))
    elapsed = time.perf_counter() - t0
    ok = not rep.violated(RTOL) and worst_eq <= 1e-10 and elapsed <= 180
    acceptance(10, ok, f"worst_relative={rep.worst_relative:.2e} over 1e6, co-linear gap {worst_eq:.1e}, "
                       f"{elapsed:.1f}s")
    assert ok


@pytest.mark.slow
def test_11_rho_G_equals_hyperbolic(acceptance):
    rng = np.random.default_rng(11)
    ball, half = hyperbolic.DomainSpec.unit_ball(3), hyperbolic.DomainSpec.upper_halfspace(3)
    dev_b = dev_h = 0.0
    for _ in range(100):
        x, y = hyperbolic.random_ball_points(rng, 2, 3, 0.95)
        dev_b = max(dev_b, abs(hyperbolic.rho_G(ball, x, y) - hyperbolic.hyperbolic_ball(x, y)))
        x, y = rng.normal(size=(2, 3))
        x[-1], y[-1] = np.exp(rng.uniform(-2, 2, 2))
        dev_h = max(dev_h, abs(hyperbolic.rho_G(half, x, y) - hyperbolic.hyperbolic_halfspace(x, y)))
    ok = dev_b <= 1e-4 and dev_h <= 1e-4
    acceptance(11, ok, f"ball max deviation {dev_b:.1e}, half-space max deviation {dev_h:.1e}")
    assert ok


def test_12_bilipschitz(acceptance):
    sq = relative.MetricDescriptor("pq", 3, p=np.inf, q=1.0)
    lo, hi = relative.bilipschitz_estimate(lambda x: np.linalg.norm(x, axis=-1, keepdims=True) * x,
                                           sq, 100_000, seed=12)
    ilo, ihi = relative.bilipschitz_estimate(lambda x: x / np.sum(x * x, axis=-1, keepdims=True),
                                             hyperbolic.chordal, 100_000, seed=12, dim=3)
    ok = 0.5 - 1e-9 <= lo <= hi <= 2 + 1e-9 and 1 - 1e-9 <= ilo <= ihi <= 1 + 1e-9
    acceptance(12, ok, f"|x|x under rho_inf,1 in [{lo:.6f}, {hi:.6f}], inversion under q in "
                       f"[{ilo:.12f}, {ihi:.12f}]")
    assert ok
