import numpy as np
import pytest

from relmetric import quasiconvexity as qc
from relmetric import quasihyperbolic as qh
from relmetric.relative import ff_finite_metric_check, rho_M
from relmetric.weights import WeightFunction


class TestGoldenSection:
    def test_parabola(self):
        x, v = qc.golden_section_max(lambda t: -(t - 0.3) ** 2 + 2.0, -1.0, 2.0, xtol=1e-12)
        assert x == pytest.approx(0.3, abs=1e-6) and v == pytest.approx(2.0, abs=1e-12)

    def test_monotone_goes_to_endpoint(self):
        x, _ = qc.golden_section_max(lambda t: t, 0.0, 1.0, xtol=1e-12)
        assert x == pytest.approx(1.0, abs=1e-10)


class TestObjective:
    def test_matches_k_alpha(self):
        rng = np.random.default_rng(0)
        for x, y in np.exp(rng.uniform(-3, 3, (20, 2))):
            k = qh.k_alpha(0.4, [x, 0.0], [-y, 0.0])
            ref = k / (x + y) * np.sqrt(x * y)
            assert qc.quasiconvexity_objective(lambda a, b: np.sqrt(a * b), 0.4, x, y) == pytest.approx(ref, rel=1e-12)

    def test_value_at_zero(self):
        # k_alpha(0, -y) = y^b / b
        v = qc.quasiconvexity_objective(lambda a, b: np.ones_like(a), 0.5, 0.0, 4.0)
        assert v == pytest.approx(2.0 * 2.0 / 4.0)


class TestBounds:
    def test_pq_bounds(self):
        lo, hi = qc.c_pq_bounds(1, 0.5)
        assert lo == pytest.approx(np.sqrt(2)) and hi == pytest.approx(2.0)
        lo, hi = qc.c_pq_bounds(np.inf, 0.5)
        assert lo == pytest.approx(2.0) and hi == pytest.approx(2 * np.sqrt(2))

    @pytest.mark.parametrize("p,q", [(1, 1.0), (1, 0.0), (0, 0.5)])
    def test_pq_bounds_invalid(self, p, q):
        with pytest.raises(ValueError):
            qc.c_pq_bounds(p, q)

    def test_normalized_weight(self):
        M = qc.normalized_pq_weight(2, 0.5)
        assert M(1.0, 1.0) == pytest.approx(1.0)
        assert M(3.0, 4.0) == pytest.approx(np.sqrt(np.sqrt(12.5)))


class TestSearch:
    def test_homogeneous_requires_normalization(self):
        with pytest.raises(ValueError):
            qc.c_M_homogeneous(WeightFunction.pq(1, 0.5), 0.5)

    def test_homogeneous_within_bounds(self):
        rng = np.random.default_rng(1)
        for _ in range(4):
            q = rng.uniform(0.2, 0.9)
            p = rng.uniform(1.0, 8.0)
            lo, hi = qc.c_pq_bounds(p, q)
            est = qc.c_M_homogeneous(qc.normalized_pq_weight(p, q), q)
            assert est.converged and lo - 1e-9 <= est.c_estimate <= hi + 1e-9
            assert est.lower_bound <= est.c_estimate <= est.upper_bound

    def test_diagonal_value_for_s_quasimean(self):
        # on x = y the objective equals sin(b pi / 2) / b
        est = qc.c_M_estimate(WeightFunction.s_quasimean(0.5), 0.5)
        assert est.converged and est.c_estimate >= np.sqrt(2) - 1e-12
        assert est.c_estimate <= est.upper_bound

    def test_general_agrees_with_homogeneous(self):
        M = qc.normalized_pq_weight(2, 0.5)
        a = qc.c_M_estimate(M, 0.5).c_estimate
        b = qc.c_M_homogeneous(M, 0.5).c_estimate
        assert a == pytest.approx(b, rel=1e-6)

    def test_alpha_one_diverges(self):
        est = qc.c_M_estimate(WeightFunction.power_mean(1.0), 1.0)
        assert not est.converged and est.c_estimate == np.inf

    def test_to_dict(self):
        d = qc.c_M_homogeneous(qc.normalized_pq_weight(1, 0.5), 0.5).to_dict()
        assert set(d) == {"c_estimate", "argmax_r", "lower_bound", "upper_bound", "converged"}


class TestPaths:
    def test_path_endpoints(self):
        x, y = np.array([2.0, 1.0]), np.array([-0.5, 0.3])
        for p in [qc.segment_path(x, y, 33), qc.inversion_path(x, y, 33), *qc.radial_circular_paths(x, y, 33)]:
            assert np.array_equal(p[0], x) and np.array_equal(p[-1], y)

    def test_radial_circular_stays_on_shells(self):
        x, y = np.array([3.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
        g1, g2 = qc.radial_circular_paths(x, y, 65)
        r1 = np.linalg.norm(g1, axis=1)
        assert np.allclose(r1[64:], 1.0) and np.all(np.diff(r1[:65]) <= 1e-15)
        assert np.allclose(np.linalg.norm(g2[:65], axis=1), 3.0)

    def test_inversion_path_through_origin(self):
        pts = qc.inversion_path([1.0, 0.0], [-1.0, 0.0], 33)
        assert np.all(np.isfinite(pts))

    def test_metric_path_length_bounds_distance(self):
        M = WeightFunction.pq(1, 1)
        x, y = np.array([1.0, 0.0]), np.array([0.0, 2.0])
        L = qc.metric_path_length(lambda a, b: rho_M(M, a, b), qc.segment_path(x, y, 257))
        assert L >= rho_M(M, x, y)

    def test_ff_bound_constant_f(self):
        # f = 1 is the Euclidean metric; the radial/circular path is longer than the segment
        L, ratio = qc.ff_path_length_bound(lambda t: np.ones_like(t), [2.0, 0.0], [0.0, 1.0])
        assert ratio > 1.0 and ratio <= np.sqrt(np.pi**2 / 4 + 4)

    def test_ff_bound_negative_f0(self):
        with pytest.raises(ValueError):
            qc.ff_path_length_bound(lambda t: t - 1.0, [1.0, 0.0], [0.0, 1.0])


class TestClassification:
    def test_constant_passes(self):
        assert qc.one_quasiconvex_classification_test(WeightFunction.constant(2.0), n_pairs=16).ok

    def test_product_passes(self):
        assert qc.one_quasiconvex_classification_test(lambda x, y: 3.0 * x * y, n_pairs=16).ok

    def test_sum_fails(self):
        ok, w = qc.one_quasiconvex_classification_test(WeightFunction.power_mean(1.0), n_pairs=16)
        assert not ok and w["excess"] > 1e-6


class TestGenerator:
    def test_draws_are_valid(self):
        rng = np.random.default_rng(2)
        families = set()
        for _ in range(40):
            f, desc = qc.random_convex_moderate(rng)
            families.add(desc["family"])
            assert float(f(np.array(0.0))) > 0
            assert ff_finite_metric_check(f).ok, desc
        assert families == {"hinge", "hyperbola"}
