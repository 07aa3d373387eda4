import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relmetric import hyperbolic as hb
from relmetric.hyperbolic import DomainSpec
from relmetric.means import power_mean

E1 = np.array([1.0, 0.0, 0.0])
INF = hb.infinity(3)


class TestChordal:
    def test_reference_values(self):
        assert hb.chordal(np.zeros(3), E1) == pytest.approx(1 / np.sqrt(2), rel=1e-15)
        assert hb.chordal(np.zeros(3), INF) == 1.0
        assert hb.chordal(INF, INF) == 0.0
        assert hb.chordal(E1, -E1) == pytest.approx(1.0)

    def test_matrix_matches_pairwise(self):
        rng = np.random.default_rng(0)
        A = np.vstack([rng.normal(size=(5, 3)), INF])
        B = np.vstack([INF, rng.normal(size=(4, 3))])
        Q = hb.chordal_matrix(A, B)
        ref = np.array([[hb.chordal(a, b) for b in B] for a in A])
        assert np.allclose(Q, ref, rtol=1e-14, atol=0)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=9, max_size=9))
    def test_triangle_and_bound(self, v):
        x, y, z = np.reshape(v, (3, 3))
        qxy = hb.chordal(x, y)
        assert 0 <= qxy <= 1 + 1e-15
        assert qxy <= hb.chordal(x, z) + hb.chordal(z, y) + 1e-14


class TestCrossRatio:
    def test_degenerate(self):
        a, b = E1, 2 * E1
        assert hb.cross_ratio(a, b, a, b * 3) == 0.0

    def test_mobius_invariance(self):
        rng = np.random.default_rng(1)
        worst = 0.0
        for _ in range(100):
            g = hb.random_mobius(rng, 3, int(rng.integers(1, 6)))
            P = rng.normal(size=(4, 100, 3))
            before = hb.cross_ratio(*P)
            after = hb.cross_ratio(*(g(p) for p in P))
            worst = max(worst, float(np.max(np.abs(after - before) / before)))
        assert worst <= 1e-10

    def test_punctured_product(self):
        rng = np.random.default_rng(2)
        x, y = rng.normal(size=(2, 50, 3))
        zero = np.zeros(3)
        prod = hb.cross_ratio(zero, x, INF, y) * hb.cross_ratio(zero, y, INF, x)
        ref = np.sum((x - y) ** 2, axis=1) / (np.linalg.norm(x, axis=1) * np.linalg.norm(y, axis=1))
        assert np.allclose(prod, ref, rtol=1e-13)


class TestReferenceMetrics:
    def test_ball_values(self):
        assert hb.hyperbolic_ball(np.zeros(3), E1 / 2) == pytest.approx(np.log(3.0), rel=1e-15)
        with pytest.raises(ValueError):
            hb.hyperbolic_ball(E1, np.zeros(3))

    def test_halfspace_values(self):
        # points on a vertical line: log of the height ratio
        assert hb.hyperbolic_halfspace([0, 0, 1.0], [0, 0, np.e]) == pytest.approx(1.0, rel=1e-15)
        with pytest.raises(ValueError):
            hb.hyperbolic_halfspace([0, 0, 0.0], [0, 0, 1.0])

    def test_ball_self_maps(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            g = hb.random_ball_self_map(rng, 3)
            x, y = hb.random_ball_points(rng, 2, 3, 0.9)
            gx, gy = g(x), g(y)
            assert np.linalg.norm(gx) < 1 and np.linalg.norm(gy) < 1
            assert hb.hyperbolic_ball(gx, gy) == pytest.approx(hb.hyperbolic_ball(x, y), rel=1e-9)

    def test_self_map_sends_a_to_zero(self):
        a = np.array([0.3, -0.2, 0.5])
        assert np.allclose(hb.ball_self_map(a)(a), 0.0, atol=1e-15)
        with pytest.raises(ValueError):
            hb.ball_self_map(E1)

    def test_maps_handle_infinity(self):
        assert np.array_equal(hb.Inversion(E1, 2.0)(INF), E1)
        assert np.all(np.isinf(hb.Inversion(E1, 2.0)(E1)))
        assert np.all(np.isinf(hb.Dilation(3.0)(INF)))


class TestDomains:
    def test_validation(self):
        with pytest.raises(ValueError):
            DomainSpec("points", points=[[0.0, 0.0]])
        with pytest.raises(ValueError):
            DomainSpec("sphere", radius=0.0)
        with pytest.raises(ValueError):
            DomainSpec("cube")

    def test_from_dict(self):
        G = DomainSpec.from_dict({"kind": "points", "points": [[0, 0], "inf"]})
        assert G.dim == 2 and np.all(np.isinf(G.points[1]))
        G = DomainSpec.from_dict({"kind": "punctured", "dim": 2})
        assert G.contains_boundary_point([0.0, 0.0]) and G.contains_boundary_point([np.inf, np.inf])
        G = DomainSpec.from_dict({"kind": "sphere", "center": [0, 0, 0], "radius": 2.0})
        assert G.contains_boundary_point([0.0, 2.0, 0.0])

    def test_diameters(self):
        assert DomainSpec.punctured().boundary_diameter() == 1.0
        assert DomainSpec.unit_ball(3, 256).boundary_diameter() == pytest.approx(1.0, abs=1e-3)
        assert DomainSpec.upper_halfspace().boundary_diameter() == 1.0

    def test_halfspace_samples_lie_on_plane(self):
        G = DomainSpec.upper_halfspace(3, 256)
        pts = G.boundary_samples([0, 0, 1.0], [1.0, 0, 2.0])
        fin = ~hb.is_infinite(pts)
        assert (~fin).sum() >= 1 and np.allclose(pts[fin, -1], 0.0, atol=1e-12)

    def test_map_only_finite(self):
        with pytest.raises(ValueError):
            DomainSpec.unit_ball().map(lambda p: p)


class TestRhoG:
    def test_punctured_reference(self):
        G = DomainSpec.punctured(3)
        assert hb.rho_G(G, 2 * E1, E1) == pytest.approx(np.log(2.0), rel=1e-14)
        assert hb.rho_G(G, E1, E1) == 0.0

    def test_punctured_matches_closed_form(self):
        rng = np.random.default_rng(4)
        G = DomainSpec.punctured(3)
        x, y = rng.normal(size=(2, 30, 3))
        got = np.array([hb.rho_G(G, a, b) for a, b in zip(x, y)])
        assert np.allclose(got, hb.rho_G_closed_form(x, y), rtol=1e-14)

    def test_rho_prime_geometric_mean(self):
        rng = np.random.default_rng(5)
        G = DomainSpec.punctured(3)
        for x, y in rng.normal(size=(10, 2, 3)):
            ref = np.linalg.norm(x - y) / np.sqrt(np.linalg.norm(x) * np.linalg.norm(y))
            got = hb.rho_prime(lambda u, v: power_mean(0, u, v), G, x, y)
            assert got == pytest.approx(ref, rel=1e-13)

    def test_p_two_variant_is_rho_G(self):
        G = DomainSpec.punctured(3)
        x, y = np.array([1.0, 2.0, 0.5]), np.array([-0.3, 0.4, 2.0])
        assert hb.rho_G_p(2.0, G, x, y) == pytest.approx(hb.rho_G(G, x, y), rel=1e-12)
        with pytest.raises(ValueError):
            hb.rho_G_p(0.0, G, x, y)

    def test_seittenranta_weight_factor(self):
        assert hb.seittenranta_weight(-1.0)(1.0, 1.0) == pytest.approx(2.0)
        assert hb.seittenranta_weight(1.0)(1.0, 3.0) == pytest.approx(2.0)
        assert hb.seittenranta_weight(0.0)(1.0, 4.0) == pytest.approx(2.0)
        assert hb.seittenranta(1.0, DomainSpec.punctured(3), E1, E1) == 0.0

    def test_ball_agreement_small_sample(self):
        rng = np.random.default_rng(6)
        G = DomainSpec.unit_ball(3, 512)
        for x, y in hb.random_ball_points(rng, 6, 3, 0.8).reshape(3, 2, 3):
            assert hb.rho_G(G, x, y) == pytest.approx(hb.hyperbolic_ball(x, y), abs=1e-6)

    def test_properties(self):
        rep = hb.rho_G_properties_test(n_samples=4, seed=7, boundary_samples=256)
        assert set(rep) == {"mobius_invariance", "monotone_in_domain", "lower_bound",
                            "ball_agreement", "halfspace_agreement"}
        assert all(v["ok"] for v in rep.values()), rep


class TestMobiusWeight:
    def test_invariant_weight(self):
        assert hb.mobius_invariance_test(lambda t: np.sqrt(1 - t * t), 20, seed=1).ok

    def test_needs_unit_value_at_zero(self):
        with pytest.raises(ValueError):
            hb.mobius_invariance_test(lambda t: 2.0 + 0 * t)

    def test_forced_configuration(self):
        for r in (0.25, 0.5, 0.75):
            x, y, v = hb.forced_value(r)
            assert np.linalg.norm(x) == pytest.approx(r) and np.linalg.norm(y) == pytest.approx(r)
            assert np.linalg.norm(x - y) == pytest.approx(r * np.sqrt(1 - r * r), rel=1e-14)
            assert v == pytest.approx(np.sqrt(1 - r * r), rel=1e-14)
