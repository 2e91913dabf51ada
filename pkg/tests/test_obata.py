"""Restriction maps, distance lifting, residuals and distance-composition."""

import math

import numpy as np
import pytest

import cube_rigidity as cr
from cube_rigidity.spectral import m_norm
from conftest import distance_vector, random_connected_graph


class TestRestrictionMap:
    def test_cube_square_invertible(self):
        G = cr.hypercube(3, 1.0)
        sd = cr.spectrum(G)
        for x0 in G.vertex_ids:
            rm = cr.restriction_map(G, sd, x0, 3)
            assert rm.square and rm.invertible
            assert rm.matrix.shape == (4, 4)
            inv = np.linalg.inv(rm.matrix)
            assert np.abs(rm.matrix @ inv - np.eye(4)).max() < 1e-9

    def test_inverse_norm_transitive(self):
        G = cr.hypercube(3, 1.0)
        sd = cr.spectrum(G)
        norms = [cr.restriction_map(G, sd, x0, 3).inverse_norm for x0 in G.vertex_ids]
        assert max(norms) - min(norms) < 1e-9

    def test_level_zero_rectangular(self):
        G = cr.hypercube(1, 1.0)
        sd = cr.spectrum(G)
        rm = cr.restriction_map(G, sd, "0", 0)
        assert not rm.square
        assert rm.matrix.shape == (2, 1)
        assert rm.least_squares

    def test_spectral_mismatch(self):
        G = cr.hypercube(2, 1.0)
        other = cr.spectrum(cr.hypercube(3, 1.0))
        with pytest.raises(cr.SpectralMismatch):
            cr.restriction_map(G, other, "00", 2)
        tweaked = cr.perturb(G, 0.0, 0.2, 1)
        with pytest.raises(cr.SpectralMismatch):
            cr.restriction_map(tweaked, cr.spectrum(G), "00", 2)

    def test_level_out_of_range(self):
        G = cr.hypercube(2, 1.0)
        sd = cr.spectrum(G)
        with pytest.raises(cr.IndexOutOfRange):
            cr.restriction_map(G, sd, "00", 4)


class TestLiftDistance:
    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    @pytest.mark.parametrize("K", [1.0, 2.0, 5.0])
    def test_exact_on_cubes(self, d, K):
        G = cr.hypercube(d, K / 2.0)
        sd = cr.spectrum(G)
        for x0 in G.vertex_ids:
            lifted, (sup, l2) = cr.lift_distance(G, sd, x0)
            assert sup <= 1e-8 and l2 <= 1e-8
            assert np.abs(lifted - distance_vector(G, x0)).max() <= 1e-8

    def test_perturbed_small_positive(self):
        G = cr.perturb(cr.hypercube(3, 1.0), 0.01, 0.0, 2)
        sd = cr.spectrum(G)
        _, (sup, l2) = cr.lift_distance(G, sd, "000")
        assert 0.0 < sup < 0.2
        assert 0.0 < l2 < 0.2

    def test_agrees_on_one_ball(self):
        G = cr.perturb(cr.hypercube(3, 1.0), 0.02, 0.02, 4)
        sd = cr.spectrum(G)
        lifted, _ = cr.lift_distance(G, sd, "000")
        dist = distance_vector(G, "000")
        for v in cr.ball(G, "000", 1):
            assert lifted[G.index(v)] == pytest.approx(dist[G.index(v)], abs=1e-9)

    def test_refuses_wrong_degree(self):
        # path end vertex has degree 1 < deg_max = 2: map is rectangular
        G = cr.build_graph(
            [("a", 1.0), ("b", 1.0), ("c", 1.0)],
            [("a", "b", 1.0), ("b", "c", 1.0)],
        )
        sd = cr.spectrum(G)
        with pytest.raises(cr.SingularRestrictionMap):
            cr.lift_distance(G, sd, "a")


class TestObataResidual:
    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_zero_on_rigid_cubes(self, d):
        G = cr.hypercube(d, 1.0)
        sd = cr.spectrum(G)
        for x0 in G.vertex_ids:
            assert cr.obata_residual(G, sd, x0) <= 1e-8

    def test_positive_on_perturbed(self):
        G = cr.perturb(cr.hypercube(3, 1.0), 0.03, 0.0, 6)
        sd = cr.spectrum(G)
        res = cr.obata_residual(G, sd, "000")
        assert res > 0.0
        K, _ = cr.curvature(G)
        deficit = float(sd.eigenvalues[3] - K)
        assert math.isfinite(res / math.sqrt(deficit))

    def test_projection_is_optimal(self):
        rng = np.random.default_rng(80)
        G = cr.perturb(cr.hypercube(3, 1.0), 0.02, 0.0, 9)
        sd = cr.spectrum(G)
        d = 3
        centered = distance_vector(G, "000") - d / 2.0
        best = cr.obata_residual(G, sd, "000")
        basis = cr.eigenspace_basis(sd, 1, d)
        for _ in range(100):
            u = sum(c * b for c, b in zip(rng.normal(size=d), basis))
            assert best <= m_norm(G.measure, centered - u) + 1e-12


class TestGeneralizedObata:
    def test_k2_level_one(self):
        G = cr.hypercube(1, 1.0)
        sd = cr.spectrum(G)
        assert cr.generalized_obata(G, sd, "0", 1) <= 1e-8

    def test_cube_at_level_d(self):
        G = cr.hypercube(3, 1.0)
        sd = cr.spectrum(G)
        assert cr.generalized_obata(G, sd, "000", 3) <= 1e-8

    def test_degree_exceeds_level(self):
        # H_n(2) x H_l(1) is (n+l)-regular: at level l the hypothesis is vacuous
        n, l = 2, 1
        P = cr.cartesian_product(cr.hypercube(n, 2.0), cr.hypercube(l, 1.0))
        sd = cr.spectrum(P)
        for x0 in P.vertex_ids:
            with pytest.raises(cr.DegreeExceedsLevel):
                cr.generalized_obata(P, sd, x0, l)


class TestExtensionResidual:
    def test_distance_function_exact_zero_on_geodesics(self):
        rng = np.random.default_rng(81)
        checked = 0
        for _ in range(50):
            G = random_connected_graph(rng, int(rng.integers(4, 10)))
            x0 = G.vertex_ids[int(rng.integers(0, G.n))]
            dist = distance_vector(G, x0)
            dm = G.distance_matrix()
            for i in range(G.n):
                for j in range(G.n):
                    if dm[i, j] == 2 and dist[j] == dist[i] + 2:
                        r = cr.extension_residual(
                            G, dist, G.vertex_ids[i], G.vertex_ids[j]
                        )
                        assert r == 0.0
                        checked += 1
        assert checked > 100

    def test_eigen_span_small_on_cube(self):
        rng = np.random.default_rng(82)
        G = cr.hypercube(3, 1.0)
        sd = cr.spectrum(G)
        basis = cr.eigenspace_basis(sd, 0, 3)
        dm = G.distance_matrix()
        for _ in range(10):
            phi = sum(c * b for c, b in zip(rng.normal(size=4), basis))
            for i in range(G.n):
                for j in range(i + 1, G.n):
                    if dm[i, j] == 2:
                        assert (
                            cr.extension_residual(G, phi, G.vertex_ids[i], G.vertex_ids[j])
                            <= 1e-8
                        )

    def test_random_function_generally_positive(self):
        rng = np.random.default_rng(83)
        G = cr.hypercube(3, 1.0)
        phi = rng.normal(size=G.n)
        values = [
            cr.extension_residual(G, phi, "000", z)
            for z in cr.sphere(G, "000", 2)
        ]
        assert max(values) > 1e-3

    def test_not_distance_two(self):
        G = cr.hypercube(3, 1.0)
        with pytest.raises(cr.NotDistanceTwo):
            cr.extension_residual(G, np.zeros(8), "000", "001")
        with pytest.raises(cr.NotDistanceTwo):
            cr.extension_residual(G, np.zeros(8), "000", "111")


class TestGradientDeviation:
    def test_eigenspan_constant_gradient_on_cubes(self):
        rng = np.random.default_rng(84)
        for K in (1.0, 2.0):
            G = cr.hypercube(3, K / 2.0)
            sd = cr.spectrum(G)
            basis = cr.eigenspace_basis(sd, 1, 3)
            for _ in range(10):
                phi = sum(c * b for c, b in zip(rng.normal(size=3), basis))
                assert cr.gradient_deviation(G, phi) <= 1e-8

    def test_distance_function_on_cubes(self):
        # every vertex sees d edges all changing the distance by one
        for d in (2, 3, 4):
            G = cr.hypercube(d, 1.0)
            assert cr.gradient_deviation(G, distance_vector(G, G.vertex_ids[0])) == 0.0
            H = cr.hypercube(d, 0.7)
            assert cr.gradient_deviation(H, distance_vector(H, H.vertex_ids[0])) <= 1e-12

    def test_constant(self):
        G = cr.hypercube(2, 1.0)
        assert cr.gradient_deviation(G, np.full(4, 1.3)) == 0.0


class TestDegreeMeasureReport:
    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("K", [1.0, 2.0])
    def test_rigid_cube_all_zero(self, d, K):
        G = cr.hypercube(d, K / 2.0)
        for x0 in G.vertex_ids[:2]:
            rep = cr.degree_measure_report(G, K, x0)
            assert max(rep.as_tuple()) <= 1e-9

    def test_unit_measure_gives_exact_zero(self):
        G = cr.hypercube(3, 0.7)
        rep = cr.degree_measure_report(G, 1.4, "000")
        assert rep.measure == 0.0

    def test_perturbed_small_positive(self):
        G = cr.perturb(cr.hypercube(3, 1.0), 0.01, 0.01, 3)
        K, _ = cr.curvature(G)
        rep = cr.degree_measure_report(G, K, "000")
        assert 0.0 < rep.edge_degree < 0.1
        assert 0.0 < rep.measure < 0.05
        assert 0.0 < rep.degree < 0.2


class TestDistanceComposed:
    def test_distance_itself(self):
        G = cr.hypercube(3, 1.0)
        assert cr.is_distance_composed(G, distance_vector(G, "010"), "010")

    def test_constants(self):
        G = cr.hypercube(2, 1.0)
        assert cr.is_distance_composed(G, np.full(4, 2.0), "00")

    def test_profile_of_distance(self):
        G = cr.hypercube(3, 1.0)
        dist = distance_vector(G, "000")
        assert cr.is_distance_composed(G, np.cos(dist), "000")
        assert not cr.is_distance_composed(G, np.cos(dist), "001")

    @pytest.mark.parametrize("nl", [(1, 1), (2, 1)])
    def test_product_eigenfunctions_never_composed(self, nl):
        n, l = nl
        P = cr.cartesian_product(cr.hypercube(n, 2.0), cr.hypercube(l, 1.0))
        sd = cr.spectrum(P)
        idx = sd.eigenspace_indices(2.0)
        assert len(idx) == l
        for i in idx:
            phi = sd.eigenfunction(i)
            for p in P.vertex_ids:
                assert not cr.is_distance_composed(P, phi, p, 1e-8)

    @pytest.mark.parametrize("d", [2, 3])
    def test_cube_coordinate_eigenfunction_never_composed(self, d):
        # the factor eigenfunction of H_d = H_{d-l} x H_l depends on one bit
        G = cr.hypercube(d, 1.0)
        for bit in range(d):
            phi = np.array([1.0 if v[bit] == "0" else -1.0 for v in G.vertex_ids])
            assert np.abs(cr.laplacian_apply(G, phi) + 2.0 * phi).max() < 1e-12
            for p in G.vertex_ids:
                assert not cr.is_distance_composed(G, phi, p, 1e-8)


class TestObataReport:
    def test_rigid_cube_fields(self):
        G = cr.hypercube(3, 1.0)
        sd = cr.spectrum(G)
        rep = cr.obata_report(G, sd, "000", 2.0)
        assert rep.lifted_sup_error <= 1e-8
        assert rep.projection_residual <= 1e-8
        assert rep.mean_offset <= 1e-12
        assert rep.gradient_deviation <= 1e-8
        assert rep.extension_residual_max <= 1e-8
        assert max(rep.thm_degree_measure.as_tuple()) <= 1e-9

    def test_perturbed_cube_fields_positive(self):
        G = cr.perturb(cr.hypercube(3, 1.0), 0.02, 0.02, 12)
        sd = cr.spectrum(G)
        K, _ = cr.curvature(G)
        rep = cr.obata_report(G, sd, "000", K)
        assert rep.lifted_sup_error > 0.0
        assert rep.projection_residual > 0.0
        assert rep.mean_offset > 0.0
        assert rep.extension_residual_max > 0.0

    def test_json_dict(self):
        import json

        G = cr.hypercube(2, 1.0)
        rep = cr.obata_report(G, cr.spectrum(G), "00", 2.0)
        payload = json.loads(json.dumps(rep.to_json_dict()))
        assert payload["base_vertex"] == "00"
        assert "degree_measure_maxima" in payload
