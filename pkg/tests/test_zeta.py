"""Zeta functions: determinant forms vs orbit products vs count extraction."""

import numpy as np
import pytest

from graphscatter.errors import DisconnectedGraphError, RegularityError
from graphscatter.graph import build_graph, cycle_rank, directed_bonds
from graphscatter.laplacian import build_laplacian, laplacian_spectrum
from graphscatter.orbits import enumerate_orbits
from graphscatter.zeta import (
    functional_equation_defect,
    ihara_zeta_det,
    ihara_zeta_product,
    nonbacktracking_counts_from_determinant,
    nonbacktracking_matrix,
    regular_lambda_from_z,
    regular_z_from_lambda,
    regular_zeta_z,
    secular_ratio_constant,
    spectral_zeta_det,
    spectral_zeta_product,
    stark_zeta,
)


class TestSpectralZetaDet:
    def test_vanishes_on_spectrum(self, k4):
        for lam in laplacian_spectrum(build_laplacian(k4)).eigenvalues:
            assert abs(spectral_zeta_det(k4, float(lam))) < 1e-12

    def test_p2_at_one(self, p2):
        # numerator 1*(1-2) = -1, denominator (1 + i*0)^2 = 1
        assert spectral_zeta_det(p2, 1.0) == pytest.approx(-1.0)

    def test_k4_at_two(self, k4):
        expected = -16.0 / (3.0 + 1.0j) ** 4
        assert spectral_zeta_det(k4, 2.0) == pytest.approx(expected)


class TestRatioConstant:
    def test_constant_and_valued(self, c3, k4, c3w):
        rng = np.random.default_rng(12)
        cases = [(c3, "standard"), (k4, "standard"), (c3w, "generalized")]
        for g, kind in cases:
            vals = np.array(
                [
                    secular_ratio_constant(
                        g, complex(rng.uniform(-4, 9), rng.uniform(-2, 2)), kind
                    )
                    for _ in range(30)
                ]
            )
            assert np.std(vals) / abs(np.mean(vals)) < 1e-8
            expected = 2.0 ** g.num_edges * 1j ** g.num_vertices
            assert np.mean(vals) == pytest.approx(expected)


class TestSpectralZetaProduct:
    def test_p2_single_orbit_exact(self, p2):
        cat = enumerate_orbits(directed_bonds(p2), 4)
        ev = spectral_zeta_product(cat, p2, complex(1.0, -0.5), truncation=4)
        assert ev.relative_error < 1e-9  # one orbit, finite product is exact

    def test_warning_above_axis(self, c3):
        cat = enumerate_orbits(directed_bonds(c3), 4)
        with pytest.warns(UserWarning):
            ev = spectral_zeta_product(cat, c3, complex(1.0, 0.5), truncation=4)
        assert ev.warning is not None

    def test_slow_oscillatory_convergence(self, c3_catalog_16, c3):
        """The error envelope decays like 1/N, not geometrically.

        U keeps a fixed eigenvalue at -i whatever lambda is, so the
        length-n primitive amplitude sums fall off only as 1/n; the
        truncated product at N = 16 still sits percents away from the
        determinant, at any depth below the axis.
        """
        lam = complex(2.0, -1.0)
        errors = {}
        for n in (8, 12, 16):
            ev = spectral_zeta_product(c3_catalog_16, c3, lam, truncation=n)
            errors[n] = ev.relative_error
        assert errors[16] < errors[8]  # the trend decreases
        assert 1e-3 < errors[16] < 0.2  # but only harmonically fast


class TestIhara:
    def test_at_zero(self, k4):
        assert ihara_zeta_det(k4, 0.0) == pytest.approx(1.0)

    def test_k4_series_starts_with_triangles(self, k4):
        u = 1e-3
        lead = (1.0 - ihara_zeta_det(k4, u)) / u**3
        assert lead == pytest.approx(8.0, abs=0.01)

    def test_tree_product_is_one(self, p2):
        cat = enumerate_orbits(directed_bonds(p2), 10, no_backtrack=True)
        ev = ihara_zeta_product(cat, 0.3, 10)
        assert ev.value == pytest.approx(1.0)
        assert ihara_zeta_det(p2, 0.3) == pytest.approx(1.0)

    def test_product_vs_det(self, k4, petersen, c6):
        for g in (k4, petersen, c6):
            cat = enumerate_orbits(directed_bonds(g), 12, no_backtrack=True)
            ev = ihara_zeta_product(cat, 0.1, 12)
            assert ev.relative_error < 1e-6

    def test_disconnected_rejected(self):
        with pytest.raises(DisconnectedGraphError):
            ihara_zeta_det(build_graph(4, [(0, 1), (2, 3)]), 0.1)


class TestCountsFromDeterminant:
    @pytest.mark.parametrize("maker", ["c3", "k4", "petersen", "k33"])
    def test_matches_enumeration(self, maker, request):
        g = request.getfixturevalue(maker)
        counts, defect = nonbacktracking_counts_from_determinant(g, 8)
        assert defect < 1e-6
        cat = enumerate_orbits(directed_bonds(g), 8, no_backtrack=True)
        for n in range(2, 9):
            assert counts[n] == cat.count(n), n

    def test_k4_triangle_count(self, k4):
        counts, _ = nonbacktracking_counts_from_determinant(k4, 3)
        assert counts[3] == 8


class TestStark:
    def test_zero_weights(self, c3):
        space = directed_bonds(c3)
        ev = stark_zeta(space, np.zeros((6, 6)), truncation=6)
        assert ev.value == pytest.approx(1.0)
        assert ev.det_value == pytest.approx(1.0)

    def test_constant_weights_give_ihara(self, k4):
        # with eta = u everywhere, det(I - Y) is exactly the reciprocal
        # Ihara zeta (both equal the non-backtracking determinant)
        space = directed_bonds(k4)
        u = 0.12
        ev = stark_zeta(space, np.full((12, 12), u, dtype=complex), truncation=16)
        assert ev.det_value == pytest.approx(ihara_zeta_det(k4, u))
        assert ev.relative_error < 1e-10

    def test_random_weights_c3(self, c3):
        rng = np.random.default_rng(21)
        space = directed_bonds(c3)
        eta = rng.uniform(0.0, 0.2, (6, 6)).astype(complex)
        ev = stark_zeta(space, eta, truncation=15)
        assert ev.relative_error < 1e-6

    def test_random_weights_k4_radius_guarded(self, k4):
        rng = np.random.default_rng(22)
        space = directed_bonds(k4)
        y_raw = nonbacktracking_matrix(space)
        eta = rng.uniform(0.0, 1.0, (12, 12)).astype(complex)
        from graphscatter.linalg import eig_general
        from graphscatter.zeta import stark_matrix

        rho = np.max(np.abs(eig_general(stark_matrix(space, eta)).eigenvalues))
        eta *= 0.3 / rho  # keep the spectral radius well below 1
        ev = stark_zeta(space, eta, truncation=14)
        assert ev.relative_error < 1e-6
        assert ev.warning is None


class TestRegularZForm:
    def test_c3_at_z_one(self, c3):
        assert regular_zeta_z(c3, 1.0) == pytest.approx(2.0)  # det of the triangle adjacency

    def test_zero_at_z_i(self, k4):
        # z = i maps to lambda = 0, which is in the spectrum
        assert abs(regular_zeta_z(k4, 1j)) < 1e-12
        assert regular_lambda_from_z(3, 1j) == pytest.approx(0.0)

    def test_map_round_trip(self):
        z = 0.3 + 0.8j
        lam = regular_lambda_from_z(3, z)
        assert regular_z_from_lambda(3, lam) == pytest.approx(z)

    def test_bridge_to_det_form(self, k4, petersen):
        # z-form) = det-form * v^V * n^{2V} with n = 2z/(z+1)
        rng = np.random.default_rng(13)
        for g in (k4, petersen):
            v, nv = g.regular_degree, g.num_vertices
            for _ in range(10):
                z = rng.uniform(0.5, 1.5) * np.exp(1j * rng.uniform(-np.pi, np.pi))
                lam = regular_lambda_from_z(v, z)
                nfac = 2.0 * z / (z + 1.0)
                lhs = regular_zeta_z(g, z)
                rhs = spectral_zeta_det(g, lam) * v**nv * nfac ** (2 * nv)
                assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))

    def test_non_regular_rejected(self, random8):
        with pytest.raises(RegularityError):
            regular_zeta_z(random8, 0.5)

    def test_pole_at_minus_one(self, k4):
        with pytest.raises(ValueError):
            regular_zeta_z(k4, -1.0)


class TestFunctionalEquation:
    def test_unit_circle(self, k4):
        rng = np.random.default_rng(14)
        for _ in range(10):
            z = np.exp(1j * rng.uniform(-np.pi, np.pi))
            assert functional_equation_defect(k4, z) < 1e-9

    def test_off_circle_pairs(self, k4, petersen, c3):
        rng = np.random.default_rng(15)
        for g in (k4, petersen, c3):
            for _ in range(10):
                z = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(-3.0, 3.0))
                assert functional_equation_defect(g, z) < 1e-8

    def test_branch_cut_flagged_for_odd_vertex_count(self, c3):
        with pytest.warns(UserWarning):
            functional_equation_defect(c3, complex(-0.8, 1e-12))
