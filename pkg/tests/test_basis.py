"""Tests for the 1D modal basis, quadrature and tensor evaluation."""

import numpy as np
import pytest
import scipy.special

from swellhp.basis import (
    StdBasis,
    eval_modal_basis,
    eval_modal_basis_deriv,
    jacobi_poly,
    make_quadrature,
    std_basis,
    tensor_eval,
)


class TestJacobiPoly:
    def test_degree_zero_is_one(self):
        assert jacobi_poly(0, 1.0, 1.0, 0.3) == 1.0

    def test_p1_alpha1_beta1(self):
        # P_1^(1,1)(xi) = 2 xi, checked against an independent recurrence
        assert jacobi_poly(1, 1.0, 1.0, 0.5) == pytest.approx(1.0, abs=1e-14)

    def test_legendre_at_one(self):
        assert jacobi_poly(2, 0.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)

    def test_against_scipy(self):
        rng = np.random.default_rng(7)
        xi = rng.uniform(-1.0, 1.0, 40)
        for p in range(0, 15):
            for a, b in [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (0.5, 1.5)]:
                ours = jacobi_poly(p, a, b, xi)
                ref = scipy.special.eval_jacobi(p, a, b, xi)
                assert np.allclose(ours, ref, rtol=1e-12, atol=1e-12)

    def test_rejects_xi_outside_interval(self):
        with pytest.raises(ValueError):
            jacobi_poly(3, 1.0, 1.0, 1.5)

    def test_rejects_bad_indices(self):
        with pytest.raises(ValueError):
            jacobi_poly(-1, 1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            jacobi_poly(2, -1.0, 0.0, 0.0)


class TestModalBasis:
    def test_vertex_mode_at_own_vertex(self):
        assert eval_modal_basis(0, 4, -1.0) == 1.0

    def test_quadratic_mode_at_center(self):
        # phi_1(0) = (1/2)(1/2) P_0^(1,1)(0) = 1/4
        assert eval_modal_basis(1, 4, 0.0) == pytest.approx(0.25, abs=1e-15)

    def test_interior_mode_value(self):
        # frozen from the independent product oracle:
        # 0.25*(1-0.7)*(1+0.7)*scipy.special.eval_jacobi(2,1,1,0.7)
        assert eval_modal_basis(3, 5, 0.7) == pytest.approx(0.13865625, abs=1e-12)

    def test_vertex_values(self):
        P = 6
        assert eval_modal_basis(0, P, -1.0) == 1.0
        assert eval_modal_basis(0, P, 1.0) == 0.0
        assert eval_modal_basis(P, P, -1.0) == 0.0
        assert eval_modal_basis(P, P, 1.0) == 1.0
        for p in range(1, P):
            assert abs(eval_modal_basis(p, P, -1.0)) < 1e-14
            assert abs(eval_modal_basis(p, P, 1.0)) < 1e-14

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            eval_modal_basis(7, 6, 0.0)
        with pytest.raises(ValueError):
            eval_modal_basis(-1, 6, 0.0)

    def test_partition_at_vertices(self):
        xi = np.linspace(-1.0, 1.0, 33)
        P = 8
        total = eval_modal_basis(0, P, xi) + eval_modal_basis(P, P, xi)
        assert np.allclose(total, 1.0, atol=1e-14)

    def test_derivative_matches_finite_differences(self):
        h = 1e-5
        xi = np.linspace(-0.9, 0.9, 19)
        P = 9
        for p in range(P + 1):
            fd = (
                eval_modal_basis(p, P, xi + h) - eval_modal_basis(p, P, xi - h)
            ) / (2 * h)
            d = eval_modal_basis_deriv(p, P, xi)
            assert np.allclose(d, fd, atol=1e-6)


class TestQuadrature:
    def test_two_point_lobatto(self):
        pts, wts = make_quadrature(2)
        assert np.allclose(pts, [-1.0, 1.0])
        assert np.allclose(wts, [1.0, 1.0])

    def test_three_point_lobatto(self):
        pts, wts = make_quadrature(3)
        assert np.allclose(pts, [-1.0, 0.0, 1.0], atol=1e-15)
        assert np.allclose(wts, [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0], atol=1e-15)
        # exact on xi^3, fails on xi^4 (2Q-3 = 3)
        assert (wts * pts**3).sum() == pytest.approx(0.0, abs=1e-14)
        assert abs((wts * pts**4).sum() - 2.0 / 5.0) > 1e-3

    def test_order4_integrates_xi_squared(self):
        pts, wts = make_quadrature(4)
        assert (wts * pts**2).sum() == pytest.approx(2.0 / 3.0, abs=1e-14)

    def test_rejects_order_below_two(self):
        with pytest.raises(ValueError):
            make_quadrature(1)

    @pytest.mark.parametrize("Q", [3, 5, 8, 12, 16])
    def test_weights_sum_to_two(self, Q):
        _, wts = make_quadrature(Q)
        assert wts.sum() == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize("Q", [4, 7, 12])
    def test_exactness_boundary(self, Q):
        # exact for k <= 2Q-3, first failure at k = 2Q-2 (the failure
        # magnitude shrinks with Q, so compare against round-off scale)
        pts, wts = make_quadrature(Q)
        for k in range(0, 2 * Q - 2):
            exact = 2.0 / (k + 1.0) if k % 2 == 0 else 0.0
            assert (wts * pts**k).sum() == pytest.approx(exact, abs=1e-13)
        k = 2 * Q - 2
        exact = 2.0 / (k + 1.0)
        assert abs((wts * pts**k).sum() - exact) > 1e-10


class TestStdBasis:
    def test_tables_match_pointwise_eval(self):
        b = std_basis(5, 7)
        for p in range(6):
            assert np.allclose(
                b.basis_at_quad[p], eval_modal_basis(p, 5, b.quad_points)
            )
            assert np.allclose(
                b.deriv_at_quad[p], eval_modal_basis_deriv(p, 5, b.quad_points)
            )

    def test_cache_returns_same_object(self):
        assert std_basis(6, 8) is std_basis(6, 8)

    def test_tables_immutable(self):
        b = std_basis(4, 6)
        with pytest.raises(ValueError):
            b.quad_weights[0] = 0.0

    def test_interior_mass_is_banded(self):
        # (phi_i, phi_j) = 0 for |i-j| > 2 with 0 < i, j < P
        P = 10
        b = std_basis(P, P + 2)
        mass = (b.basis_at_quad * b.quad_weights) @ b.basis_at_quad.T
        for i in range(1, P):
            for j in range(1, P):
                if abs(i - j) > 2:
                    assert abs(mass[i, j]) < 1e-12

    def test_interp_coeffs_reproduce_polynomials(self):
        b = std_basis(6, 8)
        xi = np.linspace(-1.0, 1.0, 21)
        g = 1.5 * (1.0 - b.interp_nodes**2)
        coeffs = b.interp_coeffs(g)
        vals = sum(coeffs[p] * eval_modal_basis(p, 6, xi) for p in range(7))
        assert np.allclose(vals, 1.5 * (1.0 - xi**2), atol=1e-13)


class TestTensorEval:
    def test_zero_coeffs(self):
        c = np.zeros((5, 5))
        assert tensor_eval(c, 0.3, -0.2) == 0.0

    def test_constant_one(self):
        P = 4
        c = np.zeros((P + 1, P + 1))
        for p in (0, P):
            for q in (0, P):
                c[p, q] = 1.0
        rng = np.random.default_rng(3)
        for _ in range(10):
            x1, x2 = rng.uniform(-1.0, 1.0, 2)
            assert tensor_eval(c, x1, x2) == pytest.approx(1.0, abs=1e-14)

    def test_bilinear_product(self):
        # xi1*xi2 = (phi_P - phi_0)(xi1) (phi_P - phi_0)(xi2)
        P = 3
        c = np.zeros((P + 1, P + 1))
        c[0, 0], c[0, P], c[P, 0], c[P, P] = 1.0, -1.0, -1.0, 1.0
        assert tensor_eval(c, 0.5, 0.7) == pytest.approx(0.35, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            tensor_eval(np.zeros((3, 4)), 0.0, 0.0)

    def test_random_field_against_direct_sum(self):
        rng = np.random.default_rng(11)
        P = 5
        c = rng.standard_normal((P + 1, P + 1))
        x1, x2 = 0.37, -0.61
        direct = sum(
            c[p, q]
            * eval_modal_basis(p, P, x1)
            * eval_modal_basis(q, P, x2)
            for p in range(P + 1)
            for q in range(P + 1)
        )
        assert tensor_eval(c, x1, x2) == pytest.approx(direct, abs=1e-13)
