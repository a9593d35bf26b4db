"""One-dimensional modal expansion basis on the standard interval [-1, 1].

Provides Jacobi polynomial evaluation, Gauss-Lobatto-Legendre quadrature,
the hierarchical modal basis (linear vertex modes plus Jacobi-weighted
interior bubbles) and tensor-product evaluation on the standard
quadrilateral.  All tables are precomputed once per (order, quadrature)
pair and cached; instances are immutable and safe to share.
"""

from functools import lru_cache

import numpy as np

__all__ = [
    "jacobi_poly",
    "jacobi_poly_deriv",
    "eval_modal_basis",
    "eval_modal_basis_deriv",
    "make_quadrature",
    "gauss_lobatto",
    "legendre_table",
    "StdBasis",
    "std_basis",
    "tensor_eval",
]

_XI_TOL = 1e-12


def _check_xi(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(np.abs(xi) > 1.0 + _XI_TOL):
        raise ValueError("evaluation point outside [-1, 1]")
    return xi


def jacobi_poly(p, alpha, beta, xi):
    """Evaluate the Jacobi polynomial P_p^(alpha,beta) at xi in [-1, 1].

    Uses the standard three-term recurrence, which is numerically stable
    at high order.  xi may be a scalar or an array.
    """
    if p < 0 or alpha <= -1.0 or beta <= -1.0:
        raise ValueError("invalid Jacobi indices")
    xi = _check_xi(xi)
    ab = alpha + beta
    p0 = np.ones_like(xi)
    if p == 0:
        return p0 if p0.ndim else float(p0)
    p1 = 0.5 * ((ab + 2.0) * xi + (alpha - beta))
    for n in range(2, p + 1):
        c = 2.0 * n + ab
        a1 = 2.0 * n * (n + ab) * (c - 2.0)
        a2 = (c - 1.0) * (alpha * alpha - beta * beta)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * c
        p0, p1 = p1, ((a2 + a3 * xi) * p1 - a4 * p0) / a1
    return p1 if np.ndim(p1) else float(p1)


def jacobi_poly_deriv(p, alpha, beta, xi):
    """First derivative of P_p^(alpha,beta) at xi."""
    if p == 0:
        xi = _check_xi(xi)
        z = np.zeros_like(xi)
        return z if z.ndim else 0.0
    fac = 0.5 * (p + alpha + beta + 1.0)
    return fac * jacobi_poly(p - 1, alpha + 1.0, beta + 1.0, xi)


def eval_modal_basis(p, order, xi):
    """Value of modal basis function phi_p of an order-`order` expansion.

    phi_0 = (1-xi)/2 and phi_order = (1+xi)/2 are the linear vertex modes;
    interior modes are (1-xi)/2 * (1+xi)/2 * P_{p-1}^(1,1)(xi) and vanish
    at both endpoints.
    """
    if not 0 <= p <= order:
        raise ValueError(f"mode index {p} out of range for order {order}")
    xi = _check_xi(xi)
    if p == 0:
        out = 0.5 * (1.0 - xi)
    elif p == order:
        out = 0.5 * (1.0 + xi)
    else:
        out = 0.25 * (1.0 - xi) * (1.0 + xi) * jacobi_poly(p - 1, 1.0, 1.0, xi)
    return out if np.ndim(out) else float(out)


def eval_modal_basis_deriv(p, order, xi):
    """Derivative d(phi_p)/dxi of the modal basis function."""
    if not 0 <= p <= order:
        raise ValueError(f"mode index {p} out of range for order {order}")
    xi = _check_xi(xi)
    if p == 0:
        out = -0.5 * np.ones_like(xi)
    elif p == order:
        out = 0.5 * np.ones_like(xi)
    else:
        jac = jacobi_poly(p - 1, 1.0, 1.0, xi)
        djac = jacobi_poly_deriv(p - 1, 1.0, 1.0, xi)
        out = -0.5 * xi * jac + 0.25 * (1.0 - xi) * (1.0 + xi) * djac
    return out if np.ndim(out) else float(out)


def _legendre_value(n, x):
    """P_n(x) by recurrence (Legendre = Jacobi(0,0))."""
    p0 = np.ones_like(x)
    if n == 0:
        return p0
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k
    return p1


def gauss_lobatto(n):
    """Gauss-Lobatto-Legendre points and weights with n points (n >= 2).

    Endpoints +-1 are included.  Interior points are the extrema of
    P_{n-1}; all are polished with Newton iterations on (1-x^2) P'_{n-1}.
    Integrates polynomials of degree <= 2n-3 exactly.
    """
    if n < 2:
        raise ValueError("Gauss-Lobatto rule needs at least 2 points")
    if n == 2:
        return np.array([-1.0, 1.0]), np.array([1.0, 1.0])
    # interior nodes: roots of P'_{n-1}
    m = n - 1
    coeffs = np.zeros(n)
    coeffs[m] = 1.0
    dcoeffs = np.polynomial.legendre.legder(coeffs)
    x_int = np.polynomial.legendre.legroots(dcoeffs)
    x_int = np.sort(np.real(x_int))
    # Newton polish on f = P'_m using f' from the Legendre ODE:
    # (1-x^2) P''_m = 2x P'_m - m(m+1) P_m
    for _ in range(3):
        pm = _legendre_value(m, x_int)
        dpm = np.polynomial.legendre.legval(x_int, dcoeffs)
        d2pm = (2.0 * x_int * dpm - m * (m + 1.0) * pm) / (1.0 - x_int**2)
        x_int = x_int - dpm / d2pm
    pts = np.concatenate(([-1.0], x_int, [1.0]))
    pm_all = _legendre_value(m, pts)
    wts = 2.0 / (m * (m + 1.0) * pm_all**2)
    return pts, wts


def make_quadrature(order):
    """Gauss-Lobatto-Legendre rule with `order` points on [-1, 1]."""
    if order < 2:
        raise ValueError("quadrature order must be >= 2")
    return gauss_lobatto(order)


def legendre_table(order, pts):
    """Values of Legendre polynomials P_0..P_order at pts, shape (order+1, len(pts))."""
    pts = np.asarray(pts, dtype=float)
    tab = np.empty((order + 1, pts.size))
    tab[0] = 1.0
    if order >= 1:
        tab[1] = pts
    for k in range(2, order + 1):
        tab[k] = ((2.0 * k - 1.0) * pts * tab[k - 1] - (k - 1.0) * tab[k - 2]) / k
    return tab


class StdBasis:
    """Immutable 1D modal basis of a given order with its quadrature rule.

    Attributes:
        order: polynomial order P (>= 2 for the flow discretisation).
        quad_points, quad_weights: GLL rule with n_quad points.
        basis_at_quad: phi_p(xi_q), shape (P+1, n_quad).
        deriv_at_quad: dphi_p/dxi(xi_q), same shape.
        interp_nodes: P+1 GLL nodes used for boundary-data interpolation.
        interp_inv: inverse of the modal Vandermonde at interp_nodes, so
            coefficients of the degree-P interpolant of nodal values g are
            interp_inv @ g.
    """

    def __init__(self, order, n_quad):
        if order < 1:
            raise ValueError("basis order must be >= 1")
        self.order = order
        self.n_quad = n_quad
        pts, wts = make_quadrature(n_quad)
        self.quad_points = pts
        self.quad_weights = wts
        self.basis_at_quad = np.array(
            [eval_modal_basis(p, order, pts) for p in range(order + 1)]
        )
        self.deriv_at_quad = np.array(
            [eval_modal_basis_deriv(p, order, pts) for p in range(order + 1)]
        )
        nodes, _ = gauss_lobatto(order + 1)
        self.interp_nodes = nodes
        vand = np.array(
            [eval_modal_basis(p, order, nodes) for p in range(order + 1)]
        ).T
        self.interp_inv = np.linalg.inv(vand)
        for arr in (
            self.quad_points,
            self.quad_weights,
            self.basis_at_quad,
            self.deriv_at_quad,
            self.interp_nodes,
            self.interp_inv,
        ):
            arr.setflags(write=False)

    def eval_at(self, xi):
        """phi_p(xi) for all modes, shape (P+1,) + shape(xi)."""
        return np.array(
            [eval_modal_basis(p, self.order, xi) for p in range(self.order + 1)]
        )

    def deriv_at(self, xi):
        """dphi_p/dxi(xi) for all modes."""
        return np.array(
            [eval_modal_basis_deriv(p, self.order, xi) for p in range(self.order + 1)]
        )

    def interp_coeffs(self, values):
        """Modal coefficients of the degree-P interpolant through nodal values."""
        return self.interp_inv @ np.asarray(values, dtype=float)


@lru_cache(maxsize=None)
def std_basis(order, n_quad):
    """Cached immutable StdBasis for a given (order, n_quad) pair."""
    return StdBasis(order, n_quad)


class TensorTables:
    """Flattened tensor-product tables on the standard quadrilateral.

    Mode i = p*(P+1)+q pairs with quad point k = a*Q+b, i.e. xi1 varies
    with the leading index.  V holds values, D1/D2 the reference-coordinate
    derivatives, W the tensor quadrature weights.  edge_trace[k] gives the
    (n_modes, Q) trace of every mode along local edge k in its parameter
    direction; edge_deriv[k] the tangential derivative along the edge.
    Local edges are numbered 0: xi2=-1, 1: xi1=+1, 2: xi2=+1, 3: xi1=-1
    with parameters running in the +xi1 / +xi2 direction.
    """

    def __init__(self, order, n_quad):
        b = std_basis(order, n_quad)
        self.order = order
        self.n_quad = n_quad
        self.basis1d = b
        B, D = b.basis_at_quad, b.deriv_at_quad
        self.V = np.kron(B, B)
        self.D1 = np.kron(D, B)
        self.D2 = np.kron(B, D)
        self.W = np.kron(b.quad_weights, b.quad_weights)
        n1 = order + 1
        at_m1 = np.array([eval_modal_basis(p, order, -1.0) for p in range(n1)])
        at_p1 = np.array([eval_modal_basis(p, order, 1.0) for p in range(n1)])
        # traces: edge 0 -> phi_p(s) phi_q(-1), etc.
        self.edge_trace = (
            np.kron(B, at_m1[:, None]),
            np.kron(at_p1[:, None], B),
            np.kron(B, at_p1[:, None]),
            np.kron(at_m1[:, None], B),
        )
        self.edge_deriv = (
            np.kron(D, at_m1[:, None]),
            np.kron(at_p1[:, None], D),
            np.kron(D, at_p1[:, None]),
            np.kron(at_m1[:, None], D),
        )
        # traces at the P+1 interpolation nodes (for boundary data transfer)
        Bn = np.array(
            [eval_modal_basis(p, order, b.interp_nodes) for p in range(n1)]
        )
        self.edge_trace_nodes = (
            np.kron(Bn, at_m1[:, None]),
            np.kron(at_p1[:, None], Bn),
            np.kron(Bn, at_p1[:, None]),
            np.kron(at_m1[:, None], Bn),
        )
        for arr in (self.V, self.D1, self.D2, self.W):
            arr.setflags(write=False)


@lru_cache(maxsize=None)
def tensor_tables(order, n_quad):
    """Cached TensorTables for the modal basis of a given order."""
    return TensorTables(order, n_quad)


@lru_cache(maxsize=None)
def legendre_tensor_tables(order, n_quad):
    """Flattened tensor Legendre tables (discontinuous pressure space).

    Returns (V, ) value table of shape ((order+1)^2, n_quad^2) with mode
    j = m*(order+1)+n and the same quad-point flattening as TensorTables.
    Mode 0 is the constant (element mean) mode.
    """
    pts, _ = make_quadrature(n_quad)
    L = legendre_table(order, pts)
    V = np.kron(L, L)
    V.setflags(write=False)
    return V


def tensor_eval(coeffs, xi1, xi2):
    """Evaluate sum_pq c_pq phi_p(xi1) phi_q(xi2) on the standard element.

    coeffs has shape (P+1, P+1) (or (P+1, P+1, k) for vector-valued data);
    xi1, xi2 are scalars or broadcastable arrays.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim < 2 or coeffs.shape[0] != coeffs.shape[1]:
        raise ValueError("coefficient table must be square in its leading axes")
    order = coeffs.shape[0] - 1
    f1 = np.array([eval_modal_basis(p, order, xi1) for p in range(order + 1)])
    f2 = np.array([eval_modal_basis(q, order, xi2) for q in range(order + 1)])
    if coeffs.ndim == 2:
        return np.einsum("pq,p...,q...->...", coeffs, f1, f2)
    return np.einsum("pqk,p...,q...->...k", coeffs, f1, f2)
