"""Cubic-spline free-surface representation.

The free surface is a graph y = S(x) interpolated by a C2 piecewise cubic
with the not-a-knot closure, providing smooth normals and curvature across
element boundaries for the kinematic condition and the surface-tension
boundary integral.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["SurfaceSpline", "fit_spline", "normal_at", "curvature_at", "spline_csv"]


@dataclass(frozen=True)
class SurfaceSpline:
    """Piecewise cubic S_i(x) = a_i t^3 + b_i t^2 + c_i t + d_i, t = x - x_i."""

    knots: np.ndarray       # strictly increasing abscissae, length N
    values: np.ndarray      # y_i at the knots
    coeffs: np.ndarray      # (N-1, 4) rows (a_i, b_i, c_i, d_i)

    def _locate(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.knots[0], self.knots[-1]
        tol = 1e-9 * max(1.0, hi - lo)
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            raise ValueError("evaluation point outside spline range")
        idx = np.clip(np.searchsorted(self.knots, x, side="right") - 1, 0,
                      len(self.knots) - 2)
        return x, idx

    def eval(self, x):
        x, i = self._locate(x)
        t = x - self.knots[i]
        a, b, c, d = (self.coeffs[i, k] for k in range(4))
        return ((a * t + b) * t + c) * t + d

    def deriv(self, x):
        x, i = self._locate(x)
        t = x - self.knots[i]
        a, b, c, _ = (self.coeffs[i, k] for k in range(4))
        return (3.0 * a * t + 2.0 * b) * t + c

    def deriv2(self, x):
        x, i = self._locate(x)
        t = x - self.knots[i]
        return 6.0 * self.coeffs[i, 0] * t + 2.0 * self.coeffs[i, 1]

    __call__ = eval


def fit_spline(points):
    """Fit the not-a-knot cubic spline through (x_i, y_i) pairs.

    Solves the second-derivative system: continuity and smoothness at the
    interior knots plus third-derivative continuity across the 2nd and
    (N-1)th knots.  Requires N >= 4 strictly increasing abscissae.
    """
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    n = len(x)
    if n < 4:
        raise ValueError("not-a-knot spline needs at least 4 points")
    h = np.diff(x)
    if np.any(h <= 0.0):
        raise ValueError("spline abscissae must be strictly increasing")

    # unknowns: sigma_i = S''(x_i); rows 1..n-2 standard, corners not-a-knot
    A = np.zeros((n, n))
    rhs = np.zeros(n)
    for i in range(1, n - 1):
        A[i, i - 1] = h[i - 1]
        A[i, i] = 2.0 * (h[i - 1] + h[i])
        A[i, i + 1] = h[i]
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1])
    A[0, 0], A[0, 1], A[0, 2] = h[1], -(h[0] + h[1]), h[0]
    A[-1, -3], A[-1, -2], A[-1, -1] = h[-1], -(h[-2] + h[-1]), h[-2]
    sigma = np.linalg.solve(A, rhs)

    a = (sigma[1:] - sigma[:-1]) / (6.0 * h)
    b = 0.5 * sigma[:-1]
    c = np.diff(y) / h - h * (2.0 * sigma[:-1] + sigma[1:]) / 6.0
    d = y[:-1].copy()
    coeffs = np.column_stack([a, b, c, d])
    knots = x.copy()
    vals = y.copy()
    for arr in (knots, vals, coeffs):
        arr.setflags(write=False)
    return SurfaceSpline(knots=knots, values=vals, coeffs=coeffs)


def normal_at(spline, x):
    """Unit outward normal (-S', 1)/sqrt(S'^2 + 1); supports array x."""
    sp = spline.deriv(x)
    norm = np.sqrt(sp * sp + 1.0)
    return np.stack([-sp / norm, 1.0 / norm], axis=-1)


def curvature_at(spline, x):
    """Nonnegative curvature |S''| / (1 + S'^2)^{3/2}."""
    sp = spline.deriv(x)
    spp = spline.deriv2(x)
    return np.abs(spp) / (1.0 + sp * sp) ** 1.5


def spline_csv(spline):
    """CSV text of (x, S(x), S', kappa) sampled at the knots."""
    lines = ["x,S,dS,kappa"]
    xs = spline.knots
    vals = spline.eval(xs)
    ds = spline.deriv(xs)
    kap = curvature_at(spline, xs)
    for row in zip(xs, vals, ds, kap):
        lines.append(",".join(f"{v:.12g}" for v in row))
    return "\n".join(lines) + "\n"
