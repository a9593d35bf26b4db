"""Quadrilateral spectral-element mesh of the die-swell geometry.

Handles iso-parametric element mappings, global continuous DOF numbering
for the velocity space (order P) alongside a discontinuous pressure space
(order P-2), boundary tagging, and the ALE coordinate bookkeeping relative
to the frozen reference configuration.
"""

from dataclasses import dataclass, field

import numpy as np

from .basis import std_basis, tensor_tables

__all__ = [
    "QuadElement",
    "Mesh",
    "ALEMapState",
    "MetricTables",
    "build_dieswell_mesh",
    "build_rect_mesh",
    "build_channel_mesh",
    "map_to_physical",
    "invert_map",
    "jacobian_tables",
    "locate_point",
    "mesh_to_text",
    "DIESWELL_PRESETS",
]

# local corner modes in (p, q) index space, counterclockwise from (-1,-1)
_CORNERS = ((-1, -1), (1, -1), (1, 1), (-1, 1))
# local edges as (corner_from, corner_to) in the edge parameter direction
_EDGE_VERTS = ((0, 1), (1, 2), (3, 2), (0, 3))


@dataclass
class QuadElement:
    """One quadrilateral element with modal geometry coefficients.

    geom_coeffs has shape (P+1, P+1, 2); straight-sided elements carry only
    the four vertex modes.  edge_tags are (bottom, right, top, left).
    """

    element_id: int
    geom_coeffs: np.ndarray
    edge_tags: tuple
    vertex_ids: tuple = (0, 0, 0, 0)
    edge_ids: tuple = (0, 0, 0, 0)
    edge_reversed: tuple = (False, False, False, False)

    @property
    def order(self):
        return self.geom_coeffs.shape[0] - 1


def _corner_mode_index(corner, order):
    p = 0 if _CORNERS[corner][0] < 0 else order
    q = 0 if _CORNERS[corner][1] < 0 else order
    return p * (order + 1) + q


def _edge_mode_indices(edge, order):
    """Flattened local indices of the P-1 modes varying along local edge."""
    n1 = order + 1
    if edge == 0:
        return np.array([p * n1 for p in range(1, order)])
    if edge == 1:
        return np.array([order * n1 + q for q in range(1, order)])
    if edge == 2:
        return np.array([p * n1 + order for p in range(1, order)])
    return np.array([q for q in range(1, order)])


def _interior_mode_indices(order):
    n1 = order + 1
    return np.array([p * n1 + q for p in range(1, order) for q in range(1, order)])


class Mesh:
    """Spectral-element mesh with global continuous velocity numbering.

    Scalar velocity DOFs are numbered vertices first, then edge modes, then
    element interiors, which lets static condensation slice interior blocks
    off the tail.  Pressure DOFs (order P-2, discontinuous) are numbered
    per element with no inter-element coupling.
    """

    def __init__(self, order, n_quad, vertex_coords, element_vertices, edge_tags):
        self.order = order
        self.n_quad = n_quad
        self.vertex_coords = np.array(vertex_coords, dtype=float)
        self.n_vertices = len(self.vertex_coords)
        elem_verts = [tuple(ev) for ev in element_vertices]

        # global edge table keyed by sorted vertex pair
        edge_of = {}
        for ev in elem_verts:
            for le in range(4):
                a, b = ev[_EDGE_VERTS[le][0]], ev[_EDGE_VERTS[le][1]]
                key = (min(a, b), max(a, b))
                if key not in edge_of:
                    edge_of[key] = len(edge_of)
        self.n_edges = len(edge_of)

        self.elements = []
        for eid, (ev, tags) in enumerate(zip(elem_verts, edge_tags)):
            geom = np.zeros((order + 1, order + 1, 2))
            for c in range(4):
                p = 0 if _CORNERS[c][0] < 0 else order
                q = 0 if _CORNERS[c][1] < 0 else order
                geom[p, q] = self.vertex_coords[ev[c]]
            eids, revs = [], []
            for le in range(4):
                a, b = ev[_EDGE_VERTS[le][0]], ev[_EDGE_VERTS[le][1]]
                eids.append(edge_of[(min(a, b), max(a, b))])
                revs.append(a > b)
            self.elements.append(
                QuadElement(
                    element_id=eid,
                    geom_coeffs=geom,
                    edge_tags=tuple(tags),
                    vertex_ids=ev,
                    edge_ids=tuple(eids),
                    edge_reversed=tuple(revs),
                )
            )

        self._build_maps()
        self.reference_coords = [e.geom_coeffs.copy() for e in self.elements]
        for rc in self.reference_coords:
            rc.setflags(write=False)
        self.geometry_version = 0

    def _build_maps(self):
        P = self.order
        n1 = P + 1
        n_m = n1 * n1
        nv, ne = self.n_vertices, self.n_edges
        self.n_boundary_scalar = nv + ne * (P - 1)
        self.n_scalar = self.n_boundary_scalar + len(self.elements) * (P - 1) ** 2
        self.n_pressure_per_elem = (P - 1) ** 2
        self.n_pressure = len(self.elements) * self.n_pressure_per_elem

        self.gather_idx = np.zeros((len(self.elements), n_m), dtype=np.int64)
        self.gather_sign = np.ones((len(self.elements), n_m))
        edge_sign = np.array([(-1.0) ** (p - 1) for p in range(1, P)])
        for k, el in enumerate(self.elements):
            idx = self.gather_idx[k]
            for c in range(4):
                idx[_corner_mode_index(c, P)] = el.vertex_ids[c]
            for le in range(4):
                modes = _edge_mode_indices(le, P)
                base = nv + el.edge_ids[le] * (P - 1)
                idx[modes] = base + np.arange(P - 1)
                if el.edge_reversed[le]:
                    self.gather_sign[k, modes] = edge_sign
            interior = _interior_mode_indices(P)
            base = self.n_boundary_scalar + k * (P - 1) ** 2
            idx[interior] = base + np.arange((P - 1) ** 2)
        self.interior_local = _interior_mode_indices(P)
        boundary_mask = np.ones(n_m, dtype=bool)
        boundary_mask[self.interior_local] = False
        self.boundary_local = np.nonzero(boundary_mask)[0]

    # --- geometry access -------------------------------------------------

    def set_geometry(self, elem_idx, new_coeffs):
        """Replace an element's geometry coefficients (ALE mesh motion)."""
        self.elements[elem_idx].geom_coeffs = np.asarray(new_coeffs, dtype=float)
        self.geometry_version += 1

    def set_vertex_coords(self, coords):
        self.vertex_coords = np.asarray(coords, dtype=float)

    def geometry_array(self):
        """Stacked geometry coefficients, shape (n_el, n_modes, 2)."""
        n_m = (self.order + 1) ** 2
        return np.array([e.geom_coeffs.reshape(n_m, 2) for e in self.elements])

    def boundary_edges(self, tag):
        """All (element_index, local_edge) pairs carrying a boundary tag."""
        out = []
        for k, el in enumerate(self.elements):
            for le in range(4):
                if el.edge_tags[le] == tag:
                    out.append((k, le))
        return out

    def pressure_slice(self, elem_idx):
        n = self.n_pressure_per_elem
        return slice(elem_idx * n, (elem_idx + 1) * n)


@dataclass
class ALEMapState:
    """Current ALE configuration and the pointwise velocity history.

    The mesh holds the current geometry coefficients; reference coordinates
    stay frozen on the mesh itself.  Histories store the recovered pointwise
    mesh velocities at the two previous time levels for the multistep
    coordinate update (surface knots and corner vertices are the only moved
    points).  n_hist counts the valid history levels during startup.
    """

    knot_x: np.ndarray = None
    knot_y: np.ndarray = None
    knot_w: list = field(default_factory=list)     # up to 2 arrays (n_knots, 2)
    vert_w: list = field(default_factory=list)     # up to 2 arrays (n_verts, 2)
    n_hist: int = 0
    spline: object = None
    knot_elem_edges: list = field(default_factory=list)
    knot_index_map: list = field(default_factory=list)
    pinned_knots: np.ndarray = None


@dataclass
class MetricTables:
    """Per-quad-point mapping metrics of one element."""

    det: np.ndarray        # Jacobian determinant, shape (n_q,)
    jinv: np.ndarray       # d(xi)/d(x), shape (n_q, 2, 2)
    wdet: np.ndarray       # tensor quadrature weight times det


def map_to_physical(elem, xi1, xi2):
    """Physical coordinates of reference point(s) (xi1, xi2)."""
    from .basis import tensor_eval

    return tensor_eval(elem.geom_coeffs, xi1, xi2)


def _geometry_derivs(elem, n_quad):
    tt = tensor_tables(elem.order, n_quad)
    g = elem.geom_coeffs.reshape(-1, 2)
    dx_d1 = tt.D1.T @ g      # (n_q, 2)
    dx_d2 = tt.D2.T @ g
    return dx_d1, dx_d2, tt


def jacobian_tables(elem, n_quad=None):
    """Metric data at the tensor quadrature points of one element.

    Raises on non-positive Jacobian determinant (tangled element).
    """
    if n_quad is None:
        n_quad = elem.order + 2
    dx_d1, dx_d2, tt = _geometry_derivs(elem, n_quad)
    det = dx_d1[:, 0] * dx_d2[:, 1] - dx_d1[:, 1] * dx_d2[:, 0]
    if np.any(det <= 0.0):
        raise ValueError(
            f"element {elem.element_id}: non-positive Jacobian (mesh tangling)"
        )
    jinv = np.empty((det.size, 2, 2))
    jinv[:, 0, 0] = dx_d2[:, 1] / det
    jinv[:, 0, 1] = -dx_d1[:, 1] / det
    jinv[:, 1, 0] = -dx_d2[:, 0] / det
    jinv[:, 1, 1] = dx_d1[:, 0] / det
    return MetricTables(det=det, jinv=jinv, wdet=tt.W * det)


def invert_map(elem, x, tol=1e-12, max_iter=50):
    """Reference coordinates of a physical point via Newton iteration.

    Converges to residual below tol (well under the 1e-10 contract);
    raises if the point lies outside the element.
    """
    x = np.asarray(x, dtype=float)
    xi = np.zeros(2)
    order = elem.order
    b = std_basis(order, order + 2)
    g = elem.geom_coeffs.reshape(order + 1, order + 1, 2)
    for _ in range(max_iter):
        f1, f2 = b.eval_at(xi[0]), b.eval_at(xi[1])
        d1, d2 = b.deriv_at(xi[0]), b.deriv_at(xi[1])
        pos = np.einsum("pqk,p,q->k", g, f1, f2)
        res = pos - x
        if np.abs(res).max() < tol:
            if np.abs(xi).max() > 1.0 + 1e-8:
                raise ValueError("point outside element")
            return float(xi[0]), float(xi[1])
        jac = np.empty((2, 2))
        jac[:, 0] = np.einsum("pqk,p,q->k", g, d1, f2)
        jac[:, 1] = np.einsum("pqk,p,q->k", g, f1, d2)
        xi = xi - np.linalg.solve(jac, res)
        xi = np.clip(xi, -1.5, 1.5)
    raise ValueError(
        f"invert_map failed to converge for point {x} in element {elem.element_id}"
    )


def locate_point(mesh, x, bbox_pad=1e-8):
    """Find (element_index, (xi1, xi2)) containing physical point x.

    Elements are tried in id order (deterministic); a bounding-box test
    prunes candidates before the Newton inversion.
    """
    x = np.asarray(x, dtype=float)
    for k, el in enumerate(mesh.elements):
        # corner positions bound straight-sided elements; curved top edges
        # only bulge outward by the surface deflection, covered by the pad
        verts = mesh.vertex_coords[list(el.vertex_ids)]
        pad = 0.3 * max(np.ptp(verts[:, 0]), np.ptp(verts[:, 1])) + bbox_pad
        lo, hi = verts.min(axis=0) - pad, verts.max(axis=0) + pad
        if np.any(x < lo) or np.any(x > hi):
            continue
        try:
            xi = invert_map(el, x)
        except ValueError:
            continue
        return k, xi
    raise ValueError(f"point {x} not found in any element")


# --- builders -------------------------------------------------------------


def build_rect_mesh(x_breaks, y_breaks, order, tag_fn, n_quad=None):
    """Structured conforming mesh on a tensor grid of break points.

    tag_fn(side, x0, x1, y0, y1) returns the boundary tag for an element
    edge on the domain boundary ('bottom'|'right'|'top'|'left'); interior
    edges are tagged 'interior'.
    """
    x_breaks = np.asarray(x_breaks, dtype=float)
    y_breaks = np.asarray(y_breaks, dtype=float)
    if n_quad is None:
        n_quad = order + 2
    nx, ny = len(x_breaks) - 1, len(y_breaks) - 1
    nvx = nx + 1

    def vid(i, j):
        return j * nvx + i

    verts = [(x_breaks[i], y_breaks[j]) for j in range(ny + 1) for i in range(nvx)]
    elems, tags = [], []
    for j in range(ny):
        for i in range(nx):
            elems.append((vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)))
            x0, x1 = x_breaks[i], x_breaks[i + 1]
            y0, y1 = y_breaks[j], y_breaks[j + 1]
            t = [
                tag_fn("bottom", x0, x1, y0, y1) if j == 0 else "interior",
                tag_fn("right", x0, x1, y0, y1) if i == nx - 1 else "interior",
                tag_fn("top", x0, x1, y0, y1) if j == ny - 1 else "interior",
                tag_fn("left", x0, x1, y0, y1) if i == 0 else "interior",
            ]
            tags.append(t)
    return Mesh(order, n_quad, verts, elems, tags)


DIESWELL_PRESETS = {
    # fractions of L1 (die columns), L2 (jet columns) and H (rows)
    "default": {
        "die": (-1.0, -0.35, -0.035, 0.0),
        "jet": (0.0, 0.035, 0.14, 0.4, 1.0),
        "rows": (0.0, 0.72, 1.0),
    },
    "uniform": {
        "die": (-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0),
        "jet": (0.0, 0.25, 0.5, 0.75, 1.0),
        "rows": (0.0, 0.5, 1.0),
    },
}


def build_dieswell_mesh(L1, L2, H, order, profile="default", n_quad=None):
    """14-element mesh of the die-swell domain [-L1, L2] x [0, H].

    Seven element columns (three along the die, four along the jet) in two
    rows, graded so the smallest elements touch the die lip (0, H).  Edge
    tags: inflow at x=-L1, wall at y=H for x<0, free surface at y=H for
    x>0, symmetry at y=0, outflow at x=L2.
    """
    if L1 <= 0 or L2 <= 0 or H <= 0:
        raise ValueError("domain dimensions must be positive")
    preset = DIESWELL_PRESETS[profile]
    xb = [f * L1 for f in preset["die"]] + [f * L2 for f in preset["jet"][1:]]
    yb = [f * H for f in preset["rows"]]

    def tag(side, x0, x1, y0, y1):
        if side == "left":
            return "inflow"
        if side == "right":
            return "outflow"
        if side == "bottom":
            return "symmetry"
        return "wall" if x1 <= 0.0 else "free_surface"

    return build_rect_mesh(xb, yb, order, tag, n_quad=n_quad)


def build_channel_mesh(L1, L2, H, order, profile="default", n_quad=None):
    """Same grid as the die-swell mesh but with a solid wall along y=H.

    Used for closed-channel validation runs (exact Poiseuille flow).
    """
    preset = DIESWELL_PRESETS[profile]
    xb = [f * L1 for f in preset["die"]] + [f * L2 for f in preset["jet"][1:]]
    yb = [f * H for f in preset["rows"]]

    def tag(side, x0, x1, y0, y1):
        if side == "left":
            return "inflow"
        if side == "right":
            return "outflow"
        return "symmetry" if side == "bottom" else "wall"

    return build_rect_mesh(xb, yb, order, tag, n_quad=n_quad)


def mesh_to_text(mesh):
    """Plain-text serialization: one element per line with id, vertex
    coordinates and edge tags."""
    lines = []
    for el in mesh.elements:
        coords = " ".join(
            f"{mesh.vertex_coords[v][0]:.12g} {mesh.vertex_coords[v][1]:.12g}"
            for v in el.vertex_ids
        )
        tags = " ".join(el.edge_tags)
        lines.append(f"{el.element_id} {coords} {tags}")
    return "\n".join(lines) + "\n"
