"""P1 finite-element operators on triangulated domains.

Stiffness, (lumped or consistent) mass, Robin boundary mass with its load
vector, nodal source projection, and Dirichlet constraint handling.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import MeshError


def _triangle_geometry(mesh):
    p0 = mesh.nodes[mesh.triangles[:, 0]]
    p1 = mesh.nodes[mesh.triangles[:, 1]]
    p2 = mesh.nodes[mesh.triangles[:, 2]]
    e1 = p1 - p0
    e2 = p2 - p0
    area = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    # gradients of the three barycentric basis functions
    b = np.stack([p1[:, 1] - p2[:, 1], p2[:, 1] - p0[:, 1], p0[:, 1] - p1[:, 1]], axis=1)
    c = np.stack([p2[:, 0] - p1[:, 0], p0[:, 0] - p2[:, 0], p1[:, 0] - p0[:, 0]], axis=1)
    inv2a = 1.0 / (2.0 * area)
    return area, b * inv2a[:, None], c * inv2a[:, None]


def assemble_stiffness(mesh):
    """Stiffness matrix K with K[i,j] = integral of grad(phi_i).grad(phi_j)."""
    area, gx, gy = _triangle_geometry(mesh)
    n = mesh.n_nodes
    local = (gx[:, :, None] * gx[:, None, :] + gy[:, :, None] * gy[:, None, :])
    local *= area[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    K = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    K.sum_duplicates()
    return K


def assemble_mass(mesh, lumped=True):
    """Mass matrix; lumped form is diagonal with row sums preserved."""
    area = mesh.triangle_areas()
    n = mesh.n_nodes
    if lumped:
        diag = np.zeros(n)
        np.add.at(diag, mesh.triangles.ravel(), np.repeat(area / 3.0, 3))
        return sp.diags(diag, format="csr")
    local = (area / 12.0)[:, None, None] * (np.ones((3, 3)) + np.eye(3))
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    M = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M.sum_duplicates()
    return M


def assemble_boundary_mass(mesh, lumped=True):
    """Robin boundary mass B and boundary load vector ell.

    B[i,j] = integral over the boundary of phi_i*phi_j, ell[i] = integral of
    phi_i; both vanish at interior nodes and 1'ell equals the boundary
    length.
    """
    if len(mesh.boundary_edges) == 0:
        raise MeshError("Robin assembly requires a nonempty boundary")
    e0 = mesh.boundary_edges[:, 0]
    e1 = mesh.boundary_edges[:, 1]
    length = np.linalg.norm(mesh.nodes[e0] - mesh.nodes[e1], axis=1)
    n = mesh.n_nodes
    ell = np.zeros(n)
    np.add.at(ell, e0, length / 2.0)
    np.add.at(ell, e1, length / 2.0)
    if lumped:
        return sp.diags(ell, format="csr"), ell
    rows = np.concatenate([e0, e0, e1, e1])
    cols = np.concatenate([e0, e1, e0, e1])
    vals = np.concatenate([length / 3, length / 6, length / 6, length / 3])
    B = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    B.sum_duplicates()
    return B, ell


@dataclass(frozen=True)
class SourceField:
    """Nodal values of a nonnegative source, with a support annotation."""

    values: np.ndarray
    support: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if np.any(vals < 0):
            raise ValueError("source fields must be nonnegative")


def annulus_source(level, r_inner):
    """Piecewise source: ``level`` for |x| >= r_inner, else 0.

    Points exactly on the interface take the outer value.
    """
    def fn(x, y):
        r = np.hypot(x, y)
        return np.where(r >= r_inner, float(level), 0.0)

    fn.support = f"annulus r>={r_inner} level={level}"
    return fn


def project_source(mesh, spec):
    """Nodal interpolation of a source definition.

    ``spec`` may be a scalar constant, a callable ``f(x, y)`` (vectorized),
    or an existing array of nodal values.
    """
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    if callable(spec):
        vals = np.broadcast_to(np.asarray(spec(x, y), dtype=float), (mesh.n_nodes,))
        support = getattr(spec, "support", "")
    elif np.isscalar(spec):
        vals = np.full(mesh.n_nodes, float(spec))
        support = "constant"
    else:
        vals = np.asarray(spec, dtype=float)
        if vals.shape != (mesh.n_nodes,):
            raise ValueError("nodal source array has wrong length")
        support = "nodal"
    return SourceField(np.array(vals), support=support)


def apply_dirichlet(mesh, A, rhs, nodes, values):
    """Constrain ``A u = rhs`` to ``u[nodes] = values``, keeping symmetry.

    Columns of constrained dofs are folded into the right-hand side, the
    constrained rows are replaced by identity rows. Returns ``(A_c, rhs_c)``.
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    values = np.broadcast_to(np.asarray(values, dtype=float), nodes.shape)
    if not np.isin(nodes, mesh.boundary_nodes).all():
        raise ValueError("Dirichlet values given at non-boundary nodes")

    n = A.shape[0]
    g = np.zeros(n)
    g[nodes] = values
    rhs_c = np.asarray(rhs, dtype=float) - A @ g
    rhs_c[nodes] = values

    mask = np.ones(n, dtype=bool)
    mask[nodes] = False
    keep = sp.diags(mask.astype(float), format="csr")
    A_c = keep @ A @ keep + sp.diags((~mask).astype(float), format="csr")
    return A_c.tocsr(), rhs_c


def export_operator(A, path):
    """Write a sparse operator in `row col value` coordinate text format."""
    coo = sp.coo_matrix(A)
    with open(path, "w") as fh:
        fh.write(f"# dimension {coo.shape[0]} nnz {coo.nnz}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {float(v)!r}\n")
