"""Triangulated 2-D domains for P1 finite elements.

The disk generator builds concentric rings of nodes (ring ``j`` carries
``6*j`` nodes), which gives a deterministic, near-equilateral triangulation
whose boundary nodes lie exactly on the circle.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import MeshError, MeshResourceError

#: Hard default on generated mesh size; build_disk_mesh accepts an override.
DEFAULT_MAX_NODES = 1_500_000


@dataclass(frozen=True)
class Mesh:
    """Conforming triangulation with explicit boundary-edge structure.

    Attributes
    ----------
    nodes : (n, 2) float array
        Node coordinates (dimensionless length).
    triangles : (m, 3) int array
        Node indices, counterclockwise.
    boundary_edges : (k, 2) int array
        Ordered node-index pairs on the domain boundary.
    domain_tag : str
        Domain identifier, e.g. ``"unit_disk"``.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    domain_tag: str = "unit_disk"
    h_max: float = field(init=False, default=0.0)
    boundary_nodes: np.ndarray = field(init=False, default=None)

    def __post_init__(self):
        nodes = np.ascontiguousarray(np.asarray(self.nodes, dtype=float))
        tris = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64))
        bedges = np.ascontiguousarray(np.asarray(self.boundary_edges, dtype=np.int64))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "boundary_edges", bedges)
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise MeshError("nodes must be an (n, 2) array")
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise MeshError("triangles must be an (m, 3) array")
        if len(bedges) and (bedges.ndim != 2 or bedges.shape[1] != 2):
            raise MeshError("boundary_edges must be a (k, 2) array")

        areas = signed_areas(nodes, tris)
        if np.any(areas <= 0.0):
            bad = int(np.argmin(areas))
            raise MeshError(
                f"triangle {bad} has non-positive signed area {areas[bad]:.3e}"
            )

        _check_edge_incidence(tris, bedges)

        edges = np.vstack([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
        lengths = np.linalg.norm(nodes[edges[:, 0]] - nodes[edges[:, 1]], axis=1)
        h_max = float(lengths.max()) if len(lengths) else 0.0
        object.__setattr__(self, "h_max", h_max)
        bnodes = np.unique(bedges) if len(bedges) else np.array([], dtype=np.int64)
        object.__setattr__(self, "boundary_nodes", bnodes)

        if self.domain_tag == "unit_disk" and len(bnodes):
            r = np.linalg.norm(nodes[bnodes], axis=1)
            if np.max(np.abs(r - 1.0)) > max(h_max**2, 1e-12):
                raise MeshError("unit_disk boundary nodes must lie on the circle")

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def triangle_areas(self):
        return signed_areas(self.nodes, self.triangles)

    def area(self):
        return float(self.triangle_areas().sum())

    def boundary_length(self):
        d = self.nodes[self.boundary_edges[:, 0]] - self.nodes[self.boundary_edges[:, 1]]
        return float(np.linalg.norm(d, axis=1).sum())

    def node_radii(self):
        return np.linalg.norm(self.nodes, axis=1)


@dataclass(frozen=True)
class MeshQuality:
    """Summary statistics of a triangulation."""

    min_angle: float  # degrees
    h_max: float
    h_min: float
    n_nodes: int
    n_triangles: int


def signed_areas(nodes, triangles):
    p0 = nodes[triangles[:, 0]]
    p1 = nodes[triangles[:, 1]]
    p2 = nodes[triangles[:, 2]]
    e1 = p1 - p0
    e2 = p2 - p0
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def _check_edge_incidence(triangles, boundary_edges):
    edges = np.vstack(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]]
    )
    edges = np.sort(edges, axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    if np.any(counts > 2):
        raise MeshError("an edge is shared by more than two triangles")
    once = uniq[counts == 1]
    declared = (
        np.unique(np.sort(boundary_edges, axis=1), axis=0)
        if len(boundary_edges)
        else np.empty((0, 2), dtype=np.int64)
    )
    if once.shape != declared.shape or not np.array_equal(once, declared):
        raise MeshError(
            "boundary_edges must be exactly the edges incident to one triangle"
        )


def estimate_disk_nodes(radius, target_h):
    """Node count the ring generator would produce for (radius, target_h)."""
    n_rings = max(1, math.ceil(radius / target_h))
    return 1 + 3 * n_rings * (n_rings + 1)


def build_disk_mesh(radius, target_h, max_nodes=DEFAULT_MAX_NODES):
    """Generate a deterministic ring triangulation of a disk.

    Ring ``j`` (radius ``j*dr``) carries ``6*j`` equally spaced nodes, so
    the mesh is invariant under rotation by 60 degrees and boundary nodes
    sit exactly on the circle of the given radius.

    Parameters
    ----------
    radius : float
        Disk radius, > 0.
    target_h : float
        Requested mesh size; the generated ``h_max`` is at most
        ``1.5 * target_h``.
    max_nodes : int
        Node budget; exceeding it raises :class:`MeshResourceError`.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if not 0 < target_h < radius:
        raise ValueError("target_h must satisfy 0 < target_h < radius")
    est = estimate_disk_nodes(radius, target_h)
    if est > max_nodes:
        raise MeshResourceError(
            f"target_h={target_h} needs about {est} nodes "
            f"(budget {max_nodes}); raise max_nodes to force the build",
            estimated_nodes=est,
            max_nodes=max_nodes,
        )

    n_rings = max(1, math.ceil(radius / target_h))
    dr = radius / n_rings

    nodes = [np.zeros((1, 2))]
    ring_start = [None, 1]  # ring_start[j] = index of first node of ring j
    for j in range(1, n_rings + 1):
        n_j = 6 * j
        theta = 2.0 * np.pi * np.arange(n_j) / n_j
        r_j = radius if j == n_rings else j * dr
        nodes.append(np.column_stack([r_j * np.cos(theta), r_j * np.sin(theta)]))
        ring_start.append(ring_start[j] + n_j)
    coords = np.vstack(nodes)

    tris = []
    # innermost fan: center to ring 1
    s1 = ring_start[1]
    for k in range(6):
        tris.append((0, s1 + k, s1 + (k + 1) % 6))
    # strips between ring j and ring j+1, built sector by sector
    for j in range(1, n_rings):
        si, so = ring_start[j], ring_start[j + 1]
        ni, no = 6 * j, 6 * (j + 1)
        for s in range(6):
            inner = [(si + (s * j + i) % ni, s + i / j) for i in range(j + 1)]
            outer = [(so + (s * (j + 1) + i) % no, s + i / (j + 1)) for i in range(j + 2)]
            p = q = 0
            while p < j or q < j + 1:
                advance_inner = p < j and (
                    q == j + 1 or inner[p + 1][1] <= outer[q + 1][1]
                )
                if advance_inner:
                    tris.append((inner[p][0], inner[p + 1][0], outer[q][0]))
                    p += 1
                else:
                    tris.append((inner[p][0], outer[q + 1][0], outer[q][0]))
                    q += 1
    triangles = np.array(tris, dtype=np.int64)

    # enforce counterclockwise orientation
    areas = signed_areas(coords, triangles)
    flip = areas < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]

    sb = ring_start[n_rings]
    nb = 6 * n_rings
    boundary_edges = np.column_stack(
        [sb + np.arange(nb), sb + (np.arange(nb) + 1) % nb]
    )
    tag = "unit_disk" if radius == 1.0 else "disk"
    return Mesh(coords, triangles, boundary_edges, domain_tag=tag)


def mesh_quality(mesh):
    """Exact minimum angle, edge-length bounds, and element counts."""
    p0 = mesh.nodes[mesh.triangles[:, 0]]
    p1 = mesh.nodes[mesh.triangles[:, 1]]
    p2 = mesh.nodes[mesh.triangles[:, 2]]
    a = np.linalg.norm(p1 - p2, axis=1)
    b = np.linalg.norm(p0 - p2, axis=1)
    c = np.linalg.norm(p0 - p1, axis=1)
    lengths = np.concatenate([a, b, c])

    def angle(opp, s1, s2):
        cosv = np.clip((s1**2 + s2**2 - opp**2) / (2 * s1 * s2), -1.0, 1.0)
        return np.degrees(np.arccos(cosv))

    angles = np.concatenate([angle(a, b, c), angle(b, a, c), angle(c, a, b)])
    return MeshQuality(
        min_angle=float(angles.min()),
        h_max=float(lengths.max()),
        h_min=float(lengths.min()),
        n_nodes=mesh.n_nodes,
        n_triangles=mesh.n_triangles,
    )


def save_mesh(mesh, path):
    """Write the plain-text mesh format (bit-exact round trip)."""
    with open(path, "w") as fh:
        fh.write(
            f"nodes {mesh.n_nodes} triangles {mesh.n_triangles} "
            f"boundary_edges {len(mesh.boundary_edges)}\n"
        )
        for x, y in mesh.nodes:
            fh.write(f"{float(x)!r} {float(y)!r}\n")
        for t in mesh.triangles:
            fh.write(f"{t[0]} {t[1]} {t[2]}\n")
        for e in mesh.boundary_edges:
            fh.write(f"{e[0]} {e[1]}\n")


def load_mesh(path, domain_tag="unit_disk"):
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 6 or header[0] != "nodes":
            raise MeshError(f"bad mesh header in {path}")
        n, m, k = int(header[1]), int(header[3]), int(header[5])
        nodes = np.array(
            [[float(v) for v in fh.readline().split()] for _ in range(n)]
        )
        triangles = np.array(
            [[int(v) for v in fh.readline().split()] for _ in range(m)],
            dtype=np.int64,
        ).reshape(m, 3)
        bedges = np.array(
            [[int(v) for v in fh.readline().split()] for _ in range(k)],
            dtype=np.int64,
        ).reshape(k, 2)
    return Mesh(nodes, triangles, bedges, domain_tag=domain_tag)
