"""Mesh generation, validation, quality, and round-trip persistence."""

import math

import numpy as np
import pytest

from gmrd.errors import MeshError, MeshResourceError
from gmrd.mesh import (
    Mesh,
    build_disk_mesh,
    estimate_disk_nodes,
    load_mesh,
    mesh_quality,
    save_mesh,
    signed_areas,
)


def test_coarse_mesh_area():
    mesh = build_disk_mesh(1.0, 0.5)
    assert mesh.n_triangles >= 4
    area = signed_areas(mesh.nodes, mesh.triangles).sum()
    assert abs(area - math.pi) < 0.15


def test_fine_mesh_area_and_angles():
    mesh = build_disk_mesh(1.0, 0.05)
    area = signed_areas(mesh.nodes, mesh.triangles).sum()
    assert abs(area - math.pi) < 0.01
    assert mesh_quality(mesh).min_angle >= 20.0


def test_h_max_bound():
    for h in (0.5, 0.1, 0.05):
        mesh = build_disk_mesh(1.0, h)
        assert mesh.h_max <= 1.5 * h


def test_refinement_halves_h_max():
    h1 = build_disk_mesh(1.0, 0.2).h_max
    h2 = build_disk_mesh(1.0, 0.1).h_max
    assert h2 <= h1 / 2 * 1.5


def test_area_second_order_convergence():
    errs = []
    for h in (0.2, 0.1, 0.05):
        mesh = build_disk_mesh(1.0, h)
        area = signed_areas(mesh.nodes, mesh.triangles).sum()
        errs.append(abs(area - math.pi))
    # error drops ~4x per halving
    assert errs[0] / errs[1] > 3.0
    assert errs[1] / errs[2] > 3.0


def test_boundary_nodes_on_circle():
    mesh = build_disk_mesh(1.0, 0.1)
    r = np.hypot(*mesh.nodes[mesh.boundary_nodes].T)
    assert np.max(np.abs(r - 1.0)) <= mesh.h_max**2


def test_positive_areas_and_counts():
    mesh = build_disk_mesh(1.0, 0.1)
    assert np.all(signed_areas(mesh.nodes, mesh.triangles) > 0)
    rings = round(1.0 / 0.1)
    assert mesh.n_nodes == estimate_disk_nodes(1.0, 0.1)
    assert mesh.n_nodes == 1 + 3 * rings * (rings + 1)


def test_desk_scale_node_count():
    # J=50 rings: 1 + 3*50*51 nodes
    assert estimate_disk_nodes(1.0, 0.02) == 7651


def test_resource_error():
    with pytest.raises(MeshResourceError) as exc:
        build_disk_mesh(1.0, 1e-3, max_nodes=10_000)
    assert exc.value.estimated_nodes > 10_000


def test_fine_scale_node_estimate():
    # n ~ pi / (h^2 c): about 3e6 vertices at h = 1e-3
    n = estimate_disk_nodes(1.0, 1e-3)
    assert 1e6 < n < 1e7


def test_equilateral_min_angle():
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    mesh = Mesh(
        nodes=nodes,
        triangles=np.array([[0, 1, 2]]),
        boundary_edges=np.array([[0, 1], [1, 2], [2, 0]]),
        domain_tag="triangle",
    )
    q = mesh_quality(mesh)
    assert q.min_angle == pytest.approx(60.0, abs=1e-9)
    assert q.h_min <= q.h_max


def test_degenerate_triangle_rejected():
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    with pytest.raises(MeshError):
        Mesh(
            nodes=nodes,
            triangles=np.array([[0, 1, 2]]),
            boundary_edges=np.array([[0, 1], [1, 2], [2, 0]]),
            domain_tag="degenerate",
        )


def test_bad_edge_incidence_rejected():
    mesh = build_disk_mesh(1.0, 0.5)
    with pytest.raises(MeshError):
        Mesh(
            nodes=mesh.nodes,
            triangles=mesh.triangles,
            boundary_edges=mesh.boundary_edges[:-1],  # drop one edge
            domain_tag="unit_disk",
        )


def test_save_load_round_trip(tmp_path):
    mesh = build_disk_mesh(1.0, 0.2)
    path = tmp_path / "mesh.txt"
    save_mesh(mesh, path)
    loaded = load_mesh(path)
    assert np.array_equal(loaded.nodes, mesh.nodes)  # bit-exact
    assert np.array_equal(loaded.triangles, mesh.triangles)
    assert np.array_equal(loaded.boundary_edges, mesh.boundary_edges)


def test_radius_scaling():
    mesh = build_disk_mesh(2.0, 0.2)
    area = signed_areas(mesh.nodes, mesh.triangles).sum()
    assert abs(area - 4 * math.pi) < 0.1
