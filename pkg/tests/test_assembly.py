"""P1 operator assembly: stiffness, mass, Robin boundary terms, sources,
and Dirichlet constraints."""

import math

import numpy as np
import pytest
import scipy.sparse.linalg as spla

from gmrd.assembly import (
    annulus_source,
    apply_dirichlet,
    assemble_boundary_mass,
    assemble_mass,
    assemble_stiffness,
    export_operator,
    project_source,
)
from gmrd.mesh import build_disk_mesh, signed_areas


@pytest.fixture(scope="module")
def mesh():
    return build_disk_mesh(1.0, 0.05)


def test_stiffness_null_space(mesh):
    K = assemble_stiffness(mesh)
    c = np.full(mesh.n_nodes, 2.5)
    assert np.max(np.abs(K @ c)) < 1e-12


def test_stiffness_symmetry(mesh):
    K = assemble_stiffness(mesh)
    assert abs(K - K.T).max() < 1e-14


def test_linear_field_energy(mesh):
    # x'Kx = integral |grad x|^2 = area, exactly for P1
    K = assemble_stiffness(mesh)
    x = mesh.nodes[:, 0]
    area = signed_areas(mesh.nodes, mesh.triangles).sum()
    assert x @ (K @ x) == pytest.approx(area, rel=1e-12)


def test_quadratic_field_energy_converges():
    # integral |grad x^2|^2 = 4 * integral x^2 = pi on the unit disk
    errs = []
    for h in (0.1, 0.05):
        m = build_disk_mesh(1.0, h)
        K = assemble_stiffness(m)
        f = m.nodes[:, 0] ** 2
        errs.append(abs(f @ (K @ f) - math.pi))
    assert errs[1] < errs[0] / 2


def test_lumped_mass_trace(mesh):
    M = assemble_mass(mesh, lumped=True)
    assert abs(M.diagonal().sum() - math.pi) < 0.01
    assert np.all(M.diagonal() > 0)


def test_consistent_mass_row_sums(mesh):
    Mc = assemble_mass(mesh, lumped=False)
    Ml = assemble_mass(mesh, lumped=True)
    row_sums = np.asarray(Mc.sum(axis=1)).ravel()
    assert np.allclose(row_sums, Ml.diagonal(), rtol=1e-12)


def test_mass_total_area_both_variants(mesh):
    ones = np.ones(mesh.n_nodes)
    area = signed_areas(mesh.nodes, mesh.triangles).sum()
    for lumped in (True, False):
        M = assemble_mass(mesh, lumped=lumped)
        assert ones @ (M @ ones) == pytest.approx(area, rel=1e-12)


def test_boundary_mass_perimeter(mesh):
    B, ell = assemble_boundary_mass(mesh, lumped=True)
    assert abs(B.diagonal().sum() - 2 * math.pi) < 0.02
    assert ell.sum() == pytest.approx(B.diagonal().sum(), rel=1e-12)


def test_boundary_mass_interior_rows_zero(mesh):
    B, _ = assemble_boundary_mass(mesh, lumped=True)
    interior = np.setdiff1d(np.arange(mesh.n_nodes), mesh.boundary_nodes)
    assert np.all(B.diagonal()[interior] == 0.0)


def test_boundary_quadratic_form_constant(mesh):
    B, _ = assemble_boundary_mass(mesh, lumped=True)
    c = np.full(mesh.n_nodes, 1.7)
    assert c @ (B @ c) == pytest.approx(1.7**2 * 2 * math.pi, abs=0.1)


def test_robin_augmented_positive_definite(mesh):
    K = assemble_stiffness(mesh)
    B, _ = assemble_boundary_mass(mesh, lumped=True)
    A = 3.8 * K + 172.8 * B
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.standard_normal(mesh.n_nodes)
        assert x @ (A @ x) > 0


def test_annulus_source_values(mesh):
    field = project_source(mesh, annulus_source(670.0, 0.85))
    r = np.hypot(*mesh.nodes.T)
    assert np.all(field.values[r > 0.86] == 670.0)
    assert np.all(field.values[r < 0.84] == 0.0)


def test_annulus_source_tie_outer():
    # nodes exactly on the jump radius take the outer value
    mesh = build_disk_mesh(1.0, 0.05)  # ring at r=0.85 exists (17th of 20)
    field = project_source(mesh, annulus_source(670.0, 0.85))
    r = np.round(np.hypot(*mesh.nodes.T), 9)
    on_jump = np.isclose(r, 0.85)
    assert on_jump.any()
    assert np.all(field.values[on_jump] == 670.0)


def test_source_integral():
    # integral of f = 670 * pi * (1 - 0.85^2) = 584.1026...
    exact = 670.0 * math.pi * (1 - 0.85**2)
    mesh = build_disk_mesh(1.0, 0.02)
    field = project_source(mesh, annulus_source(670.0, 0.85))
    M = assemble_mass(mesh, lumped=True)
    approx = M.diagonal() @ field.values
    assert abs(approx - exact) < 0.05 * exact


def test_zero_source(mesh):
    field = project_source(mesh, 0.0)
    assert np.all(field.values == 0.0)


def test_negative_source_rejected(mesh):
    with pytest.raises(ValueError):
        project_source(mesh, -1.0)
    with pytest.raises(ValueError):
        project_source(mesh, lambda x, y: -np.hypot(x, y))


def test_dirichlet_constant_harmonic(mesh):
    K = assemble_stiffness(mesh)
    rhs = np.zeros(mesh.n_nodes)
    nb = len(mesh.boundary_nodes)
    A, b = apply_dirichlet(mesh, K, rhs, mesh.boundary_nodes, np.ones(nb))
    u = spla.spsolve(A.tocsc(), b)
    assert np.allclose(u, 1.0, atol=1e-10)


def test_dirichlet_linear_harmonic(mesh):
    K = assemble_stiffness(mesh)
    rhs = np.zeros(mesh.n_nodes)
    xb = mesh.nodes[mesh.boundary_nodes, 0]
    A, b = apply_dirichlet(mesh, K, rhs, mesh.boundary_nodes, xb)
    u = spla.spsolve(A.tocsc(), b)
    assert np.allclose(u, mesh.nodes[:, 0], atol=1e-9)


def test_poisson_center_value():
    # -Laplace u = 1, u = 0 on boundary -> u = (1 - r^2)/4, u(0) = 0.25
    for h in (0.04, 0.02):
        mesh = build_disk_mesh(1.0, h)
        K = assemble_stiffness(mesh)
        rhs = assemble_mass(mesh, lumped=True).diagonal().copy()
        nb = len(mesh.boundary_nodes)
        A, b = apply_dirichlet(mesh, K, rhs, mesh.boundary_nodes, np.zeros(nb))
        u = spla.spsolve(A.tocsc(), b)
        assert abs(u[0] - 0.25) <= 2 * h * h


def test_dirichlet_nonboundary_node_rejected(mesh):
    K = assemble_stiffness(mesh)
    rhs = np.zeros(mesh.n_nodes)
    with pytest.raises(ValueError):
        apply_dirichlet(mesh, K, rhs, np.array([0]), np.array([1.0]))


def test_export_operator(tmp_path, mesh):
    K = assemble_stiffness(mesh)
    path = tmp_path / "K.txt"
    export_operator(K, path)
    rows = np.loadtxt(path)
    assert rows.shape[1] == 3
    assert len(rows) == K.nnz
