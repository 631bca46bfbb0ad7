import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pysteklov.errors import AssemblyError, DimensionMismatchError, DivisionDomainError, TaggingError
from pysteklov.fem import spectral
from pysteklov.fem.assemble import (assemble_system, boundary_l2, boundary_mass, h1_distance, interpolate, rayleigh,
                                    stiffness, volume_mass)
from pysteklov.geometry.domain import Constant, PiecewiseAngular
from pysteklov.geometry.mesh import INNER, OUTER, Mesh, polar_mesh, uniform_refine
from pysteklov.oracle.radial import ShellSpec, sigma_beta_shell


@pytest.fixture
def triangle():
    return Mesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]], [[0, 1], [1, 2], [2, 0]],
                [INNER, OUTER, OUTER])


def test_reference_triangle_stiffness(triangle):
    K = stiffness(triangle).toarray()
    assert_allclose(K, [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]], atol=1e-15)


def test_reference_triangle_masses(triangle):
    M = volume_mass(triangle).toarray()
    assert_allclose(M, 0.5 / 12.0 * np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]]))
    B = boundary_mass(triangle, INNER).toarray()
    assert_allclose(B[:2, :2], np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0)
    assert B[2].sum() == 0.0


def test_degenerate_triangle():
    flat = Mesh([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [[0, 1, 2]], [[0, 1]], [INNER])
    with pytest.raises(AssemblyError):
        stiffness(flat)


def test_missing_tag(triangle):
    only_inner = Mesh(triangle.vertices, triangle.triangles, [[0, 1]], [INNER])
    with pytest.raises(TaggingError):
        boundary_mass(only_inner, OUTER)


def test_stiffness_kernel_and_symmetry(ellipse_mesh):
    K = stiffness(ellipse_mesh)
    ones = np.ones(ellipse_mesh.n_vertices)
    assert np.max(np.abs(K @ ones)) <= 1e-12 * abs(K).max()
    assert abs(K - K.T).max() <= 1e-14 * abs(K).max()
    v = np.random.default_rng(7).normal(size=ellipse_mesh.n_vertices)
    assert v @ (K @ v) >= 0.0


def test_linear_function_energy(ellipse_mesh):
    K = stiffness(ellipse_mesh)
    x = interpolate(ellipse_mesh, lambda x, y: x)
    assert_allclose(x @ (K @ x), ellipse_mesh.area, rtol=1e-10)


def test_mass_row_sums(shell_mesh):
    ones = np.ones(shell_mesh.n_vertices)
    assert_allclose(ones @ (volume_mass(shell_mesh) @ ones), shell_mesh.area, rtol=1e-13)
    assert_allclose(ones @ (volume_mass(shell_mesh) @ ones), 3.0 * math.pi, rtol=5e-3)
    perimeter = ones @ (boundary_mass(shell_mesh, OUTER) @ ones)
    assert_allclose(perimeter, shell_mesh.boundary_length(OUTER), rtol=1e-13)
    assert_allclose(perimeter, 4.0 * math.pi, rtol=5e-3)


def test_weight_is_linear(ellipse_mesh):
    unit = boundary_mass(ellipse_mesh, INNER)
    scaled = boundary_mass(ellipse_mesh, INNER, Constant(3.5))
    assert_allclose(scaled.toarray(), 3.5 * unit.toarray(), rtol=1e-14)


def test_piecewise_weight_mass(ellipse_mesh):
    beta = PiecewiseAngular((0.0, math.pi), (2.0, 4.0))
    system = assemble_system(ellipse_mesh, beta)
    # 64 angular nodes: both discontinuities sit on mesh nodes
    assert_allclose(system.m_h, 3.0 * system.inner_perimeter_h, rtol=1e-12)
    assert_allclose(system.m_h, beta.l1_norm(0.5), rtol=5e-3)


def _angular_gap(a, b):
    return np.abs((a - b + math.pi) % (2.0 * math.pi) - math.pi)


def test_piecewise_weight_jumps_on_nodes(ellipse):
    beta = PiecewiseAngular((0.3, 2.0), (2.0, 4.0))
    mesh = polar_mesh(ellipse, 4, 64, snap_angles=beta.jump_angles())
    edges = mesh.edges(INNER)
    first = np.arctan2(mesh.vertices[edges[:, 0], 1], mesh.vertices[edges[:, 0], 0])
    second = np.arctan2(mesh.vertices[edges[:, 1], 1], mesh.vertices[edges[:, 1], 0])
    span = _angular_gap(first, second)
    for phi in beta.breakpoints:
        to_first, to_second = _angular_gap(phi, first), _angular_gap(phi, second)
        inside = (to_first > 1e-12) & (to_second > 1e-12) & (np.abs(to_first + to_second - span) < 1e-9)
        assert not np.any(inside)
    system = assemble_system(mesh, beta)
    assert_allclose(system.m_h, beta.l1_norm(0.5), rtol=1e-3)


def test_rayleigh_of_constant(shell_system):
    ones = np.ones(shell_system.mesh.n_vertices)
    assert_allclose(shell_system.rayleigh(ones), shell_system.m_h / shell_system.outer_perimeter_h, rtol=1e-13)


def test_rayleigh_of_eigenvector(shell_system):
    result = spectral.solve_steklov_robin(shell_system.K, shell_system.B_in, shell_system.M_out,
                                          shell_system.outer_dofs)
    assert_allclose(shell_system.rayleigh(result.vector), result.value, rtol=1e-12)


def test_rayleigh_of_interpolated_shell_eigenfunction(shell):
    mesh = polar_mesh(shell, 16, 128)
    system = assemble_system(mesh, Constant(1.0))
    u = interpolate(mesh, lambda x, y: np.log(np.hypot(x, y)) + 1.0)
    exact = sigma_beta_shell(ShellSpec(2, 1.0, 2.0), 1.0)
    assert_allclose(system.rayleigh(u), exact, rtol=1e-2)


def test_rayleigh_requires_outer_trace(shell_system):
    v = np.zeros(shell_system.mesh.n_vertices)
    v[shell_system.inner_dofs] = 1.0
    with pytest.raises(DivisionDomainError):
        rayleigh(shell_system.K, shell_system.B_in, shell_system.M_out, v)
    with pytest.raises(DimensionMismatchError):
        rayleigh(shell_system.K, shell_system.B_in, shell_system.M_out, np.ones(3))


def test_norms(shell_system):
    n = shell_system.mesh.n_vertices
    u = np.random.default_rng(3).normal(size=n)
    assert h1_distance(shell_system.K, shell_system.M_vol, u, u) == 0.0
    assert_allclose(h1_distance(shell_system.K, shell_system.M_vol, 2.0 * np.ones(n), np.zeros(n)),
                    2.0 * math.sqrt(shell_system.mesh.area), rtol=1e-12)
    assert_allclose(boundary_l2(shell_system.M_out, np.ones(n)), math.sqrt(shell_system.outer_perimeter_h),
                    rtol=1e-13)
    with pytest.raises(DimensionMismatchError):
        h1_distance(shell_system.K, shell_system.M_vol, u, u[:-1])


def test_constraint_rows(ellipse_mesh):
    beta = PiecewiseAngular((0.0, math.pi), (2.0, 4.0))
    system = assemble_system(ellipse_mesh, beta)
    ones = np.ones(ellipse_mesh.n_vertices)
    assert_allclose(system.beta_inner_row() @ ones, system.m_h, rtol=1e-13)
    assert_allclose(system.unit_inner_row() @ ones, system.inner_perimeter_h, rtol=1e-13)


def test_galerkin_monotonicity(ellipse_mesh):
    beta = Constant(2.0)
    coarse = assemble_system(ellipse_mesh, beta)
    fine = assemble_system(uniform_refine(ellipse_mesh, project=False), beta)
    sigma_coarse = spectral.solve_steklov_robin(coarse.K, coarse.B_in, coarse.M_out, coarse.outer_dofs).value
    sigma_fine = spectral.solve_steklov_robin(fine.K, fine.B_in, fine.M_out, fine.outer_dofs).value
    assert sigma_fine <= sigma_coarse * (1.0 + 1e-10)
