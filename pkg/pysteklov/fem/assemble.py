# coding=utf-8
"""
P1 finite element matrices on tagged triangle meshes, plus quotient and norm evaluation

    K      stiffness, int_Omega grad u . grad v
    B_in   beta-weighted mass on the hole circle
    M_out  unit mass on the outer boundary
    M_vol  consistent volume mass

All matrices are scipy CSR with the full symmetric pattern.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from pysteklov.errors import AssemblyError, DimensionMismatchError, DivisionDomainError, TaggingError
from pysteklov.geometry.mesh import INNER, OUTER

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

logger = logging.getLogger(__name__)

_EDGE_LOCAL = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
_TRIANGLE_LOCAL = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


def _scatter(connectivity, local, n):
    """Sum per-element local matrices (m, k, k) into an n x n CSR matrix."""
    k = connectivity.shape[1]
    rows = np.repeat(connectivity, k, axis=1).ravel()
    cols = np.tile(connectivity, (1, k)).ravel()
    return sparse.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def stiffness(mesh):
    """
    P1 stiffness matrix

    Parameters
    ----------
    mesh : Mesh

    Returns
    -------
    scipy.sparse.csr_matrix
        symmetric, K @ 1 = 0

    Examples
    --------
    >>> K = stiffness(mesh)
    >>> np.allclose(K @ np.ones(mesh.n_vertices), 0.0)
    True
    """
    p = mesh.vertices[mesh.triangles]
    # b_i = y_j - y_k, c_i = x_k - x_j over cyclic (i, j, k)
    b = np.roll(p[:, :, 1], -1, axis=1) - np.roll(p[:, :, 1], -2, axis=1)
    c = np.roll(p[:, :, 0], -2, axis=1) - np.roll(p[:, :, 0], -1, axis=1)
    area = 0.5 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    scale = np.abs(p).max() if p.size else 1.0
    if np.any(area <= 1e-14 * scale * scale):
        bad = int(np.argmin(area))
        raise AssemblyError(f"degenerate or inverted triangle {bad} (signed area {area[bad]:.3e})")
    local = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (4.0 * area)[:, None, None]
    return _scatter(mesh.triangles, local, mesh.n_vertices)


def boundary_mass(mesh, tag, weight=None):
    """
    Weighted boundary mass on the edges carrying ``tag``

    Parameters
    ----------
    mesh : Mesh
    tag : str
        ``inner`` or ``outer``
    weight : Constant, PiecewiseAngular or None
        Robin weight evaluated at the polar angle of each edge midpoint; None means unit weight

    Returns
    -------
    scipy.sparse.csr_matrix
        exact integral of piecewise linear products, per-edge constant weight
    """
    edges = mesh.edges(tag)
    if len(edges) == 0:
        raise TaggingError(f"mesh has no {tag!r} boundary edges")
    a = mesh.vertices[edges[:, 0]]
    b = mesh.vertices[edges[:, 1]]
    length = np.hypot(*(b - a).T)
    if weight is None:
        w = np.ones(len(edges))
    else:
        mid = 0.5 * (a + b)
        w = np.asarray(weight.evaluate(np.arctan2(mid[:, 1], mid[:, 0])), dtype=float)
    local = (w * length)[:, None, None] * _EDGE_LOCAL[None, :, :]
    return _scatter(edges, local, mesh.n_vertices)


def volume_mass(mesh):
    """Consistent P1 mass matrix, 1' M 1 = mesh area."""
    area = mesh.signed_areas()
    local = area[:, None, None] * _TRIANGLE_LOCAL[None, :, :]
    return _scatter(mesh.triangles, local, mesh.n_vertices)


def _check_length(*vectors, n=None):
    sizes = {len(v) for v in vectors}
    if n is not None:
        sizes.add(n)
    if len(sizes) != 1:
        raise DimensionMismatchError(f"vector lengths disagree: {sorted(sizes)}")


def rayleigh(K, B_in, M_out, v):
    """
    Steklov-Robin quotient (v'Kv + v'B_in v) / v'M_out v

    Raises
    ------
    DivisionDomainError
        when v has no outer trace
    """
    v = np.asarray(v, dtype=float)
    _check_length(v, n=K.shape[0])
    denominator = float(v @ (M_out @ v))
    if not denominator > 0.0:
        raise DivisionDomainError("vector has zero trace on the outer boundary")
    return float(v @ (K @ v) + v @ (B_in @ v)) / denominator


def h1_distance(K, M_vol, u, v):
    """sqrt((u-v)'(K + M_vol)(u-v))"""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_length(u, v, n=K.shape[0])
    w = u - v
    return float(np.sqrt(max(0.0, w @ (K @ w) + w @ (M_vol @ w))))


def boundary_l2(M, v):
    v = np.asarray(v, dtype=float)
    _check_length(v, n=M.shape[0])
    return float(np.sqrt(max(0.0, v @ (M @ v))))


def interpolate(mesh, func):
    """Nodal values func(x, y) at every vertex."""
    return np.asarray(func(mesh.vertices[:, 0], mesh.vertices[:, 1]), dtype=float) * np.ones(mesh.n_vertices)


@dataclass(frozen=True)
class AssembledSystem:
    """
    Every matrix and discrete constant needed by the eigenvalue solvers for one (mesh, beta) pair

    Attributes
    ----------
    m_h : float
        discrete L1 norm of beta, 1' B_in 1
    outer_perimeter_h : float
        1' M_out 1
    inner_perimeter_h : float
        1' M_in 1
    """
    mesh: object
    beta: object
    K: sparse.csr_matrix
    B_in: sparse.csr_matrix
    M_in: sparse.csr_matrix
    M_out: sparse.csr_matrix
    M_vol: sparse.csr_matrix
    inner_dofs: np.ndarray
    outer_dofs: np.ndarray
    m_h: float
    outer_perimeter_h: float
    inner_perimeter_h: float

    def rayleigh(self, v):
        return rayleigh(self.K, self.B_in, self.M_out, v)

    def beta_inner_row(self):
        """c with c.v = int_{dB_r} beta v."""
        return np.asarray(self.B_in @ np.ones(self.K.shape[0])).ravel()

    def unit_inner_row(self):
        """c with c.v = int_{dB_r} v."""
        return np.asarray(self.M_in @ np.ones(self.K.shape[0])).ravel()


def assemble_system(mesh, beta):
    """
    Assemble K, B_in, M_in, M_out and M_vol for ``mesh`` and Robin weight ``beta``

    Returns
    -------
    AssembledSystem
    """
    K = stiffness(mesh)
    B_in = boundary_mass(mesh, INNER, beta)
    M_in = boundary_mass(mesh, INNER)
    M_out = boundary_mass(mesh, OUTER)
    M_vol = volume_mass(mesh)
    ones = np.ones(mesh.n_vertices)
    system = AssembledSystem(
        mesh=mesh, beta=beta, K=K, B_in=B_in, M_in=M_in, M_out=M_out, M_vol=M_vol,
        inner_dofs=mesh.inner_dofs, outer_dofs=mesh.outer_dofs,
        m_h=float(ones @ (B_in @ ones)),
        outer_perimeter_h=float(ones @ (M_out @ ones)),
        inner_perimeter_h=float(ones @ (M_in @ ones)),
    )
    logger.debug("assembled %d dofs (%d inner, %d outer), m_h=%.6g, P_h=%.6g", mesh.n_vertices,
                 len(system.inner_dofs), len(system.outer_dofs), system.m_h, system.outer_perimeter_h)
    return system
