# coding=utf-8
"""
Discrete eigenvalue problems on assembled P1 matrices

Every Steklov-type pencil here has a mass matrix that vanishes away from the outer boundary. The interior unknowns are
    eliminated with a sparse direct factorization (Schur complement onto the outer dofs Gamma) and the remaining dense
    symmetric-definite pencil is solved with LAPACK's generalized driver, which keeps every solve deterministic.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import splu

from pysteklov.errors import ConstraintError, DimensionMismatchError, SingularityError, WeightError

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

logger = logging.getLogger(__name__)

SOLVE_RESIDUAL_TOL = 1e-10


@dataclass
class SpectralResult:
    """
    First eigenpair of a discrete problem

    Attributes
    ----------
    value : float
    vector : ndarray
        nodal values on the whole mesh, unit norm on the outer boundary (inner boundary for q_beta) and oriented
        so that the sum over the normalizing boundary is positive
    residual : float
        ||A v - value M v|| / ||A v||
    gap : float or None
        distance to the second eigenvalue of the reduced pencil
    problem : str
    info : dict
        solver metadata (reduced size, factorization size, ...)
    """
    value: float
    vector: np.ndarray
    residual: float
    gap: float = None
    problem: str = ""
    info: dict = field(default_factory=dict)


def dense_sym_geig(A, B):
    """
    All eigenpairs of the dense symmetric-definite pencil A x = lambda B x

    Cholesky reduction of B to a standard symmetric problem, tridiagonalization and implicit-shift QR (LAPACK sygv).

    Returns
    -------
    tuple
        ascending eigenvalues, B-orthonormal eigenvectors as columns

    Examples
    --------
    >>> dense_sym_geig(np.diag([1.0, 2.0]), np.eye(2))[0]
    array([1., 2.])
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"pencil shapes {A.shape} and {B.shape} differ or are not square")
    try:
        return linalg.eigh(0.5 * (A + A.T), 0.5 * (B + B.T), driver="gv")
    except linalg.LinAlgError as err:
        raise SingularityError(f"right-hand matrix is not positive definite: {err}") from err


class SparseSolver(object):
    """
    Sparse LU factorization (fill-reducing column ordering) of a symmetric positive definite block, with every
        solve checked against its residual
    """

    def __init__(self, A, tol=SOLVE_RESIDUAL_TOL):
        self.A = sparse.csc_matrix(A)
        self.tol = tol
        if self.A.shape[0] == 0:
            self.lu = None
            return
        try:
            self.lu = splu(self.A, permc_spec="COLAMD")
        except RuntimeError as err:
            raise SingularityError(f"sparse factorization failed: {err}") from err

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=float)
        if self.lu is None:
            return np.zeros_like(rhs)
        x = self.lu.solve(rhs)
        scale = np.linalg.norm(rhs)
        residual = np.linalg.norm(self.A @ x - rhs)
        if not np.all(np.isfinite(x)) or residual > self.tol * max(scale, np.finfo(float).tiny):
            raise SingularityError(f"sparse solve residual {residual:.3e} exceeds {self.tol:g} * ||b|| = "
                                   f"{self.tol * scale:.3e}")
        return x


def _complement(n, *index_sets):
    mask = np.ones(n, dtype=bool)
    for index in index_sets:
        mask[np.asarray(index, dtype=np.int64)] = False
    return np.flatnonzero(mask)


def _normalize(vector, M, rows):
    """Unit M-norm, sum over ``rows`` positive."""
    norm = np.sqrt(float(vector @ (M @ vector)))
    vector = vector / norm
    if vector[rows].sum() < 0.0:
        vector = -vector
    return vector


def _relative_residual(A, M, value, vector):
    Av = A @ vector
    return float(np.linalg.norm(Av - value * (M @ vector)) / np.linalg.norm(Av))


def _schur_eig(A, M, gamma, interior):
    """
    Eliminate ``interior`` from A x = lambda M x (M supported on ``gamma``) and solve the dense reduced pencil

    Returns
    -------
    tuple
        eigenvalues, Gamma eigenvectors, prolongation X with u_interior = -X x_gamma
    """
    A = sparse.csr_matrix(A)
    A_gg = A[gamma][:, gamma].toarray()
    A_gi = A[gamma][:, interior]
    A_ig = A[interior][:, gamma].toarray()
    solver = SparseSolver(A[interior][:, interior])
    X = solver.solve(A_ig) if len(interior) else np.zeros((0, len(gamma)))
    S = A_gg - np.asarray(A_gi @ X)
    M_g = sparse.csr_matrix(M)[gamma][:, gamma].toarray()
    values, vectors = dense_sym_geig(S, M_g)
    return values, vectors, X


def _prolong(n, gamma, interior, x, X):
    u = np.zeros(n)
    u[gamma] = x
    u[interior] = -X @ x
    return u


def _check_outer(outer_dofs):
    outer_dofs = np.asarray(outer_dofs, dtype=np.int64)
    if len(outer_dofs) == 0:
        raise DimensionMismatchError("no outer boundary dofs")
    return outer_dofs


def solve_steklov_robin(K, B_in, M_out, outer_dofs):
    """
    sigma_beta,h: smallest eigenvalue of (K + B_in) u = sigma M_out u

    Parameters
    ----------
    K, B_in, M_out : scipy.sparse matrices
    outer_dofs : ndarray
        vertex indices on the outer boundary (Gamma)

    Returns
    -------
    SpectralResult
    """
    gamma = _check_outer(outer_dofs)
    n = K.shape[0]
    if not float(B_in.sum()) > 0.0:
        raise SingularityError("K + B_in is singular: the Robin weight must be positive")
    A = (K + B_in).tocsr()
    interior = _complement(n, gamma)
    values, vectors, X = _schur_eig(A, M_out, gamma, interior)
    u = _normalize(_prolong(n, gamma, interior, vectors[:, 0], X), M_out, gamma)
    result = SpectralResult(
        value=float(values[0]), vector=u, residual=_relative_residual(A, M_out, values[0], u),
        gap=float(values[1] - values[0]) if len(values) > 1 else None, problem="steklov_robin",
        info={"n_gamma": len(gamma), "n_interior": len(interior)})
    logger.debug("sigma_beta,h = %.12g (residual %.2e, gap %.3g)", result.value, result.residual, result.gap)
    return result


def solve_steklov_dirichlet(K, M_out, outer_dofs, inner_dofs):
    """
    sigma_D,h: u = 0 on the hole circle, smallest eigenvalue of K u = sigma M_out u on the remaining dofs

    The returned vector is exactly zero on ``inner_dofs``.
    """
    gamma = _check_outer(outer_dofs)
    inner = np.asarray(inner_dofs, dtype=np.int64)
    if len(inner) == 0:
        raise DimensionMismatchError("Steklov-Dirichlet problem needs inner boundary dofs")
    n = K.shape[0]
    K = sparse.csr_matrix(K)
    interior = _complement(n, gamma, inner)
    values, vectors, X = _schur_eig(K, M_out, gamma, interior)
    u = _normalize(_prolong(n, gamma, interior, vectors[:, 0], X), M_out, gamma)
    free = _complement(n, inner)
    K_ff = K[free][:, free]
    M_ff = sparse.csr_matrix(M_out)[free][:, free]
    result = SpectralResult(
        value=float(values[0]), vector=u, residual=_relative_residual(K_ff, M_ff, values[0], u[free]),
        gap=float(values[1] - values[0]) if len(values) > 1 else None, problem="steklov_dirichlet",
        info={"n_gamma": len(gamma), "n_interior": len(interior)})
    logger.debug("sigma_D,h = %.12g (residual %.2e)", result.value, result.residual)
    return result


def solve_mu1(K, M_out, inner_mass_row):
    """
    mu_1,h: smallest value of v'Kv / v'M_out v under the linear constraint c.v = 0

    The constraint is enforced by eliminating the dof p with the largest |c_p| (v = T w), which keeps the reduced
        pencil symmetric definite.

    Parameters
    ----------
    K, M_out : scipy.sparse matrices
    inner_mass_row : ndarray
        constraint row c; M_in @ 1 gives the zero-mean condition, B_in @ 1 its beta-weighted version

    Returns
    -------
    SpectralResult
    """
    c = np.asarray(inner_mass_row, dtype=float).ravel()
    n = K.shape[0]
    if len(c) != n:
        raise DimensionMismatchError(f"constraint row has length {len(c)}, expected {n}")
    if not np.any(c != 0.0):
        raise ConstraintError("constraint row is identically zero")
    p = int(np.argmax(np.abs(c)))
    keep = _complement(n, [p])
    support = np.flatnonzero(c)
    support = support[support != p]
    # T: R^{n-1} -> R^n, identity on ``keep``, row p = -c_j / c_p
    position = np.empty(n, dtype=np.int64)
    position[keep] = np.arange(n - 1)
    rows = np.concatenate([keep, np.full(len(support), p)])
    cols = np.concatenate([np.arange(n - 1), position[support]])
    data = np.concatenate([np.ones(n - 1), -c[support] / c[p]])
    T = sparse.csr_matrix((data, (rows, cols)), shape=(n, n - 1))

    K_r = (T.T @ sparse.csr_matrix(K) @ T).tocsr()
    M_r = (T.T @ sparse.csr_matrix(M_out) @ T).tocsr()
    gamma = np.flatnonzero(M_r.diagonal() > 0.0)
    interior = _complement(n - 1, gamma)
    values, vectors, X = _schur_eig(K_r, M_r, gamma, interior)
    w = _prolong(n - 1, gamma, interior, vectors[:, 0], X)
    v = T @ w
    outer = np.flatnonzero(sparse.csr_matrix(M_out).diagonal() > 0.0)
    v = _normalize(v, M_out, outer)
    w = v[keep]
    result = SpectralResult(
        value=float(values[0]), vector=v, residual=_relative_residual(K_r, M_r, values[0], w),
        gap=float(values[1] - values[0]) if len(values) > 1 else None, problem="mu1",
        info={"eliminated_dof": p, "constraint_violation": float(abs(c @ v))})
    logger.debug("mu_1,h = %.12g (residual %.2e, eliminated dof %d)", result.value, result.residual, p)
    return result


def solve_q_beta(K, B_in, M_out, inner_dofs, outer_dofs, M_in=None):
    """
    q_beta,h: minimum of g'N g / w'M_out w over discrete harmonic w with inner trace g and natural outer condition

    With E the discrete harmonic extension of inner traces, D = E' M_out E and N = B_in restricted to the hole
        circle; q_beta,h = 1 / lambda_max(D x = lambda N x).

    Parameters
    ----------
    M_in : sparse matrix, optional
        unweighted hole-circle mass; the vector gets unit L2 norm on the hole circle with it, and unit
        beta-weighted norm (g'B_in g = 1) without it

    Returns
    -------
    SpectralResult
    """
    inner = np.asarray(inner_dofs, dtype=np.int64)
    gamma = _check_outer(outer_dofs)
    if len(inner) == 0:
        raise DimensionMismatchError("q_beta needs inner boundary dofs")
    n = K.shape[0]
    K = sparse.csr_matrix(K)
    free = _complement(n, inner)
    solver = SparseSolver(K[free][:, free])
    extension = -solver.solve(K[free][:, inner].toarray())
    full = np.zeros((n, len(inner)))
    full[inner] = np.eye(len(inner))
    full[free] = extension
    trace = full[gamma]
    M_g = sparse.csr_matrix(M_out)[gamma][:, gamma].toarray()
    D = trace.T @ M_g @ trace
    N = sparse.csr_matrix(B_in)[inner][:, inner].toarray()
    try:
        linalg.cholesky(N)
    except linalg.LinAlgError as err:
        raise WeightError("weighted inner mass is not positive definite") from err
    values, vectors = dense_sym_geig(D, N)
    lam = float(values[-1])
    if not lam > 0.0:
        raise WeightError("harmonic extension has no outer trace")
    g = vectors[:, -1]
    w = full @ g
    w = _normalize(w, B_in if M_in is None else M_in, inner)
    g = w[inner]
    Dg = D @ g
    residual = float(np.linalg.norm(Dg - lam * (N @ g)) / np.linalg.norm(Dg))
    result = SpectralResult(value=1.0 / lam, vector=w, residual=residual,
                            gap=float(1.0 / values[-2] - 1.0 / lam) if len(values) > 1 and values[-2] > 0 else None,
                            problem="q_beta",
                            info={"n_inner": len(inner), "normalization": "weighted" if M_in is None else "unit"})
    logger.debug("q_beta,h = %.12g (residual %.2e)", result.value, result.residual)
    return result


def harmonic_split(K, u, inner_dofs):
    """
    Split u = v + h with v = 0 on the hole circle and h discrete harmonic (natural outer condition)

    Returns
    -------
    tuple of ndarray
        (v, h), energy-orthogonal: v'K h = 0
    """
    u = np.asarray(u, dtype=float)
    n = K.shape[0]
    if len(u) != n:
        raise DimensionMismatchError(f"vector has length {len(u)}, expected {n}")
    inner = np.asarray(inner_dofs, dtype=np.int64)
    K = sparse.csr_matrix(K)
    free = _complement(n, inner)
    h = np.zeros(n)
    h[inner] = u[inner]
    if len(free):
        h[free] = -SparseSolver(K[free][:, free]).solve(K[free][:, inner] @ u[inner])
    return u - h, h


def inverse_iteration(A, M, tol=1e-13, maxiter=1000):
    """
    Smallest eigenpair of the full sparse pencil A x = lambda M x by inverse iteration

    Starts from the constant vector, which is never orthogonal to the positive first eigenvector.
    """
    A = sparse.csr_matrix(A)
    M = sparse.csr_matrix(M)
    solver = SparseSolver(A)
    x = np.ones(A.shape[0])
    value = float(x @ (A @ x)) / float(x @ (M @ x))
    for iteration in range(1, maxiter + 1):
        y = solver.solve(M @ x)
        x = y / np.sqrt(float(y @ (M @ y)))
        new_value = float(x @ (A @ x))
        if abs(new_value - value) <= tol * abs(new_value):
            value = new_value
            break
        value = new_value
    else:
        logger.warning("inverse iteration stopped after %d iterations", maxiter)
    outer = np.flatnonzero(M.diagonal() > 0.0)
    x = _normalize(x, M, outer)
    return SpectralResult(value=value, vector=x, residual=_relative_residual(A, M, value, x),
                          problem="inverse_iteration", info={"iterations": iteration})
