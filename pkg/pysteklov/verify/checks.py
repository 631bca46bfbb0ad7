# coding=utf-8
"""
Numerical certification of the Steklov-Robin estimates

Each check solves the discrete problems it needs on one mesh and returns CheckRecord objects. Variational
    inequalities hold exactly in the discrete space, so they are asserted with a round-off tolerance; asymptotic
    limits get a percentage tolerance; comparisons against continuum closed forms get a discretization tolerance.
"""
import logging
import math
from dataclasses import asdict, dataclass, field

import dask
import numpy as np
import pandas as pd

from pysteklov.errors import UnsupportedOutlineError
from pysteklov.fem import spectral
from pysteklov.fem.assemble import assemble_system, boundary_l2, h1_distance, interpolate, rayleigh
from pysteklov.geometry.domain import AnnularDomain, Constant, RadialOutline, radial_extremes, shell_domain, \
    starshape_factor
from pysteklov.geometry.mesh import dumbbell_mesh, polar_mesh, uniform_refine
from pysteklov.oracle.radial import ShellSpec, q_shell, sigma_beta_shell, sigma_dirichlet_shell
from pysteklov.tools.utilities import convergence_orders, relative_error, worst_step_ratio

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

logger = logging.getLogger(__name__)

INEQUALITY_TOL = 1e-6
LIMIT_TOL = 0.05
FEM_TOL = 0.02
JITTER = 0.01

REPORT_COLUMNS = ["check", "domain", "beta", "h", "lhs", "rhs", "margin", "tol", "verdict"]


@dataclass
class CheckRecord:
    """
    One certified statement

    Inequality records pass iff lhs <= rhs * (1 + tol), margin = rhs - lhs. Limit records pass iff
        |margin| <= tol, where margin is the residual of the limit.
    """
    name: str
    lhs: float
    rhs: float
    margin: float
    tol: float
    verdict: str
    domain: str = ""
    beta: str = ""
    h: float = float("nan")
    kind: str = "inequality"
    detail: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == "pass"

    def row(self):
        return {"check": self.name, "domain": self.domain, "beta": self.beta, "h": self.h, "lhs": self.lhs,
                "rhs": self.rhs, "margin": self.margin, "tol": self.tol, "verdict": self.verdict}

    def to_dict(self):
        return asdict(self)


def _provenance(domain, beta, mesh):
    label = getattr(domain, "label", str(domain))
    text = beta.describe() if hasattr(beta, "describe") else f"{beta:g}"
    return {"domain": label, "beta": text, "h": mesh.h if mesh is not None else float("nan")}


def inequality(name, lhs, rhs, tol, provenance, **detail):
    lhs, rhs = float(lhs), float(rhs)
    passed = lhs <= rhs * (1.0 + tol)
    record = CheckRecord(name=name, lhs=lhs, rhs=rhs, margin=rhs - lhs, tol=tol,
                         verdict="pass" if passed else "fail", kind="inequality", detail=detail, **provenance)
    _log_record(record)
    return record


def limit(name, lhs, rhs, residual, tol, provenance, **detail):
    residual = float(residual)
    passed = abs(residual) <= tol
    record = CheckRecord(name=name, lhs=float(lhs), rhs=float(rhs), margin=residual, tol=tol,
                         verdict="pass" if passed else "fail", kind="limit", detail=detail, **provenance)
    _log_record(record)
    return record


def _log_record(record):
    level = logging.INFO if record.passed else logging.WARNING
    logger.log(level, "%-28s %-16s beta=%-14s lhs=%.8g rhs=%.8g -> %s", record.name, record.domain, record.beta,
               record.lhs, record.rhs, record.verdict)


def same_mesh_quantities(system):
    """
    sigma_beta, sigma_D, mu_1 and q_beta on one assembled system

    mu_1 uses the beta-weighted inner mean as constraint; for constant beta this is the plain zero-mean condition.
    """
    gamma, inner = system.outer_dofs, system.inner_dofs
    sigma = spectral.solve_steklov_robin(system.K, system.B_in, system.M_out, gamma)
    dirichlet = spectral.solve_steklov_dirichlet(system.K, system.M_out, gamma, inner)
    mu1 = spectral.solve_mu1(system.K, system.M_out, system.beta_inner_row())
    q = spectral.solve_q_beta(system.K, system.B_in, system.M_out, inner, gamma, M_in=system.M_in)
    return {"sigma_beta": sigma, "sigma_D": dirichlet, "mu1": mu1, "q_beta": q}


def check_upper_bounds(domain, beta, mesh, tol=INEQUALITY_TOL):
    """
    The four same-mesh upper bounds for sigma_beta

        sigma_beta <= sigma_D
        sigma_beta <= m_h / P_h(Omega_0)
        1/sigma_beta <= 1/mu_1 + P_h(Omega_0)/m_h
        1/sigma_beta <= 1/sigma_D + 1/q_beta

    Returns
    -------
    list of CheckRecord
    """
    system = assemble_system(mesh, beta)
    values = same_mesh_quantities(system)
    sigma = values["sigma_beta"].value
    sigma_d = values["sigma_D"].value
    mu1 = values["mu1"].value
    q = values["q_beta"].value
    perimeter, m_h = system.outer_perimeter_h, system.m_h
    where = _provenance(domain, beta, mesh)
    return [
        inequality("sigma_beta_le_sigma_D", sigma, sigma_d, tol, where),
        inequality("rough_bound", sigma, m_h / perimeter, tol, where, m_h=m_h, perimeter=perimeter),
        inequality("mu1_bound", 1.0 / sigma, 1.0 / mu1 + perimeter / m_h, tol, where, mu1=mu1),
        inequality("dirichlet_q_bound", 1.0 / sigma, 1.0 / sigma_d + 1.0 / q, tol, where, sigma_D=sigma_d, q=q),
    ]


def check_shell_equality(domain, beta, mesh, tol=0.01):
    """1/sigma_beta - 1/sigma_D - 1/q_beta relative to 1/sigma_beta; vanishes on shells."""
    system = assemble_system(mesh, beta)
    gamma, inner = system.outer_dofs, system.inner_dofs
    sigma = spectral.solve_steklov_robin(system.K, system.B_in, system.M_out, gamma).value
    sigma_d = spectral.solve_steklov_dirichlet(system.K, system.M_out, gamma, inner).value
    q = spectral.solve_q_beta(system.K, system.B_in, system.M_out, inner, gamma).value
    residual = (1.0 / sigma - 1.0 / sigma_d - 1.0 / q) * sigma
    return limit("shell_equality", 1.0 / sigma, 1.0 / sigma_d + 1.0 / q, residual, tol,
                 _provenance(domain, beta, mesh))


def check_lower_bound(domain, beta, mesh, tol=INEQUALITY_TOL):
    """
    Star-shaped lower bound sigma_beta >= sigma_{inf beta}(A_{r,R_m}) / (R_M max sqrt(1 + (rho'/rho)^2))

    For a circular outline a second record compares the discrete value with the shell closed form.

    Returns
    -------
    list of CheckRecord
    """
    if not isinstance(domain.outline, RadialOutline):
        raise UnsupportedOutlineError("the star-shaped lower bound needs a radial outline")
    r_min, r_max = radial_extremes(domain)
    factor = starshape_factor(domain)
    beta_inf = beta.infimum()
    shell = ShellSpec(2, domain.hole_radius, r_min)
    bound = sigma_beta_shell(shell, beta_inf) / factor
    system = assemble_system(mesh, beta)
    sigma = spectral.solve_steklov_robin(system.K, system.B_in, system.M_out, system.outer_dofs).value
    where = _provenance(domain, beta, mesh)
    records = [inequality("starshaped_lower_bound", bound, sigma, tol, where, R_m=r_min, R_M=r_max,
                          factor=factor, beta_inf=beta_inf)]
    if domain.outline.is_circle():
        exact = sigma_beta_shell(shell, beta_inf)
        records.append(limit("ball_closed_form", sigma, exact, relative_error(sigma, exact), FEM_TOL, where))
    return records


def _constant_beta_solves(mesh, betas):
    """sigma_beta,h for every constant beta, evaluated concurrently."""
    base = assemble_system(mesh, Constant(1.0))

    def one(value):
        return spectral.solve_steklov_robin(base.K, value * base.M_in, base.M_out, base.outer_dofs)

    tasks = [dask.delayed(one)(float(b)) for b in betas]
    return base, list(dask.compute(*tasks, scheduler="threads"))


def sweep_beta(domain, mesh, beta_grid):
    """
    sigma_beta over a geometric grid of constant weights

    Checks strict monotonicity, the small-beta slope sigma_beta P_h(Omega_0) / (beta P_h(B_r)) -> 1 at the
        smallest beta and the approach to sigma_D at the largest beta, with tolerance
        max(2%, 1.1 sigma_D / q_beta) taken from the harmonic-splitting bound.

    Returns
    -------
    tuple
        (DataFrame, list of CheckRecord)
    """
    betas = np.sort(np.asarray(beta_grid, dtype=float))
    base, results = _constant_beta_solves(mesh, betas)
    sigma_d = spectral.solve_steklov_dirichlet(base.K, base.M_out, base.outer_dofs, base.inner_dofs).value
    q_unit = spectral.solve_q_beta(base.K, base.M_in, base.M_out, base.inner_dofs, base.outer_dofs).value
    sigma = np.array([res.value for res in results])
    ratio = base.outer_perimeter_h / base.inner_perimeter_h
    table = pd.DataFrame({
        "beta": betas,
        "sigma_beta": sigma,
        "sigma_D": sigma_d,
        "normalized_slope": sigma / betas * ratio,
        "dirichlet_gap": (sigma_d - sigma) / sigma_d,
    })
    label = getattr(domain, "label", "domain")
    where = {"domain": label, "beta": f"{betas[0]:g}:{betas[-1]:g}", "h": mesh.h}
    records = [inequality("beta_monotone", worst_step_ratio(sigma, increasing=True), 1.0, 0.0, where)]
    small = {**where, "beta": f"{betas[0]:g}"}
    slope = table["normalized_slope"].iloc[0]
    records.append(limit("small_beta_slope", slope, 1.0, slope - 1.0, LIMIT_TOL, small))
    large = {**where, "beta": f"{betas[-1]:g}"}
    rate = max(FEM_TOL, 1.1 * sigma_d / (betas[-1] * q_unit))
    records.append(limit("large_beta_dirichlet", sigma[-1], sigma_d, (sigma_d - sigma[-1]) / sigma_d, rate, large,
                         q=q_unit))
    return table, records


def eigenfunction_convergence(domain, mesh, beta_grid):
    """
    H1 distance between the Steklov-Robin and Steklov-Dirichlet eigenfunctions as beta grows

    Both eigenfunctions have unit L2 norm on the outer boundary and positive orientation. The distances and the
        inner traces ||u_beta||_{L2(dB_r)} must decrease (1% jitter allowed) and the last distance must not exceed
        0.05.

    Returns
    -------
    tuple
        (DataFrame, list of CheckRecord)
    """
    betas = np.sort(np.asarray(beta_grid, dtype=float))
    base, results = _constant_beta_solves(mesh, betas)
    M_vol = base.M_vol
    limit_vector = spectral.solve_steklov_dirichlet(base.K, base.M_out, base.outer_dofs, base.inner_dofs).vector
    distance = np.array([h1_distance(base.K, M_vol, res.vector, limit_vector) for res in results])
    trace = np.array([boundary_l2(base.M_in, res.vector) for res in results])
    table = pd.DataFrame({"beta": betas, "h1_distance": distance, "inner_trace": trace})
    label = getattr(domain, "label", "domain")
    where = {"domain": label, "beta": f"{betas[0]:g}:{betas[-1]:g}", "h": mesh.h}
    records = [
        inequality("h1_distance_decreasing", worst_step_ratio(distance, increasing=False), 1.0, JITTER, where),
        inequality("h1_distance_final", distance[-1], 0.05, 0.0, {**where, "beta": f"{betas[-1]:g}"}),
        inequality("inner_trace_decreasing", worst_step_ratio(trace, increasing=False), 1.0, JITTER, where),
    ]
    return table, records


def neck_test_function(mesh, eps):
    """Nodal interpolant of sin(2 pi (x - x_c) / eps) on the neck, zero elsewhere (x_c the neck center)."""
    shape = mesh.domain.outline
    d, t = shape.chord_distance, shape.half_height
    center = -d - 0.5 * eps

    def func(x, y):
        inside = (x > -d - eps) & (x < -d) & (np.abs(y) <= t * (1.0 + 1e-12))
        return np.where(inside, np.sin(2.0 * math.pi * (x - center) / eps), 0.0)

    return interpolate(mesh, func)


def dumbbell_check(eps_list, hole_radius, h, beta=None):
    """
    Degeneration of sigma_beta on dumbbells with a vanishing neck

    For each eps the neck is meshed with element size min(h, eps^3). Records: sigma_beta <= 2 pi^2 eps, sigma_beta
        decreasing with eps, and the Rayleigh quotient of the neck test function within 10% of 2 pi^2 eps.

    Returns
    -------
    tuple
        (DataFrame, list of CheckRecord)
    """
    beta = beta or Constant(1.0)
    rows, records = [], []
    for eps in eps_list:
        mesh = dumbbell_mesh(eps, hole_radius, min(h, eps ** 3))
        system = assemble_system(mesh, beta)
        sigma = spectral.solve_steklov_robin(system.K, system.B_in, system.M_out, system.outer_dofs).value
        bound = 2.0 * math.pi ** 2 * eps
        quotient = rayleigh(system.K, system.B_in, system.M_out, neck_test_function(mesh, eps))
        where = _provenance(mesh.domain, beta, mesh)
        records.append(inequality("dumbbell_bound", sigma, bound, INEQUALITY_TOL, where))
        records.append(limit("dumbbell_test_function", quotient, bound, relative_error(quotient, bound), 0.10, where))
        records.append(inequality("dumbbell_test_function_admissible", sigma, quotient, INEQUALITY_TOL, where))
        rows.append({"eps": eps, "sigma_beta": sigma, "bound": bound, "test_quotient": quotient,
                     "n_vertices": mesh.n_vertices, "h": mesh.h})
    table = pd.DataFrame(rows, columns=["eps", "sigma_beta", "bound", "test_quotient", "n_vertices", "h"])
    if len(table) > 1:
        ordered = table.sort_values("eps", ascending=False)
        records.append(inequality("dumbbell_monotone", worst_step_ratio(ordered["sigma_beta"], increasing=False),
                                  1.0, 0.0, {"domain": "dumbbell", "beta": beta.describe(), "h": float(h)}))
    return table, records


def radius_sweep(outline, beta, r_list, mesh_params):
    """
    sigma_beta as the hole shrinks

    Parameters
    ----------
    outline : RadialOutline
    beta : Constant
    r_list : sequence of float
        decreasing hole radii, all below R_m
    mesh_params : dict
        ``n_radial``, ``n_angular`` and optionally ``grading`` (default geometric)

    Returns
    -------
    tuple
        (DataFrame, list of CheckRecord)
    """
    r_min, _ = radial_extremes(outline)
    params = {"grading": "geometric", **mesh_params}
    radii = sorted((float(r) for r in r_list), reverse=True)

    def one(r):
        domain = AnnularDomain(outline, r, label=f"r={r:g}")
        mesh = polar_mesh(domain, params["n_radial"], params["n_angular"], params["grading"])
        system = assemble_system(mesh, beta)
        result = spectral.solve_steklov_robin(system.K, system.B_in, system.M_out, system.outer_dofs)
        return result.value, mesh.h

    solved = dask.compute(*[dask.delayed(one)(r) for r in radii], scheduler="threads")
    sigma = np.array([s for s, _ in solved])
    shell = np.array([sigma_beta_shell(ShellSpec(2, r, r_min), beta.value) for r in radii])
    table = pd.DataFrame({"r": radii, "sigma_beta": sigma, "shell_sigma": shell, "h": [h for _, h in solved]})
    name = "circle" if outline.is_circle() else "outline"
    label = f"{name}_a0={outline.a0:g}"
    records = []
    for r, s, bound, h in zip(radii, sigma, shell, table["h"]):
        records.append(inequality("radius_shell_bound", s, bound, FEM_TOL,
                                  {"domain": f"{label},r={r:g}", "beta": beta.describe(), "h": h}))
    where = {"domain": label, "beta": beta.describe(), "h": float(table["h"].max())}
    if len(radii) > 1:
        records.append(inequality("radius_monotone", worst_step_ratio(sigma, increasing=False), 1.0, 0.0, where))
        records.append(inequality("radius_degeneration", sigma[-1] / sigma[0], 0.5, 0.0, where))
    return table, records


def shell_validation(base_mesh_params=(8, 64), n_levels=3, beta=1.0, r=1.0, R=2.0):
    """
    Convergence of the discrete shell quantities toward the closed forms

    The coarse polar mesh of A_{r,R} is refined uniformly with boundary projection. Errors of sigma_beta, sigma_D
        and q are reported per level with observed orders; q is reproduced to round-off on shells (the inner and
        outer inscribed polygons scale alike), which is reported as exact.

    Returns
    -------
    tuple
        (DataFrame, list of CheckRecord)
    """
    spec = ShellSpec(2, r, R)
    domain = shell_domain(r, R)
    weight = Constant(beta)
    exact = {"sigma_beta": sigma_beta_shell(spec, beta), "sigma_D": sigma_dirichlet_shell(spec),
             "q": beta * q_shell(spec)}
    mesh = polar_mesh(domain, *base_mesh_params)
    rows = []
    for level in range(n_levels):
        if level:
            mesh = uniform_refine(mesh)
        system = assemble_system(mesh, weight)
        values = same_mesh_quantities(system)
        logger.info("shell level %d: %d vertices, h=%.4g", level, mesh.n_vertices, mesh.h)
        rows.append({"level": level, "h": mesh.h, "n_vertices": mesh.n_vertices,
                     "sigma_beta": values["sigma_beta"].value, "sigma_D": values["sigma_D"].value,
                     "q": values["q_beta"].value, "mu1": values["mu1"].value})
    table = pd.DataFrame(rows)
    where = {"domain": domain.label, "beta": weight.describe(), "h": float(table["h"].iloc[-1])}
    records = []
    for key, final_tol in (("sigma_beta", 0.0025), ("sigma_D", 0.0025), ("q", 0.005)):
        errors = relative_error(table[key].to_numpy(), exact[key])
        table[f"{key}_error"] = errors
        orders = convergence_orders(errors)
        table[f"{key}_order"] = np.concatenate([[np.nan], orders])
        records.append(inequality(f"shell_{key}_error", errors[-1], final_tol, 0.0, where, exact=exact[key]))
        if np.all(np.isnan(orders)):
            records.append(limit(f"shell_{key}_order", errors[-1], 0.0, errors[-1], 1e-12, where, exact=True))
        else:
            observed = float(np.nanmin(orders))
            records.append(inequality(f"shell_{key}_order", 1.5, observed, 0.0, where))
    records.append(inequality("shell_mu1_positive", 0.0, float(table["mu1"].min()), 0.0, where))
    return table, records
