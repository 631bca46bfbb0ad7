# coding=utf-8
"""
Default certification suite over the shipped domain fixtures
"""
import logging
from importlib import resources

import dask

from pysteklov.geometry.domain import Constant, Dumbbell, RadialOutline
from pysteklov.geometry.mesh import polar_mesh
from pysteklov.tools.configuration import parse_domain
from pysteklov.verify import checks

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

logger = logging.getLogger(__name__)

SUITE_MESH = (16, 128)
BETA_GRID = (1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4)
CONVERGENCE_BETAS = (1.0, 1e1, 1e2, 1e3, 1e4)
RADII = (1.0, 0.5, 0.25, 0.1)
DUMBBELL_EPS = (0.2, 0.1)


def load_fixture(name):
    """(domain, beta) of a shipped fixture, e.g. ``shell12``."""
    text = resources.files("pysteklov.fixtures").joinpath(f"{name}.json").read_text()
    return parse_domain(text, label=name)


def _records(result):
    """Checks return either a list of records or (table, records)."""
    if isinstance(result, tuple):
        return list(result[1])
    if isinstance(result, list):
        return result
    return [result]


def default_tasks():
    """Lazy checks of the default suite as dask.delayed objects."""
    tasks = []
    shell, _ = load_fixture("shell12")
    shell_mesh = polar_mesh(shell, *SUITE_MESH)
    for value in (0.5, 1.0, 5.0, 1e3):
        tasks.append(dask.delayed(checks.check_upper_bounds)(shell, Constant(value), shell_mesh))
    for value in (0.5, 1.0, 5.0):
        tasks.append(dask.delayed(checks.check_shell_equality)(shell, Constant(value), shell_mesh))
    tasks.append(dask.delayed(checks.sweep_beta)(shell, shell_mesh, BETA_GRID))
    tasks.append(dask.delayed(checks.eigenfunction_convergence)(shell, shell_mesh, CONVERGENCE_BETAS))
    tasks.append(dask.delayed(checks.shell_validation)((8, 64), 3, 1.0))

    for name in ("shell12", "circle2_r05"):
        circle, beta = load_fixture(name)
        mesh = polar_mesh(circle, *SUITE_MESH)
        tasks.append(dask.delayed(checks.check_upper_bounds)(circle, beta, mesh))
        tasks.append(dask.delayed(checks.check_lower_bound)(circle, beta, mesh))

    ellipse, _ = load_fixture("ellipse")
    _, piecewise = load_fixture("ellipse_piecewise")
    ellipse_mesh = polar_mesh(ellipse, *SUITE_MESH, snap_angles=piecewise.jump_angles())
    for beta in (Constant(0.5), Constant(5.0), piecewise):
        tasks.append(dask.delayed(checks.check_upper_bounds)(ellipse, beta, ellipse_mesh))
    for beta in (Constant(1.0), piecewise):
        tasks.append(dask.delayed(checks.check_lower_bound)(ellipse, beta, ellipse_mesh))
    tasks.append(dask.delayed(checks.sweep_beta)(ellipse, ellipse_mesh, BETA_GRID))
    tasks.append(dask.delayed(checks.eigenfunction_convergence)(ellipse, ellipse_mesh, CONVERGENCE_BETAS))

    square, square_beta = load_fixture("square")
    tasks.append(dask.delayed(checks.check_upper_bounds)(square, square_beta, polar_mesh(square, *SUITE_MESH)))

    radius_mesh = {"n_radial": SUITE_MESH[0], "n_angular": SUITE_MESH[1], "grading": "geometric"}
    for outline in (shell.outline, ellipse.outline):
        tasks.append(dask.delayed(checks.radius_sweep)(outline, Constant(1.0), RADII, radius_mesh))

    dumbbell, _ = load_fixture("dumbbell")
    tasks.append(dask.delayed(checks.dumbbell_check)(DUMBBELL_EPS, dumbbell.hole_radius, dumbbell.outline.eps ** 3))
    return tasks


def run_default_suite():
    """
    Every check of the default suite

    Returns
    -------
    list of CheckRecord
        ordered by (check, domain, beta, h)
    """
    results = dask.compute(*default_tasks(), scheduler="threads")
    records = [record for result in results for record in _records(result)]
    logger.info("default suite: %d records, %d failed", len(records), sum(not rec.passed for rec in records))
    return sorted(records, key=lambda rec: (rec.name, rec.domain, rec.beta, rec.h))


def run_fixture_suite(domain, beta, mesh):
    """
    Checks applicable to a single domain file

    Upper bounds always; the star-shaped lower bound, beta sweep and eigenfunction convergence for radial outlines;
        the degeneration checks for dumbbells.
    """
    records = []
    if isinstance(domain.outline, Dumbbell):
        eps = domain.outline.eps
        records += _records(checks.dumbbell_check([eps], domain.hole_radius, eps ** 3, beta))
        return records
    records += checks.check_upper_bounds(domain, beta, mesh)
    if isinstance(domain.outline, RadialOutline):
        records += checks.check_lower_bound(domain, beta, mesh)
        records += _records(checks.sweep_beta(domain, mesh, BETA_GRID))
        records += _records(checks.eigenfunction_convergence(domain, mesh, CONVERGENCE_BETAS))
    return sorted(records, key=lambda rec: (rec.name, rec.domain, rec.beta, rec.h))
