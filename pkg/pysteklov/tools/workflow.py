# coding=utf-8
"""
End-to-end drivers behind the command line: build mesh, assemble, solve, check, write outputs
"""
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from pysteklov.errors import ConfigError, SolverStageError, SteklovError
from pysteklov.fem import spectral
from pysteklov.fem.assemble import assemble_system
from pysteklov.geometry.domain import Constant
from pysteklov.geometry.mesh import uniform_refine
from pysteklov.oracle import radial
from pysteklov.tools import io as steklov_io
from pysteklov.tools import plotting
from pysteklov.tools.configuration import domain_document
from pysteklov.tools.utilities import convergence_orders, fitted_order
from pysteklov.verify import checks, suite

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

logger = logging.getLogger(__name__)


def _stage(name, func, *args, **kwargs):
    """Run one pipeline stage, re-raising library failures with the stage name attached."""
    try:
        return func(*args, **kwargs)
    except SolverStageError:
        raise
    except SteklovError as err:
        raise SolverStageError(name, err) from err


def oracle_table(n, r, R, beta):
    """
    Closed-form shell quantities as an ordered list of (name, value) pairs

    Examples
    --------
    >>> dict(oracle_table(2, 1.0, 2.0, 1.0))["sigma_beta"]
    0.29530805...
    """
    spec = radial.ShellSpec(n, r, R)
    robin, steklov = radial.shell_bc_residuals(spec, beta)
    return [
        ("sigma_beta", radial.sigma_beta_shell(spec, beta)),
        ("sigma_D", radial.sigma_dirichlet_shell(spec)),
        ("q", radial.q_shell(spec)),
        ("robin_residual", robin),
        ("steklov_residual", steklov),
        ("small_beta_slope", radial.shell_small_beta_slope(spec)),
        ("kutt40_residual", radial.shell_identity_kutt40(spec, beta)),
    ]


def solve_all(config):
    """
    Mesh the configured domain and solve every discrete problem on it

    Returns
    -------
    tuple
        (mesh, dict of scalar results, dict of SpectralResult)
    """
    mesh = _stage("mesh", config.build_mesh)
    system = _stage("assembly", assemble_system, mesh, config.beta)
    gamma, inner = system.outer_dofs, system.inner_dofs
    results = {
        "sigma_beta": _stage("steklov_robin", spectral.solve_steklov_robin, system.K, system.B_in, system.M_out,
                             gamma),
        "sigma_D": _stage("steklov_dirichlet", spectral.solve_steklov_dirichlet, system.K, system.M_out, gamma,
                          inner),
        "mu1": _stage("mu1", spectral.solve_mu1, system.K, system.M_out, system.beta_inner_row()),
        "q_beta": _stage("q_beta", spectral.solve_q_beta, system.K, system.B_in, system.M_out, inner, gamma,
                         M_in=system.M_in),
    }
    summary = {
        "domain": config.domain.label,
        "beta": config.beta.describe(),
        "n_vertices": mesh.n_vertices,
        "n_triangles": mesh.n_triangles,
        "h": mesh.h,
        "m_h": system.m_h,
        "outer_perimeter_h": system.outer_perimeter_h,
        "inner_perimeter_h": system.inner_perimeter_h,
    }
    for key, result in results.items():
        summary[key] = result.value
        summary[f"{key}_residual"] = result.residual
    summary["sigma_beta_gap"] = results["sigma_beta"].gap
    logger.info("%s: sigma_beta=%.8g sigma_D=%.8g mu1=%.8g q_beta=%.8g", summary["domain"], summary["sigma_beta"],
                summary["sigma_D"], summary["mu1"], summary["q_beta"])
    return mesh, summary, results


def run_solve(config):
    mesh, summary, results = solve_all(config)
    if config.output_directory is not None:
        out = config.output_directory
        if "csv" in config.formats:
            steklov_io.write_table(pd.DataFrame([summary]), out / "solve.csv")
            steklov_io.write_table(pd.DataFrame({"x": mesh.vertices[:, 0], "y": mesh.vertices[:, 1],
                                                 "u": results["sigma_beta"].vector}), out / "eigenfunction.csv")
        if "json" in config.formats:
            document = {"summary": summary, "domain": domain_document(config.domain, config.beta)}
            steklov_io.atomic_write(out / "solve.json", steklov_io.dump_json(document))
    return summary


def run_verify(output_directory, formats, fixture=None, config=None):
    """
    Run the default suite (or the checks for one domain) and write the report

    Returns
    -------
    list of CheckRecord
    """
    if fixture is None:
        records = _stage("verify", suite.run_default_suite)
    else:
        mesh = _stage("mesh", config.build_mesh)
        records = _stage("verify", suite.run_fixture_suite, config.domain, config.beta, mesh)
    if output_directory is not None:
        steklov_io.write_report(records, output_directory, [f for f in formats if f != "svg"],
                                checks.REPORT_COLUMNS)
    return records


def run_beta_sweep(config, beta_grid):
    mesh = _stage("mesh", config.build_mesh)
    table, records = _stage("sweep", checks.sweep_beta, config.domain, mesh, beta_grid)
    _write_sweep(config, table, records, "beta_sweep", plotting.plot_beta_sweep)
    if config.output_directory is not None and "svg" in config.formats:
        distance, _ = _stage("sweep", checks.eigenfunction_convergence, config.domain, mesh, beta_grid)
        plotting.plot_h1_distance(distance, Path(config.output_directory) / "h1_distance.svg")
    return table, records


def run_radius_sweep(config, radii):
    if not isinstance(config.beta, Constant):
        raise ConfigError("the radius sweep needs a constant Robin weight")
    params = {key: config.mesh_parameters[key] for key in ("n_radial", "n_angular")}
    params["grading"] = "geometric"
    table, records = _stage("sweep", checks.radius_sweep, config.domain.outline, config.beta, radii, params)
    _write_sweep(config, table, records, "radius_sweep", plotting.plot_radius_sweep)
    return table, records


def _write_sweep(config, table, records, stem, plotter):
    if config.output_directory is None:
        return
    out = Path(config.output_directory)
    if "csv" in config.formats:
        steklov_io.write_table(table, out / f"{stem}.csv")
    if "svg" in config.formats:
        plotter(table, out / f"{stem}.svg")
    steklov_io.write_report(records, out, [f for f in config.formats if f != "svg"], checks.REPORT_COLUMNS,
                            stem=f"{stem}_checks")


def run_convergence(config, levels):
    """
    Mesh convergence table

    Shells are compared with the closed forms. Other domains use successive differences |s_k - s_{k+1}| of
        sigma_beta as error estimates.

    Returns
    -------
    tuple
        (DataFrame, fitted order of sigma_beta, list of CheckRecord)
    """
    records = []
    if config.is_shell and hasattr(config.beta, "value"):
        base = (config.mesh_parameters["n_radial"], config.mesh_parameters["n_angular"])
        table, records = _stage("convergence", checks.shell_validation, base, levels, config.beta.value,
                                config.domain.hole_radius, config.domain.outline.a0)
        columns = ["sigma_beta_error", "sigma_D_error", "q_error"]
        order = fitted_order(table["h"], table["sigma_beta_error"])
    else:
        mesh = _stage("mesh", config.build_mesh)
        rows = []
        for level in range(levels):
            if level:
                mesh = _stage("mesh", uniform_refine, mesh)
            system = _stage("assembly", assemble_system, mesh, config.beta)
            value = _stage("steklov_robin", spectral.solve_steklov_robin, system.K, system.B_in, system.M_out,
                           system.outer_dofs).value
            rows.append({"level": level, "h": mesh.h, "n_vertices": mesh.n_vertices, "sigma_beta": value})
        table = pd.DataFrame(rows)
        differences = np.abs(np.diff(table["sigma_beta"].to_numpy())) / table["sigma_beta"].iloc[-1]
        table["sigma_beta_error"] = np.concatenate([differences, [np.nan]])
        table["sigma_beta_order"] = np.concatenate([[np.nan], convergence_orders(differences), [np.nan]])
        table = table.iloc[:-1].reset_index(drop=True)
        columns = ["sigma_beta_error"]
        order = fitted_order(table["h"], table["sigma_beta_error"])
    if config.output_directory is not None:
        out = Path(config.output_directory)
        if "csv" in config.formats:
            steklov_io.write_table(table, out / "convergence.csv")
        if "svg" in config.formats:
            plotting.plot_convergence(table, out / "convergence.svg", columns)
        if records:
            steklov_io.write_report(records, out, [f for f in config.formats if f != "svg"],
                                    checks.REPORT_COLUMNS, stem="convergence_checks")
    return table, order, records


def run_mesh(config, path):
    mesh = _stage("mesh", config.build_mesh)
    steklov_io.write_mesh_file(mesh, path)
    return mesh
