# coding=utf-8
"""
Command line front end

    pysteklov oracle -n 2 -r 1 -R 2 -b 1
    pysteklov solve --domain shell12.json --output out/
    pysteklov verify --suite default --output reports/
    pysteklov sweep --beta 1e-4:1e4:9 --domain shell12.json --output out/
    pysteklov convergence --levels 3 --domain shell12.json
    pysteklov mesh --shell 1,2 --output shell.mesh

Exit codes: 0 success, 2 invalid parameters or configuration, 3 solver failure (stage named on stderr);
    ``verify`` exits with the number of failed checks, capped at 125.
"""
import functools
import logging
import sys

import click

from pysteklov.errors import (ConfigError, GeometryError, ParameterDomainError, ResolutionError, SolverStageError,
                              SteklovError, UnsupportedOutlineError)
from pysteklov.tools.configuration import RunConfig
from pysteklov.tools.utilities import format_table, parse_float_list, parse_geometric_grid
from pysteklov.tools import workflow

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_SOLVER = 3
MAX_FAILURE_EXIT = 125

_INPUT_ERRORS = (ConfigError, ParameterDomainError, GeometryError, ResolutionError, UnsupportedOutlineError)


def _guarded(func):
    """Translate library errors into the exit-code contract."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except _INPUT_ERRORS as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(EXIT_USAGE)
        except SolverStageError as err:
            if isinstance(err.cause, _INPUT_ERRORS):
                click.echo(f"error: {err.cause}", err=True)
                sys.exit(EXIT_USAGE)
            click.echo(f"solver failure in stage '{err.stage}': {err.cause}", err=True)
            sys.exit(EXIT_SOLVER)
        except SteklovError as err:
            click.echo(f"solver failure: {err}", err=True)
            sys.exit(EXIT_SOLVER)

    return wrapper


def domain_options(beta=True, n_radial=16, n_angular=128):
    """Shared domain and mesh options; ``beta=False`` leaves ``--beta`` free for the sweep grid."""
    options = [
        click.option("--domain", "domain_path", type=click.Path(dir_okay=False), help="domain JSON file"),
        click.option("--shell", help="inline shell 'r,R' (circle outline, constant beta 1)"),
        click.option("--n-radial", type=int, default=n_radial, show_default=True),
        click.option("--n-angular", type=int, default=n_angular, show_default=True),
        click.option("--refine", "refine_levels", type=int, default=0, show_default=True,
                     help="uniform refinements of the generated or saved mesh"),
        click.option("--h-target", type=float, help="neck element size for dumbbell domains"),
        click.option("--grading", type=click.Choice(["linear", "geometric"]), default="linear", show_default=True),
        click.option("--format", "formats", multiple=True, type=click.Choice(["csv", "json", "svg"]),
                     help="output formats (repeatable, default csv)"),
    ]
    if beta:
        options.insert(2, click.option("-b", "--beta", type=float,
                                       help="constant Robin weight, overrides the domain file"))

    def decorate(func):
        for option in reversed(options):
            func = option(func)
        return func

    return decorate


def _config(command, output, **kwargs):
    formats = kwargs.pop("formats", None) or ["csv"]
    return RunConfig(command, output_directory=output, formats=formats, **kwargs)


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for solver details")
def main(verbose):
    """Steklov-Robin eigenvalues of annular domains: closed forms, finite elements and estimate checks."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")


@main.command()
@click.option("-n", "--dimension", "n", type=int, required=True)
@click.option("-r", "--inner", "r", type=float, required=True)
@click.option("-R", "--outer", "R", type=float, required=True)
@click.option("-b", "--beta", type=float, required=True)
@_guarded
def oracle(n, r, R, beta):
    """Closed-form shell eigenvalue, Dirichlet limit, q and boundary residuals."""
    for name, value in workflow.oracle_table(n, r, R, beta):
        click.echo(f"{name:18s} {value:.7f}" if "residual" not in name else f"{name:18s} {value:.3e}")
    if n >= 3:
        click.echo("note: the n>=3 closed form uses beta-term exponent n-1, corrected from the commonly printed n-2 "
                   "(see README)")


@main.command()
@domain_options()
@click.option("--mesh", "mesh_path", type=click.Path(exists=True, dir_okay=False), help="solve on a saved mesh")
@click.option("--output", type=click.Path(file_okay=False), help="output directory")
@_guarded
def solve(output, **kwargs):
    """Solve sigma_beta, sigma_D, mu_1 and q_beta on one domain."""
    config = _config("solve", output, **kwargs)
    summary = workflow.run_solve(config)
    for key in ("sigma_beta", "sigma_D", "mu1", "q_beta", "m_h", "outer_perimeter_h", "h", "n_vertices"):
        value = summary[key]
        click.echo(f"{key:18s} {value:.10g}" if isinstance(value, float) else f"{key:18s} {value}")


@main.command()
@click.option("--suite", type=click.Choice(["default"]), help="run the built-in suite on the shipped fixtures")
@click.option("--fixture", "fixture", type=click.Path(exists=True, dir_okay=False), help="check one domain file")
@click.option("--n-radial", type=int, default=16, show_default=True)
@click.option("--n-angular", type=int, default=128, show_default=True)
@click.option("--output", type=click.Path(file_okay=False), default="reports", show_default=True)
@click.option("--format", "formats", multiple=True, type=click.Choice(["csv", "json"]))
@_guarded
def verify(suite, fixture, n_radial, n_angular, output, formats):
    """Certify the estimates; exit code is the number of failed checks."""
    if (suite is None) == (fixture is None):
        raise ConfigError("give exactly one of --suite default or --fixture FILE")
    formats = list(formats) or ["csv", "json"]
    config = None
    if fixture is not None:
        config = RunConfig("verify", domain_path=fixture, n_radial=n_radial, n_angular=n_angular,
                           output_directory=output, formats=formats)
    records = workflow.run_verify(output, formats, fixture=fixture, config=config)
    failed = [rec for rec in records if not rec.passed]
    for rec in failed:
        click.echo(f"FAIL {rec.name} [{rec.domain}, beta={rec.beta}] lhs={rec.lhs:.8g} rhs={rec.rhs:.8g}", err=True)
    click.echo(f"{len(records) - len(failed)}/{len(records)} checks passed")
    sys.exit(min(len(failed), MAX_FAILURE_EXIT))


@main.command()
@domain_options(beta=False)
@click.option("--beta", "beta_grid", help="geometric grid lo:hi:count of constant weights")
@click.option("--radius", help="comma separated hole radii")
@click.option("--output", type=click.Path(file_okay=False), default="sweep", show_default=True)
@_guarded
def sweep(output, beta_grid, radius, **kwargs):
    """sigma_beta against beta (log grid) or against the hole radius; exit code is the number of failed checks."""
    if (beta_grid is None) == (radius is None):
        raise ConfigError("give exactly one of --beta lo:hi:count or --radius r1,r2,...")
    if not kwargs.get("formats"):
        kwargs["formats"] = ["csv", "svg"]
    config = _config("sweep", output, **kwargs)
    if beta_grid is not None:
        table, records = workflow.run_beta_sweep(config, parse_geometric_grid(beta_grid))
    else:
        table, records = workflow.run_radius_sweep(config, parse_float_list(radius))
    click.echo(format_table(table))
    failed = sum(not rec.passed for rec in records)
    if failed:
        click.echo(f"{failed} sweep checks failed", err=True)
    sys.exit(min(failed, MAX_FAILURE_EXIT))


@main.command()
@domain_options(n_radial=8, n_angular=64)
@click.option("--levels", type=int, default=3, show_default=True, help="number of mesh levels")
@click.option("--output", type=click.Path(file_okay=False), help="output directory")
@_guarded
def convergence(output, levels, **kwargs):
    """Mesh convergence table with observed orders."""
    if levels < 2:
        raise ConfigError("convergence needs at least two levels")
    config = _config("convergence", output, **kwargs)
    table, order, _ = workflow.run_convergence(config, levels)
    click.echo(format_table(table))
    click.echo(f"fitted order {order:.3f}")


@main.command()
@domain_options()
@click.option("--output", type=click.Path(dir_okay=False), required=True, help="mesh file to write")
@_guarded
def mesh(output, **kwargs):
    """Write the mesh of a domain in the annular-mesh v1 text format."""
    config = _config("mesh", None, **kwargs)
    built = workflow.run_mesh(config, output)
    click.echo(f"{built.n_vertices} vertices, {built.n_triangles} triangles, h={built.h:.6g} -> {output}")


if __name__ == "__main__":
    main()
