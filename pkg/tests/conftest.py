import pytest

from pysteklov.geometry.domain import AnnularDomain, Constant, RadialOutline, shell_domain
from pysteklov.geometry.mesh import polar_mesh
from pysteklov.fem.assemble import assemble_system


@pytest.fixture(scope="session")
def shell():
    return shell_domain(1.0, 2.0, label="shell12")


@pytest.fixture(scope="session")
def ellipse():
    return AnnularDomain(RadialOutline(1.5, (0.0, 0.3)), 0.5, label="ellipse")


@pytest.fixture(scope="session")
def shell_mesh(shell):
    return polar_mesh(shell, 8, 64)


@pytest.fixture(scope="session")
def ellipse_mesh(ellipse):
    return polar_mesh(ellipse, 8, 64)


@pytest.fixture(scope="session")
def shell_system(shell_mesh):
    return assemble_system(shell_mesh, Constant(1.0))
