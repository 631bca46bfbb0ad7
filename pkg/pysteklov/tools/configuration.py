# coding=utf-8
"""
management for the configuration object that is used by the command line drivers
"""
import json
import logging
import math
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from pysteklov.errors import ConfigError, SteklovError
from pysteklov.geometry.domain import AnnularDomain, Constant, Dumbbell, PiecewiseAngular, Polygon, RadialOutline
from pysteklov.geometry.mesh import dumbbell_mesh, polar_mesh, uniform_refine
from pysteklov.tools import io as steklov_io
from pysteklov.tools.utilities import parse_float_list

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "svg")


# ---------------------------------------------------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------------------------------------------------

class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RadialOutlineSchema(_Strict):
    type: Literal["radial"]
    a0: float = Field(gt=0.0)
    cos: List[float] = Field(default_factory=list)
    sin: List[float] = Field(default_factory=list)

    def build(self):
        return RadialOutline(self.a0, tuple(self.cos), tuple(self.sin))


class PolygonSchema(_Strict):
    type: Literal["polygon"]
    vertices: List[Tuple[float, float]] = Field(min_length=3)

    def build(self):
        return Polygon(self.vertices)


class DumbbellSchema(_Strict):
    type: Literal["dumbbell"]
    eps: float = Field(gt=0.0, le=0.5)

    def build(self):
        return Dumbbell(self.eps)


class ConstantBetaSchema(_Strict):
    type: Literal["constant"]
    value: float = Field(gt=0.0)

    def build(self):
        return Constant(self.value)


class PiecewiseBetaSchema(_Strict):
    type: Literal["piecewise"]
    breaks: List[float] = Field(min_length=1)
    values: List[Annotated[float, Field(gt=0.0)]] = Field(min_length=1)

    @model_validator(mode="after")
    def _matching_lengths(self):
        if len(self.breaks) != len(self.values):
            raise ValueError("breaks and values must have the same length")
        if any(b < 0.0 or b >= 2.0 * math.pi for b in self.breaks):
            raise ValueError("breaks must lie in [0, 2 pi)")
        if sorted(self.breaks) != list(self.breaks) or len(set(self.breaks)) != len(self.breaks):
            raise ValueError("breaks must be strictly increasing")
        return self

    def build(self):
        return PiecewiseAngular(tuple(self.breaks), tuple(self.values))


class DomainSchema(_Strict):
    """Domain file: outer outline, centered hole radius and Robin weight."""
    outline: Annotated[Union[RadialOutlineSchema, PolygonSchema, DumbbellSchema], Field(discriminator="type")]
    hole_radius: float = Field(gt=0.0)
    beta: Annotated[Union[ConstantBetaSchema, PiecewiseBetaSchema], Field(discriminator="type")]
    name: Optional[str] = None


def parse_domain(text, label=None):
    """
    Validate a domain JSON document and build the geometry

    Returns
    -------
    tuple
        (AnnularDomain, beta)

    Raises
    ------
    ConfigError
        on schema violations and on geometrically invalid domains
    """
    try:
        schema = DomainSchema.model_validate_json(text)
    except ValidationError as err:
        raise ConfigError(f"invalid domain description: {err}") from err
    try:
        domain = AnnularDomain(schema.outline.build(), schema.hole_radius,
                               label=schema.name or label or schema.outline.type)
        beta = schema.beta.build()
    except SteklovError as err:
        raise ConfigError(f"invalid domain: {err}") from err
    return domain, beta


def load_domain(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"cannot read domain file {path}: {err}") from err
    return parse_domain(text, label=path.stem)


def domain_document(domain, beta):
    """Inverse of parse_domain: the JSON-ready dict of a domain and weight."""
    outline = domain.outline
    if isinstance(outline, RadialOutline):
        out = {"type": "radial", "a0": outline.a0, "cos": list(outline.cos_coeffs), "sin": list(outline.sin_coeffs)}
    elif isinstance(outline, Polygon):
        out = {"type": "polygon", "vertices": outline.vertices.tolist()}
    else:
        out = {"type": "dumbbell", "eps": outline.eps}
    if isinstance(beta, Constant):
        weight = {"type": "constant", "value": beta.value}
    else:
        weight = {"type": "piecewise", "breaks": list(beta.breakpoints), "values": list(beta.values)}
    return {"name": domain.label, "outline": out, "hole_radius": domain.hole_radius, "beta": weight}


def dump_domain(domain, beta):
    return json.dumps(domain_document(domain, beta), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------------------------------------------------

class RunConfig(object):
    """
    Object for setting, holding, and transferring the settings of one command line run
        The constructor validates everything (domain schema, mesh parameters, formats) before any mesh or solve.
    """

    def __init__(self, command, domain_path=None, shell=None, beta=None, n_radial=16, n_angular=128,
                 refine_levels=0, h_target=None, mesh_path=None, output_directory=None, formats=None,
                 grading="linear"):
        if formats is None:
            formats = ["csv"]
        self.command = command
        self.domain_path = domain_path
        self.shell = shell
        self.beta_override = beta
        self.mesh_path = mesh_path
        self.formats = list(formats)
        self.domain = None
        self.beta = None
        self.mesh_parameters = {"n_radial": n_radial, "n_angular": n_angular, "refine_levels": refine_levels,
                                "h_target": h_target, "grading": grading}

        if output_directory is None:
            self.output_directory = None
        else:
            self.output_directory = Path(output_directory)
            self.output_directory.mkdir(parents=True, exist_ok=True)

        self.assign_domain()
        self.assign_mesh_parameters()
        self.assign_formats()

    def assign_domain(self):
        """
        assigns the domain and Robin weight from the domain file or the inline ``r,R`` shell, then applies a constant
            beta given on the command line
        """
        if (self.domain_path is None) == (self.shell is None):
            raise ConfigError("give exactly one of a domain file or an inline shell r,R")
        if self.domain_path is not None:
            self.domain, self.beta = load_domain(self.domain_path)
        else:
            try:
                r, R = parse_float_list(self.shell)
            except (ValueError, SteklovError) as err:
                raise ConfigError(f"inline shell must be 'r,R', got {self.shell!r}") from err
            try:
                self.domain = AnnularDomain(RadialOutline(R), r, label=f"shell_{r:g}_{R:g}")
            except SteklovError as err:
                raise ConfigError(f"invalid inline shell: {err}") from err
            self.beta = Constant(1.0)
        if self.beta_override is not None:
            try:
                self.beta = Constant(self.beta_override)
            except SteklovError as err:
                raise ConfigError(str(err)) from err

    def assign_mesh_parameters(self):
        params = self.mesh_parameters
        if isinstance(self.domain.outline, Dumbbell):
            if params["h_target"] is None:
                params["h_target"] = self.domain.outline.eps ** 3
            if not params["h_target"] > 0.0:
                raise ConfigError("h_target must be positive")
        else:
            if params["n_radial"] < 2 or params["n_angular"] < 8:
                raise ConfigError("mesh needs n_radial >= 2 and n_angular >= 8")
            if params["grading"] not in ("linear", "geometric"):
                raise ConfigError(f"unknown grading {params['grading']!r}")
        if params["refine_levels"] < 0:
            raise ConfigError("refine levels must be non-negative")

    def assign_formats(self):
        unknown = sorted(set(self.formats) - set(FORMATS))
        if unknown:
            raise ConfigError(f"unknown output formats {unknown}; choose from {list(FORMATS)}")

    @property
    def is_shell(self):
        outline = self.domain.outline
        return isinstance(outline, RadialOutline) and outline.is_circle()

    def build_mesh(self):
        """The mesh described by this configuration (read from file when a mesh path is set), then refined."""
        params = self.mesh_parameters
        if self.mesh_path is not None:
            mesh = steklov_io.read_mesh_file(self.mesh_path, domain=self.domain)
        elif isinstance(self.domain.outline, Dumbbell):
            mesh = dumbbell_mesh(self.domain.outline.eps, self.domain.hole_radius, params["h_target"])
        else:
            mesh = polar_mesh(self.domain, params["n_radial"], params["n_angular"], params["grading"],
                              snap_angles=self.beta.jump_angles())
        for _ in range(params["refine_levels"]):
            mesh = uniform_refine(mesh)
        logger.info("mesh for %s: %d vertices, %d triangles, h=%.4g", self.domain.label, mesh.n_vertices,
                    mesh.n_triangles, mesh.h)
        return mesh
