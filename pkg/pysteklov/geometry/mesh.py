# coding=utf-8
"""
Conforming triangle meshes of annular domains with boundary edges tagged ``inner`` (hole circle) or ``outer``

Meshes are built structurally: a mapped polar grid for radial and star-shaped polygon outlines, and three stitched
    blocks (hole lobe, neck, plain lobe) for the dumbbell. Uniform red refinement re-projects new boundary nodes onto
    the exact curves when the mesh carries its domain.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from pysteklov.errors import (GeometryError, MeshParseError, ParameterDomainError, ResolutionError,
                              UnsupportedOutlineError)
from pysteklov.geometry.domain import AnnularDomain, Dumbbell, Polygon, RadialOutline

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

logger = logging.getLogger(__name__)

INNER = "inner"
OUTER = "outer"
TAGS = (INNER, OUTER)
HEADER = "annular-mesh v1"


@dataclass(eq=False)
class Mesh:
    """
    Triangle mesh with tagged boundary

    Parameters
    ----------
    vertices : ndarray (nv, 2)
    triangles : ndarray (nt, 3)
        vertex indices, counterclockwise
    boundary_edges : ndarray (ne, 2)
    edge_tags : ndarray (ne,) of str
        ``inner`` or ``outer`` per boundary edge
    domain : AnnularDomain or None
        exact geometry used to re-project nodes on refinement
    """
    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    edge_tags: np.ndarray
    domain: object = field(default=None, repr=False)

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float).reshape(-1, 2)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        self.boundary_edges = np.ascontiguousarray(self.boundary_edges, dtype=np.int64).reshape(-1, 2)
        self.edge_tags = np.asarray(self.edge_tags, dtype="<U5").reshape(-1)
        if len(self.edge_tags) != len(self.boundary_edges):
            raise GeometryError("one tag per boundary edge is required")
        unknown = set(self.edge_tags.tolist()) - set(TAGS)
        if unknown:
            raise GeometryError(f"unknown boundary tags {sorted(unknown)}")

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def h(self):
        """Longest edge."""
        p = self.vertices[self.triangles]
        lengths = np.hypot(*(p - np.roll(p, -1, axis=1)).transpose(2, 0, 1))
        return float(lengths.max())

    def signed_areas(self):
        p = self.vertices[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @property
    def area(self):
        return float(self.signed_areas().sum())

    def edges(self, tag):
        return self.boundary_edges[self.edge_tags == tag]

    def tagged_dofs(self, tag):
        return np.unique(self.edges(tag))

    @property
    def inner_dofs(self):
        return self.tagged_dofs(INNER)

    @property
    def outer_dofs(self):
        return self.tagged_dofs(OUTER)

    def boundary_length(self, tag):
        e = self.edges(tag)
        d = self.vertices[e[:, 1]] - self.vertices[e[:, 0]]
        return float(np.hypot(d[:, 0], d[:, 1]).sum())


def _orient(vertices, triangles):
    """Flip triangles with negative signed area, reject degenerate ones."""
    triangles = np.array(triangles, dtype=np.int64)
    p = vertices[triangles]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    area = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    if np.any(area == 0.0):
        raise GeometryError("mesh generation produced a degenerate triangle")
    flip = area < 0.0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return triangles


def _grid_triangles(index):
    """Split the cells of a 2-D index array (rows = rings) along one fixed diagonal."""
    a = index[:-1, :-1].ravel()
    b = index[:-1, 1:].ravel()
    c = index[1:, 1:].ravel()
    d = index[1:, :-1].ravel()
    return np.concatenate([np.column_stack([a, c, b]), np.column_stack([a, d, c])])




def polar_mesh(domain, n_radial, n_angular, grading="linear", snap_angles=()):
    """
    Mapped polar grid between the hole circle and the outline

    Parameters
    ----------
    domain : AnnularDomain
        radial outline or star-shaped polygon
    n_radial : int
        number of cell layers between the circles, >= 2
    n_angular : int
        number of angular nodes, >= 8
    grading : str
        ``linear`` blends radii linearly, ``geometric`` spaces rings log-uniformly (small holes)
    snap_angles : sequence of float
        directions that must carry a node, typically the breakpoints of a piecewise Robin weight so that no
        boundary edge straddles a jump

    Returns
    -------
    Mesh
        (n_radial + 1) * n_angular vertices, 2 * n_radial * n_angular triangles

    Examples
    --------
    >>> polar_mesh(shell_domain(1.0, 2.0), 4, 16).n_triangles
    128
    """
    if int(n_radial) < 2 or int(n_angular) < 8:
        raise ParameterDomainError(f"polar mesh needs n_radial >= 2 and n_angular >= 8, got {n_radial}, {n_angular}")
    n_radial, n_angular = int(n_radial), int(n_angular)
    outline = domain.outline
    r = domain.hole_radius
    if isinstance(outline, RadialOutline):
        theta = 2.0 * math.pi * np.arange(n_angular) / n_angular
        theta = _snap_directions(theta, snap_angles)
        rho_out = outline.evaluate(theta)
    elif isinstance(outline, Polygon):
        if not outline.is_star_shaped():
            raise UnsupportedOutlineError("polar meshing needs a polygon star-shaped about the origin")
        theta, snapped = _snapped_angles(outline, n_angular)
        theta = _snap_directions(theta, snap_angles, fixed=snapped)
        rho_out = outline.ray_distance(theta)
        for j, v in snapped.items():
            rho_out[j] = math.hypot(*outline.vertices[v])
    else:
        raise UnsupportedOutlineError("use dumbbell_mesh for dumbbell outlines")
    if np.any(rho_out <= r):
        raise GeometryError("outline touches the hole")

    s = np.arange(n_radial + 1)[:, None] / n_radial
    if grading == "linear":
        radius = r + (rho_out[None, :] - r) * s
    elif grading == "geometric":
        radius = r * (rho_out[None, :] / r) ** s
    else:
        raise ParameterDomainError(f"unknown grading {grading!r}")
    radius[0, :] = r
    radius[-1, :] = rho_out

    x = radius * np.cos(theta)[None, :]
    y = radius * np.sin(theta)[None, :]
    if isinstance(outline, Polygon):
        for j, v in snapped.items():
            x[-1, j], y[-1, j] = outline.vertices[v]
    vertices = np.column_stack([x.ravel(), y.ravel()])

    index = np.arange((n_radial + 1) * n_angular).reshape(n_radial + 1, n_angular)
    index = np.concatenate([index, index[:, :1]], axis=1)
    triangles = _orient(vertices, _grid_triangles(index))

    inner = np.column_stack([index[0, :-1], index[0, 1:]])
    outer = np.column_stack([index[-1, :-1], index[-1, 1:]])
    mesh = Mesh(vertices, triangles, np.concatenate([inner, outer]),
                np.array([INNER] * n_angular + [OUTER] * n_angular), domain=domain)
    logger.debug("polar mesh %s: %d vertices, %d triangles, h=%.4g", getattr(domain, "label", ""),
                 mesh.n_vertices, mesh.n_triangles, mesh.h)
    return mesh


def _snapped_angles(polygon, n_angular):
    """
    Uniform angles with the nearest node moved onto every corner direction

    Returns
    -------
    theta : ndarray
        strictly increasing node angles (theta[0] may be slightly negative)
    snapped : dict
        node index -> polygon vertex index
    """
    step = 2.0 * math.pi / n_angular
    theta = step * np.arange(n_angular)
    snapped = {}
    for v, (x, y) in enumerate(polygon.vertices):
        phi = math.atan2(y, x) % (2.0 * math.pi)
        j = int(round(phi / step)) % n_angular
        if j in snapped:
            raise ResolutionError(f"n_angular={n_angular} cannot separate the polygon corners")
        snapped[j] = v
        theta[j] = phi - 2.0 * math.pi if (j == 0 and phi > math.pi) else phi
    if np.any(np.diff(theta) <= 0.0):
        raise ResolutionError(f"n_angular={n_angular} too coarse for the polygon corners")
    return theta, snapped


def _snap_directions(theta, directions, fixed=()):
    """
    Move the node nearest to each direction onto it

    Nodes listed in ``fixed`` (polygon corners) may not move; a direction landing on one must coincide with it.
    """
    theta = np.array(theta, dtype=float)
    n_angular = len(theta)
    step = 2.0 * math.pi / n_angular
    moved = {}
    for phi in directions:
        phi = float(phi) % (2.0 * math.pi)
        j = int(round(phi / step)) % n_angular
        target = phi - 2.0 * math.pi if (j == 0 and phi > math.pi) else phi
        if j in fixed or j in moved:
            gap = abs((theta[j] - target + math.pi) % (2.0 * math.pi) - math.pi)
            if gap > 1e-12:
                raise ResolutionError(f"n_angular={n_angular} cannot place a node on angle {phi:.6g}")
            continue
        moved[j] = target
        theta[j] = target
    if np.any(np.diff(theta) <= 0.0):
        raise ResolutionError(f"n_angular={n_angular} too coarse for the snapped angles")
    return theta


# ---------------------------------------------------------------------------------------------------------------------
# dumbbell
# ---------------------------------------------------------------------------------------------------------------------

LOBE_MAX_STEP = 2.0 * math.pi / 48
GROWTH = 1.25


def _graded_steps(first, largest, length):
    """Steps starting at ``first`` growing geometrically up to ``largest`` that sum exactly to ``length``."""
    steps = []
    step = first
    while sum(steps) + step < length:
        steps.append(step)
        step = min(step * GROWTH, largest)
    if not steps:
        return np.array([length])
    steps = np.array(steps)
    return steps * (length / steps.sum())


def _lobe_angles(chord_psi):
    """Angles of a lobe boundary: chord angles in [-alpha, alpha], then graded arc angles back to -alpha."""
    alpha = chord_psi[-1]
    first = chord_psi[-1] - chord_psi[-2]
    half = _graded_steps(first, LOBE_MAX_STEP, math.pi - alpha)
    side = alpha + np.cumsum(half)
    arc = np.concatenate([side[:-1], [math.pi], 2.0 * math.pi - side[-2::-1]]) if len(side) > 1 else \
        np.array([math.pi])
    return np.concatenate([chord_psi, arc])


def _lobe_block(center, phi0, psi, n_chord, ring_fraction, d, hole_radius):
    """
    Polar block of one lobe

    Returns the coordinates of all ring nodes, ring 0 first (hole circle, or the center when hole_radius is None),
        the outer ring last. Chord directions use the straight chord as outer radius.
    """
    rho = np.ones(len(psi))
    rho[:n_chord] = d / np.cos(psi[:n_chord])
    direction = np.column_stack([np.cos(phi0 + psi), np.sin(phi0 + psi)])
    inner = 0.0 if hole_radius is None else hole_radius
    radius = inner + (rho[None, :] - inner) * ring_fraction[:, None]
    return center[None, None, :] + radius[:, :, None] * direction[None, :, :]


def dumbbell_mesh(eps, hole_radius, h_target):
    """
    Block-structured mesh of the dumbbell: hole lobe centered at the origin, neck of length eps and height eps^3,
        plain lobe on the left

    The neck gets at least two element layers across. Lobe boundary angles are graded geometrically away from
        the chord, rings are graded toward the outer boundary so that cells next to the chord match the neck size.
        Chord nodes are shared with the neck end columns by index.

    Parameters
    ----------
    eps : float
        neck parameter, 0 < eps <= 0.5
    hole_radius : float
        0 < hole_radius < 1
    h_target : float
        neck element size, must not exceed eps^3

    Returns
    -------
    Mesh
    """
    if not (0.0 < hole_radius < 1.0):
        raise ParameterDomainError(f"hole radius must lie in (0, 1), got {hole_radius}")
    domain = AnnularDomain(Dumbbell(eps), hole_radius, label=f"dumbbell_{eps:g}")
    shape = domain.outline
    if not (h_target > 0.0) or h_target > eps ** 3:
        raise ResolutionError(f"h_target={h_target} cannot resolve a neck of height {eps ** 3:.3g}")
    t, d = shape.half_height, shape.chord_distance
    k = max(2, math.ceil(2.0 * t / h_target - 1e-9))
    n_x = max(16, math.ceil(eps / h_target - 1e-9))

    # neck grid: columns a = 0..n_x from x = -d - eps to x = -d, rows b = 0..k from y = -t to y = t
    xs = -d - eps + eps * np.arange(n_x + 1) / n_x
    ys = -t + 2.0 * t * np.arange(k + 1) / k
    xs[-1] = -d
    ys[-1] = t
    neck_xy = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
    neck_index = np.arange((n_x + 1) * (k + 1)).reshape(n_x + 1, k + 1)
    points = [neck_xy.reshape(-1, 2)]
    n_points = neck_index.size
    triangles = [_grid_triangles(neck_index)]
    edges = [np.column_stack([neck_index[:-1, 0], neck_index[1:, 0]]),
             np.column_stack([neck_index[:-1, -1], neck_index[1:, -1]])]
    tags = [OUTER] * (2 * n_x)

    chord_step = 2.0 * t / k
    lobes = (
        # center, direction of the chord, chord column of the neck, hole
        (np.zeros(2), math.pi, neck_index[-1, ::-1], hole_radius),
        (shape.left_center, 0.0, neck_index[0, :], None),
    )
    for center, phi0, chord_nodes, hole in lobes:
        # chord angles increase with psi; psi = -atan(y/d) on the right lobe, atan(y/d) on the left
        y_chord = ys[::-1] if phi0 == math.pi else ys
        psi_chord = np.arctan(y_chord / d) * (-1.0 if phi0 == math.pi else 1.0)
        psi = _lobe_angles(psi_chord)
        radial_length = 1.0 - (hole or 0.0)
        steps = _graded_steps(chord_step, LOBE_MAX_STEP, radial_length)[::-1]
        fraction = np.concatenate([[0.0], np.cumsum(steps)]) / radial_length
        fraction[-1] = 1.0
        ring_xy = _lobe_block(center, phi0, psi, k + 1, fraction, d, hole)
        n_rings, n_psi = ring_xy.shape[0], ring_xy.shape[1]

        index = np.full((n_rings, n_psi), -1, dtype=np.int64)
        first_ring = 0
        if hole is None:
            # collapse ring 0 onto a single center node
            points.append(center[None, :])
            center_index = n_points
            n_points += 1
            first_ring = 1
        fresh_rings = ring_xy[first_ring:-1].reshape(-1, 2)
        index[first_ring:-1] = n_points + np.arange(fresh_rings.shape[0]).reshape(-1, n_psi)
        points.append(fresh_rings)
        n_points += fresh_rings.shape[0]
        index[-1, :k + 1] = chord_nodes
        arc_xy = ring_xy[-1, k + 1:]
        index[-1, k + 1:] = n_points + np.arange(len(arc_xy))
        points.append(arc_xy)
        n_points += len(arc_xy)

        closed = np.concatenate([index, index[:, :1]], axis=1)
        if hole is None:
            ring1 = closed[1]
            triangles.append(np.column_stack([np.full(n_psi, center_index), ring1[:-1], ring1[1:]]))
            triangles.append(_grid_triangles(closed[1:]))
        else:
            triangles.append(_grid_triangles(closed))
            edges.append(np.column_stack([closed[0, :-1], closed[0, 1:]]))
            tags += [INNER] * n_psi
        outer_ring = closed[-1]
        # arc edges run from the last chord node (corner) around to the first chord node
        arc = outer_ring[k:]
        edges.append(np.column_stack([arc[:-1], arc[1:]]))
        tags += [OUTER] * (len(arc) - 1)

    vertices = np.concatenate(points)
    mesh = Mesh(vertices, _orient(vertices, np.concatenate(triangles)), np.concatenate(edges), np.array(tags),
                domain=domain)
    logger.info("dumbbell mesh eps=%g: %d vertices, %d triangles, neck %d x %d cells",
                eps, mesh.n_vertices, mesh.n_triangles, n_x, k)
    return mesh


# ---------------------------------------------------------------------------------------------------------------------
# refinement and quality
# ---------------------------------------------------------------------------------------------------------------------

def _unique_edges(triangles):
    all_edges = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    ordered = np.sort(all_edges, axis=1)
    unique, inverse = np.unique(ordered, axis=0, return_inverse=True)
    return unique, inverse.reshape(-1)


def uniform_refine(mesh, project=True):
    """
    Red refinement: every triangle split into four through its edge midpoints

    Parameters
    ----------
    mesh : Mesh
    project : bool
        move new boundary nodes onto the exact hole circle and outline (needs ``mesh.domain``); without it the
        refined space contains the coarse one

    Returns
    -------
    Mesh
    """
    nt = mesh.n_triangles
    nv = mesh.n_vertices
    unique, inverse = _unique_edges(mesh.triangles)
    midpoints = 0.5 * (mesh.vertices[unique[:, 0]] + mesh.vertices[unique[:, 1]])
    vertices = np.concatenate([mesh.vertices, midpoints])
    mid = nv + inverse
    m01, m12, m20 = mid[:nt], mid[nt:2 * nt], mid[2 * nt:]
    a, b, c = mesh.triangles.T
    triangles = np.concatenate([
        np.column_stack([a, m01, m20]),
        np.column_stack([m01, b, m12]),
        np.column_stack([m20, m12, c]),
        np.column_stack([m01, m12, m20]),
    ])

    lookup = {tuple(e): nv + i for i, e in enumerate(unique.tolist())}
    bmid = np.array([lookup[tuple(sorted(e))] for e in mesh.boundary_edges.tolist()], dtype=np.int64)
    boundary_edges = np.concatenate([np.column_stack([mesh.boundary_edges[:, 0], bmid]),
                                     np.column_stack([bmid, mesh.boundary_edges[:, 1]])])
    edge_tags = np.concatenate([mesh.edge_tags, mesh.edge_tags])

    if project and mesh.domain is not None:
        for tag, projector in ((INNER, mesh.domain.project_inner), (OUTER, mesh.domain.project_outer)):
            nodes = bmid[mesh.edge_tags == tag]
            if len(nodes):
                vertices[nodes] = projector(vertices[nodes])
    return Mesh(vertices, triangles, boundary_edges, edge_tags, domain=mesh.domain)


def mesh_quality(mesh):
    """
    Smallest interior angle (degrees) and longest edge

    Returns
    -------
    tuple of float
        (min_angle, h)
    """
    p = mesh.vertices[mesh.triangles]
    angles = []
    for i in range(3):
        u = p[:, (i + 1) % 3] - p[:, i]
        v = p[:, (i + 2) % 3] - p[:, i]
        cos = np.einsum("ij,ij->i", u, v) / (np.hypot(*u.T) * np.hypot(*v.T))
        angles.append(np.degrees(np.arccos(np.clip(cos, -1.0, 1.0))))
    return float(np.min(angles)), mesh.h


def boundary_loops(mesh):
    """Number of closed boundary loops per tag."""
    loops = {}
    for tag in TAGS:
        e = mesh.edges(tag)
        if len(e) == 0:
            loops[tag] = 0
            continue
        nodes, local = np.unique(e, return_inverse=True)
        local = local.reshape(-1, 2)
        graph = coo_matrix((np.ones(len(local)), (local[:, 0], local[:, 1])), shape=(len(nodes), len(nodes)))
        loops[tag], _ = connected_components(graph, directed=False)
    return loops


def validate_mesh(mesh, tol=1e-9):
    """
    Check orientation, conformity, boundary topology and the hole circle; raises GeometryError on violation
    """
    if np.any(mesh.signed_areas() <= 0.0):
        raise GeometryError("mesh has triangles with non-positive signed area")
    unique, inverse = _unique_edges(mesh.triangles)
    count = np.bincount(inverse, minlength=len(unique))
    if np.any(count > 2):
        raise GeometryError("non-conforming mesh: an edge is shared by more than two triangles")
    free = {tuple(e) for e in unique[count == 1].tolist()}
    tagged = {tuple(sorted(e)) for e in mesh.boundary_edges.tolist()}
    if free != tagged:
        raise GeometryError("tagged boundary edges do not match the free edges of the mesh")
    loops = boundary_loops(mesh)
    if loops != {INNER: 1, OUTER: 1}:
        raise GeometryError(f"expected one inner and one outer boundary loop, got {loops}")
    radii = np.hypot(*mesh.vertices[mesh.inner_dofs].T)
    r_h = radii.mean()
    if np.max(np.abs(radii - r_h)) > tol * r_h:
        raise GeometryError("inner boundary vertices are not on a circle about the origin")
    return True


# ---------------------------------------------------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------------------------------------------------

def write_mesh(mesh):
    """
    Serialize to the ``annular-mesh v1`` text format; floats are written with repr so reading is bit-exact
    """
    lines = [HEADER, f"{mesh.n_vertices} {mesh.n_triangles} {len(mesh.boundary_edges)}"]
    lines += [f"{x!r} {y!r}" for x, y in mesh.vertices.tolist()]
    lines += [f"{i} {j} {k}" for i, j, k in mesh.triangles.tolist()]
    lines += [f"{a} {b} {tag}" for (a, b), tag in zip(mesh.boundary_edges.tolist(), mesh.edge_tags.tolist())]
    return "\n".join(lines) + "\n"


def read_mesh(text, domain=None):
    """
    Parse the ``annular-mesh v1`` text format

    Raises
    ------
    MeshParseError
        with the 1-based line number of the first malformed line
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise MeshParseError(f"expected header {HEADER!r}", 1)

    def fields(number, count):
        if number > len(lines):
            raise MeshParseError("unexpected end of file", number)
        parts = lines[number - 1].split()
        if len(parts) != count:
            raise MeshParseError(f"expected {count} fields, got {len(parts)}", number)
        return parts

    try:
        nv, nt, ne = (int(v) for v in fields(2, 3))
    except ValueError:
        raise MeshParseError("counts must be integers", 2) from None
    if min(nv, nt, ne) < 0:
        raise MeshParseError("counts must be non-negative", 2)

    vertices = np.empty((nv, 2))
    triangles = np.empty((nt, 3), dtype=np.int64)
    edges = np.empty((ne, 2), dtype=np.int64)
    tags = []
    line = 3
    for i in range(nv):
        try:
            vertices[i] = [float(v) for v in fields(line, 2)]
        except ValueError:
            raise MeshParseError("vertex coordinates must be numbers", line) from None
        line += 1
    for i in range(nt):
        try:
            triangles[i] = [int(v) for v in fields(line, 3)]
        except ValueError:
            raise MeshParseError("triangle indices must be integers", line) from None
        if triangles[i].min() < 0 or triangles[i].max() >= nv:
            raise MeshParseError("triangle index out of range", line)
        line += 1
    for i in range(ne):
        a, b, tag = fields(line, 3)
        try:
            edges[i] = [int(a), int(b)]
        except ValueError:
            raise MeshParseError("edge indices must be integers", line) from None
        if edges[i].min() < 0 or edges[i].max() >= nv:
            raise MeshParseError("edge index out of range", line)
        if tag not in TAGS:
            raise MeshParseError(f"unknown boundary tag {tag!r}", line)
        tags.append(tag)
        line += 1
    if any(extra.strip() for extra in lines[line - 1:]):
        raise MeshParseError("trailing content after the last edge", line)
    return Mesh(vertices, triangles, edges, np.array(tags, dtype="<U5"), domain=domain)
