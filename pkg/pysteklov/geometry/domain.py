# coding=utf-8
"""
Annular domains Omega = Omega_0 minus the closed disk of radius r centered at the origin

Three outer outline kinds are supported: a truncated Fourier radial function, a counterclockwise polygon, and the
    dumbbell used as a degeneration example (two unit lobes joined by a thin neck of length eps and height eps^3).
    Robin weights on the hole circle are constant or piecewise constant in the polar angle.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from matplotlib.path import Path as MplPath
from scipy import integrate, optimize

from pysteklov.errors import GeometryError, ParameterDomainError, UnsupportedOutlineError

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
SCAN_POINTS = 4096


# ---------------------------------------------------------------------------------------------------------------------
# outlines
# ---------------------------------------------------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialOutline:
    """
    Star-shaped outline {rho(theta) (cos theta, sin theta)} with

        rho(theta) = a0 + sum_k cos_coeffs[k-1] cos(k theta) + sin_coeffs[k-1] sin(k theta)

    Parameters
    ----------
    a0 : float
        mean radius
    cos_coeffs, sin_coeffs : tuple of float
        Fourier coefficients for k = 1, 2, ...
    """
    a0: float
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cos_coeffs", tuple(float(c) for c in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(c) for c in self.sin_coeffs))
        grid = np.linspace(0.0, TWO_PI, SCAN_POINTS, endpoint=False)
        if np.min(self.evaluate(grid)) <= 0.0:
            raise GeometryError("radial outline is not positive on the whole circle")

    kind = "radial"

    def evaluate(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, float(self.a0))
        for k, c in enumerate(self.cos_coeffs, start=1):
            out = out + c * np.cos(k * theta)
        for k, s in enumerate(self.sin_coeffs, start=1):
            out = out + s * np.sin(k * theta)
        return out

    def derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape)
        for k, c in enumerate(self.cos_coeffs, start=1):
            out = out - k * c * np.sin(k * theta)
        for k, s in enumerate(self.sin_coeffs, start=1):
            out = out + k * s * np.cos(k * theta)
        return out

    def is_circle(self):
        return not any(self.cos_coeffs) and not any(self.sin_coeffs)

    def project(self, points):
        """Move points along their rays onto the outline."""
        points = np.asarray(points, dtype=float)
        theta = np.arctan2(points[:, 1], points[:, 0])
        radius = self.evaluate(theta)
        return np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])


@dataclass(frozen=True)
class Polygon:
    """Simple polygon with counterclockwise vertex order."""
    vertices: np.ndarray = field(compare=False)

    kind = "polygon"

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 2 or len(vertices) < 3:
            raise GeometryError("polygon needs at least three (x, y) vertices")
        if signed_area(vertices) <= 0.0:
            raise GeometryError("polygon vertices must be in counterclockwise order")
        if not _is_simple(vertices):
            raise GeometryError("polygon outline intersects itself")
        vertices.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)

    def edges(self):
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def is_star_shaped(self):
        """True when every edge is seen counterclockwise from the origin."""
        a, b = self.edges()
        return bool(np.all(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0] > 0.0))

    def ray_distance(self, theta):
        """Distance from the origin to the outline along direction theta (star-shaped polygons)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        direction = np.column_stack([np.cos(theta), np.sin(theta)])
        a, b = self.edges()
        e = b - a
        best = np.full(len(theta), np.inf)
        for ai, ei in zip(a, e):
            # solve t d = a + s e
            denom = direction[:, 0] * ei[1] - direction[:, 1] * ei[0]
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (ai[0] * ei[1] - ai[1] * ei[0]) / denom
                s = (ai[0] * direction[:, 1] - ai[1] * direction[:, 0]) / denom
            hit = (np.abs(denom) > 1e-300) & (t > 0.0) & (s >= -1e-12) & (s <= 1.0 + 1e-12)
            best = np.where(hit & (t < best), t, best)
        return best

    def project(self, points):
        return np.asarray(points, dtype=float)


@dataclass(frozen=True)
class Dumbbell:
    """
    Two unit disks joined by the neck rectangle of length eps and height eps^3

    The lobe holding the hole is centered at the origin, the neck occupies [-d - eps, -d] x [-t, t] with
        t = eps^3 / 2 and d = sqrt(1 - t^2), so both neck corners lie on the lobe circles.
    """
    eps: float

    kind = "dumbbell"

    def __post_init__(self):
        if not (0.0 < self.eps <= 0.5):
            raise ParameterDomainError(f"dumbbell eps must lie in (0, 0.5], got {self.eps}")
        object.__setattr__(self, "eps", float(self.eps))

    @property
    def half_height(self):
        return 0.5 * self.eps ** 3

    @property
    def chord_distance(self):
        return math.sqrt(1.0 - self.half_height ** 2)

    @property
    def chord_half_angle(self):
        return math.asin(self.half_height)

    @property
    def left_center(self):
        return np.array([-2.0 * self.chord_distance - self.eps, 0.0])

    def project(self, points):
        """Send points on the lobe arcs onto the unit circles; neck sides are straight and kept."""
        points = np.array(points, dtype=float)
        d, t = self.chord_distance, self.half_height
        in_neck = ((points[:, 0] >= -d - self.eps - 1e-12) & (points[:, 0] <= -d + 1e-12)
                   & (np.abs(np.abs(points[:, 1]) - t) <= 1e-12 * max(1.0, t)))
        left = points[:, 0] < -d - 0.5 * self.eps
        centers = np.where(left[:, None], self.left_center[None, :], 0.0)
        rel = points - centers
        norm = np.hypot(rel[:, 0], rel[:, 1])
        projected = centers + rel / norm[:, None]
        return np.where(in_neck[:, None], points, projected)


# ---------------------------------------------------------------------------------------------------------------------
# Robin weights
# ---------------------------------------------------------------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    value: float

    kind = "constant"

    def __post_init__(self):
        if not (float(self.value) > 0.0) or not math.isfinite(self.value):
            raise ParameterDomainError(f"Robin weight must be positive and finite, got {self.value}")
        object.__setattr__(self, "value", float(self.value))

    def evaluate(self, theta):
        return np.full(np.shape(theta), self.value)

    def jump_angles(self):
        return ()

    def infimum(self):
        return self.value

    def l1_norm(self, r):
        return self.value * TWO_PI * r

    def scaled(self, c):
        return Constant(self.value * c)

    def describe(self):
        return f"{self.value:g}"


@dataclass(frozen=True)
class PiecewiseAngular:
    """
    Piecewise-constant weight: values[i] applies on [breakpoints[i], breakpoints[i+1]), the last value wraps
        around to breakpoints[0] + 2 pi.
    """
    breakpoints: tuple
    values: tuple

    kind = "piecewise"

    def __post_init__(self):
        breaks = tuple(float(b) for b in self.breakpoints)
        values = tuple(float(v) for v in self.values)
        if len(breaks) == 0 or len(breaks) != len(values):
            raise ParameterDomainError("piecewise weight needs one value per breakpoint")
        if any(b < 0.0 or b >= TWO_PI for b in breaks):
            raise ParameterDomainError("breakpoints must lie in [0, 2 pi)")
        if any(b1 <= b0 for b0, b1 in zip(breaks, breaks[1:])):
            raise ParameterDomainError("breakpoints must be strictly increasing")
        if any(not (v > 0.0) or not math.isfinite(v) for v in values):
            raise ParameterDomainError("piecewise weight values must be positive and finite")
        object.__setattr__(self, "breakpoints", breaks)
        object.__setattr__(self, "values", values)

    def arc_angles(self):
        breaks = np.asarray(self.breakpoints)
        return np.diff(np.append(breaks, breaks[0] + TWO_PI))

    def evaluate(self, theta):
        theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        index = np.searchsorted(np.asarray(self.breakpoints), theta, side="right") - 1
        index = np.where(index < 0, len(self.values) - 1, index)
        return np.asarray(self.values)[index]

    def jump_angles(self):
        """Angles where the weight may jump, so meshes can put nodes there."""
        return self.breakpoints

    def infimum(self):
        return min(self.values)

    def l1_norm(self, r):
        return r * float(np.dot(self.values, self.arc_angles()))

    def scaled(self, c):
        return PiecewiseAngular(self.breakpoints, tuple(v * c for v in self.values))

    def describe(self):
        return "piecewise(" + ";".join(f"{v:g}" for v in self.values) + ")"


def beta_l1_norm(beta, r):
    """
    m = ||beta||_{L1(dB_r)}

    Examples
    --------
    >>> beta_l1_norm(PiecewiseAngular((0.0, math.pi), (2.0, 4.0)), 1.0)
    18.84955...
    """
    return beta.l1_norm(r)


# ---------------------------------------------------------------------------------------------------------------------
# annular domain
# ---------------------------------------------------------------------------------------------------------------------

@dataclass(frozen=True)
class AnnularDomain:
    """
    Omega = Omega_0 minus the closed disk B_r, hole centered at the origin

    Parameters
    ----------
    outline : RadialOutline | Polygon | Dumbbell
    hole_radius : float
    label : str
        short name carried into report provenance
    """
    outline: object
    hole_radius: float
    label: str = "domain"

    def __post_init__(self):
        r = float(self.hole_radius)
        object.__setattr__(self, "hole_radius", r)
        if not (r > 0.0):
            raise ParameterDomainError(f"hole radius must be positive, got {r}")
        outline = self.outline
        if isinstance(outline, RadialOutline):
            r_min, _ = radial_extremes(outline)
            if r >= r_min:
                raise GeometryError(f"hole radius {r} reaches the outline (min radius {r_min:.6g})")
        elif isinstance(outline, Polygon):
            if not MplPath(outline.vertices).contains_point((0.0, 0.0)):
                raise GeometryError("origin must lie inside the polygon")
            if _distance_to_edges(outline.vertices) <= r:
                raise GeometryError(f"hole radius {r} reaches the polygon")
        elif isinstance(outline, Dumbbell):
            if r >= outline.chord_distance:
                raise GeometryError(f"hole radius {r} reaches the dumbbell neck")
        else:
            raise UnsupportedOutlineError(f"unknown outline type {type(outline).__name__}")

    @property
    def r(self):
        return self.hole_radius

    def project_outer(self, points):
        return self.outline.project(points)

    def project_inner(self, points):
        points = np.asarray(points, dtype=float)
        norm = np.hypot(points[:, 0], points[:, 1])
        return points * (self.hole_radius / norm)[:, None]


def shell_domain(r, R, label=None):
    """Two-dimensional shell A_{r,R} as an annular domain with circular outline."""
    return AnnularDomain(RadialOutline(R), r, label=label or f"shell_{r:g}_{R:g}")


def _radial(outline_or_domain):
    outline = getattr(outline_or_domain, "outline", outline_or_domain)
    if not isinstance(outline, RadialOutline):
        raise UnsupportedOutlineError(f"operation needs a radial outline, got {getattr(outline, 'kind', outline)}")
    return outline


def rho(outline, theta):
    """Radial function of the outline."""
    return _radial(outline).evaluate(theta)


def d_rho(outline, theta):
    """Exact angular derivative of the radial function."""
    return _radial(outline).derivative(theta)


def outer_perimeter(domain):
    """
    Perimeter of the outer boundary

    Radial outlines are integrated adaptively, polygons and dumbbells are summed exactly.
    """
    outline = getattr(domain, "outline", domain)
    if isinstance(outline, RadialOutline):
        if outline.is_circle():
            return TWO_PI * outline.a0

        def speed(theta):
            return math.hypot(float(outline.evaluate(theta)), float(outline.derivative(theta)))

        value, _ = integrate.quad(speed, 0.0, TWO_PI, epsabs=0.0, epsrel=1e-13, limit=400)
        return value
    if isinstance(outline, Polygon):
        a, b = outline.edges()
        return float(np.sum(np.hypot(*(b - a).T)))
    if isinstance(outline, Dumbbell):
        return 2.0 * (TWO_PI - 2.0 * outline.chord_half_angle) + 2.0 * outline.eps
    raise UnsupportedOutlineError(f"unknown outline type {type(outline).__name__}")


def domain_area(domain):
    """Area of Omega (outline area minus the hole)."""
    outline = domain.outline
    hole = math.pi * domain.hole_radius ** 2
    if isinstance(outline, RadialOutline):
        harmonics = sum(c * c for c in outline.cos_coeffs) + sum(s * s for s in outline.sin_coeffs)
        return math.pi * outline.a0 ** 2 + 0.5 * math.pi * harmonics - hole
    if isinstance(outline, Polygon):
        return signed_area(outline.vertices) - hole
    if isinstance(outline, Dumbbell):
        alpha = outline.chord_half_angle
        lobe = math.pi - (alpha - math.sin(alpha) * math.cos(alpha))
        return 2.0 * lobe + outline.eps * outline.eps ** 3 - hole
    raise UnsupportedOutlineError(f"unknown outline type {type(outline).__name__}")


def _scan_extreme(func, maximize):
    """Global extreme of a 2 pi periodic function: grid scan, then bounded Brent refinement."""
    grid = np.linspace(0.0, TWO_PI, SCAN_POINTS, endpoint=False)
    values = func(grid)
    index = int(np.argmax(values) if maximize else np.argmin(values))
    step = TWO_PI / SCAN_POINTS
    sign = -1.0 if maximize else 1.0
    result = optimize.minimize_scalar(lambda t: sign * float(func(t)),
                                      bounds=(grid[index] - step, grid[index] + step),
                                      method="bounded", options={"xatol": 1e-12})
    refined = sign * result.fun
    if maximize:
        return max(float(values[index]), refined)
    return min(float(values[index]), refined)


def radial_extremes(domain):
    """
    Minimum and maximum distance (R_m, R_M) from the origin to the outline

    Returns
    -------
    tuple of float
    """
    outline = _radial(domain)
    if outline.is_circle():
        return float(outline.a0), float(outline.a0)
    return _scan_extreme(outline.evaluate, maximize=False), _scan_extreme(outline.evaluate, maximize=True)


def starshape_factor(domain):
    """
    R_M * max_theta sqrt(1 + (rho'/rho)^2), the geometric factor of the star-shaped lower bound (n = 2)
    """
    outline = _radial(domain)
    _, r_max = radial_extremes(outline)
    if outline.is_circle():
        return r_max

    def stretch(theta):
        return np.sqrt(1.0 + (outline.derivative(theta) / outline.evaluate(theta)) ** 2)

    return r_max * _scan_extreme(stretch, maximize=True)


def signed_area(vertices):
    x, y = np.asarray(vertices, dtype=float).T
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_cross(p1, p2, q1, q2):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return (d1 * d2 < 0.0) and (d3 * d4 < 0.0)


def _is_simple(vertices):
    n = len(vertices)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]):
                return False
    return True


def _distance_to_edges(vertices):
    a = np.asarray(vertices, dtype=float)
    b = np.roll(a, -1, axis=0)
    e = b - a
    s = np.clip(-np.einsum("ij,ij->i", a, e) / np.einsum("ij,ij->i", e, e), 0.0, 1.0)
    closest = a + s[:, None] * e
    return float(np.min(np.hypot(closest[:, 0], closest[:, 1])))
