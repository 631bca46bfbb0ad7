import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pysteklov.errors import GeometryError, ParameterDomainError, UnsupportedOutlineError
from pysteklov.geometry.domain import (AnnularDomain, Constant, Dumbbell, PiecewiseAngular, Polygon, RadialOutline,
                                       beta_l1_norm, d_rho, domain_area, outer_perimeter, radial_extremes, rho,
                                       shell_domain, starshape_factor)

ELLIPSE = RadialOutline(1.5, (0.0, 0.3))
SQUARE = Polygon([(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)])


def test_circle_radial_function():
    circle = RadialOutline(2.0)
    theta = np.linspace(0.0, 2.0 * math.pi, 17)
    assert_allclose(rho(circle, theta), 2.0)
    assert_allclose(d_rho(circle, theta), 0.0)


def test_ellipse_radial_function():
    assert_allclose(rho(ELLIPSE, 0.0), 1.8)
    assert_allclose(d_rho(ELLIPSE, 0.0), 0.0, atol=1e-15)
    assert_allclose(rho(ELLIPSE, math.pi / 4), 1.5)
    assert_allclose(d_rho(ELLIPSE, math.pi / 4), -0.6)


def test_radial_function_periodic():
    theta = np.linspace(0.0, 2.0 * math.pi, 101)
    assert_allclose(rho(ELLIPSE, theta + 2.0 * math.pi), rho(ELLIPSE, theta), rtol=0.0, atol=1e-14)


def test_derivative_matches_finite_difference():
    outline = RadialOutline(2.0, (0.1, -0.2, 0.05), (0.15, 0.0, -0.1))
    theta = np.linspace(0.0, 2.0 * math.pi, 50)
    step = 1e-6
    central = (outline.evaluate(theta + step) - outline.evaluate(theta - step)) / (2.0 * step)
    assert_allclose(outline.derivative(theta), central, atol=1e-8)


def test_radial_function_rejects_polygon():
    with pytest.raises(UnsupportedOutlineError):
        rho(SQUARE, 0.0)
    with pytest.raises(UnsupportedOutlineError):
        radial_extremes(Dumbbell(0.2))


def test_perimeters():
    assert_allclose(outer_perimeter(RadialOutline(2.0)), 4.0 * math.pi)
    assert_allclose(outer_perimeter(Polygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])), 4.0)
    assert_allclose(outer_perimeter(SQUARE), 8.0)


def test_radial_perimeter_against_dense_trapezoid():
    theta = np.linspace(0.0, 2.0 * math.pi, 1_000_000, endpoint=False)
    speed = np.hypot(ELLIPSE.evaluate(theta), ELLIPSE.derivative(theta))
    assert_allclose(outer_perimeter(ELLIPSE), 2.0 * math.pi * speed.mean(), rtol=1e-8)


def test_dumbbell_perimeter():
    shape = Dumbbell(0.2)
    alpha = math.asin(0.5 * 0.2 ** 3)
    assert_allclose(outer_perimeter(shape), 4.0 * (math.pi - alpha) + 0.4)


def test_radial_extremes():
    assert radial_extremes(RadialOutline(2.0)) == (2.0, 2.0)
    assert_allclose(radial_extremes(ELLIPSE), (1.2, 1.8), rtol=1e-12)


def test_extremes_bracket_mean_and_samples():
    outline = RadialOutline(2.0, (0.1, -0.2, 0.05), (0.15, 0.0, -0.1))
    r_min, r_max = radial_extremes(outline)
    samples = outline.evaluate(np.linspace(0.0, 2.0 * math.pi, 10_000))
    assert r_min <= 2.0 <= r_max
    assert r_min <= samples.min() + 1e-14
    assert samples.max() <= r_max + 1e-14


def test_starshape_factor():
    assert starshape_factor(RadialOutline(3.0)) == 3.0
    theta = np.linspace(0.0, 2.0 * math.pi, 1_000_000, endpoint=False)
    stretch = np.sqrt(1.0 + (ELLIPSE.derivative(theta) / ELLIPSE.evaluate(theta)) ** 2)
    factor = starshape_factor(ELLIPSE)
    assert_allclose(factor, 1.8 * stretch.max(), rtol=1e-8)
    assert factor >= 1.8


def test_perimeter_exceeds_inscribed_circle():
    r_min, _ = radial_extremes(ELLIPSE)
    assert outer_perimeter(ELLIPSE) >= 2.0 * math.pi * r_min


def test_beta_l1_norm():
    assert_allclose(beta_l1_norm(Constant(1.0), 1.0), 2.0 * math.pi)
    assert_allclose(beta_l1_norm(PiecewiseAngular((0.0, math.pi), (2.0, 4.0)), 1.0), 6.0 * math.pi)
    assert_allclose(beta_l1_norm(Constant(3.0), 0.7) / (2.0 * math.pi * 0.7), 3.0)
    assert_allclose(beta_l1_norm(Constant(1.5).scaled(2.0), 0.5), 2.0 * beta_l1_norm(Constant(1.5), 0.5))


def test_piecewise_evaluation_wraps():
    beta = PiecewiseAngular((0.0, math.pi), (2.0, 4.0))
    assert_allclose(beta.evaluate([0.1, 3.0, 4.0, -0.1, 2.0 * math.pi + 0.1]), [2.0, 2.0, 4.0, 4.0, 2.0])
    assert beta.infimum() == 2.0


def test_piecewise_before_first_break_uses_last_value():
    beta = PiecewiseAngular((1.0, 2.0), (5.0, 7.0))
    assert beta.evaluate(0.5) == 7.0


@pytest.mark.parametrize("breaks, values", [((), ()), ((0.0, 1.0), (1.0,)), ((1.0, 0.5), (1.0, 2.0)),
                                            ((0.0,), (-1.0,)), ((7.0,), (1.0,))])
def test_piecewise_validation(breaks, values):
    with pytest.raises(ParameterDomainError):
        PiecewiseAngular(breaks, values)


@pytest.mark.parametrize("value", [0.0, -2.0, float("inf")])
def test_constant_validation(value):
    with pytest.raises(ParameterDomainError):
        Constant(value)


def test_outline_must_be_positive():
    with pytest.raises(GeometryError):
        RadialOutline(0.2, (0.5,))


def test_polygon_validation():
    with pytest.raises(GeometryError):
        Polygon([(-1.0, -1.0), (-1.0, 1.0), (1.0, 1.0), (1.0, -1.0)])
    with pytest.raises(GeometryError):
        Polygon([(0.0, 0.0), (1.0, 0.0)])
    with pytest.raises(GeometryError):
        Polygon([(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (1.0, -1.0), (0.0, 2.0)])


def test_polygon_ray_distance():
    assert_allclose(SQUARE.ray_distance([0.0, math.pi / 4, math.pi]), [1.0, math.sqrt(2.0), 1.0])
    assert SQUARE.is_star_shaped()


def test_annular_domain_validation():
    with pytest.raises(GeometryError):
        AnnularDomain(ELLIPSE, 1.2)
    with pytest.raises(ParameterDomainError):
        AnnularDomain(ELLIPSE, 0.0)
    with pytest.raises(GeometryError):
        AnnularDomain(Polygon([(1.0, 1.0), (3.0, 1.0), (3.0, 3.0), (1.0, 3.0)]), 0.1)
    with pytest.raises(GeometryError):
        AnnularDomain(SQUARE, 1.0)
    with pytest.raises(GeometryError):
        AnnularDomain(Dumbbell(0.2), 1.0)
    with pytest.raises(UnsupportedOutlineError):
        AnnularDomain("circle", 0.5)


@pytest.mark.parametrize("eps", [0.0, -0.1, 0.6])
def test_dumbbell_eps_range(eps):
    with pytest.raises(ParameterDomainError):
        Dumbbell(eps)


def test_dumbbell_geometry():
    shape = Dumbbell(0.2)
    t, d = shape.half_height, shape.chord_distance
    assert_allclose(t, 0.004)
    assert_allclose(d * d + t * t, 1.0)
    assert_allclose(shape.left_center, [-2.0 * d - 0.2, 0.0])


def test_domain_area():
    assert_allclose(domain_area(shell_domain(1.0, 2.0)), 3.0 * math.pi)
    assert_allclose(domain_area(AnnularDomain(SQUARE, 0.5)), 4.0 - 0.25 * math.pi)


def test_projection_onto_curves():
    domain = AnnularDomain(ELLIPSE, 0.5)
    points = np.array([[1.0, 0.2], [-0.3, 0.9], [0.1, -2.0]])
    outer = domain.project_outer(points)
    theta = np.arctan2(outer[:, 1], outer[:, 0])
    assert_allclose(np.hypot(*outer.T), ELLIPSE.evaluate(theta))
    assert_allclose(np.hypot(*domain.project_inner(points).T), 0.5)
