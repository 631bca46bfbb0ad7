import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from pysteklov.errors import ParameterDomainError
from pysteklov.oracle.radial import (ShellSpec, q_shell, shell_bc_residuals, shell_bc_residuals_uncorrected,
                                     shell_coefficients, shell_eigenfunction, shell_identity_kutt40,
                                     shell_small_beta_slope, sigma_beta_shell, sigma_beta_shell_uncorrected,
                                     sigma_dirichlet_shell)

DIMENSIONS = (2, 3, 4, 5)
RATIOS = (0.1, 0.25, 0.5, 0.75, 0.9)
BETAS = (1e-3, 1.0, 1e3)


def test_sigma_beta_planar_shell():
    assert_allclose(sigma_beta_shell(ShellSpec(2, 1.0, 2.0), 1.0), 1.0 / (2.0 + 2.0 * math.log(2.0)), rtol=1e-14)
    assert abs(sigma_beta_shell(ShellSpec(2, 1.0, 2.0), 1.0) - 0.2953081) < 1e-7


def test_sigma_beta_three_dimensional_shell():
    assert_allclose(sigma_beta_shell(ShellSpec(3, 1.0, 2.0), 1.0), 1.0 / 6.0, rtol=1e-14)


def test_sigma_dirichlet():
    assert abs(sigma_dirichlet_shell(ShellSpec(2, 1.0, 2.0)) - 0.7213475) < 1e-7
    assert_allclose(sigma_dirichlet_shell(ShellSpec(3, 1.0, 2.0)), 0.5, rtol=1e-14)


def test_eigenfunction_values():
    assert_allclose(shell_eigenfunction(ShellSpec(2, 1.0, 2.0), 1.0, 2.0), math.log(2.0) + 1.0, rtol=1e-14)
    assert_allclose(shell_eigenfunction(ShellSpec(3, 1.0, 2.0), 1.0, 1.0), 1.0, rtol=1e-14)
    assert shell_eigenfunction(ShellSpec(2, 1.0, 2.0), 1e12, 1.0) < 1e-11


def test_eigenfunction_outside_shell():
    with pytest.raises(ParameterDomainError):
        shell_eigenfunction(ShellSpec(2, 1.0, 2.0), 1.0, 2.5)


def test_coefficients_match_profile():
    spec = ShellSpec(4, 0.5, 1.5)
    eigen = shell_coefficients(spec, 2.0)
    for s in (0.5, 1.0, 1.5):
        assert_allclose(eigen.profile(spec.n, s), shell_eigenfunction(spec, 2.0, s), rtol=1e-13)


@pytest.mark.parametrize("n", DIMENSIONS)
@pytest.mark.parametrize("ratio", RATIOS)
@pytest.mark.parametrize("beta", BETAS)
def test_boundary_conditions_hold(n, ratio, beta):
    spec = ShellSpec(n, ratio, 1.0)
    robin, steklov = shell_bc_residuals(spec, beta)
    sigma = sigma_beta_shell(spec, beta)
    assert robin <= 1e-12 * max(1.0, sigma)
    assert steklov <= 1e-12 * max(1.0, sigma)


@pytest.mark.parametrize("n", DIMENSIONS)
@pytest.mark.parametrize("ratio", RATIOS)
@pytest.mark.parametrize("beta", BETAS)
def test_harmonic_splitting_identity_on_shells(n, ratio, beta):
    spec = ShellSpec(n, ratio, 1.0)
    assert abs(shell_identity_kutt40(spec, beta)) <= 1e-12 / sigma_beta_shell(spec, beta)


def test_q_shell():
    assert_allclose(q_shell(ShellSpec(2, 1.0, 2.0)), 0.5)
    assert_allclose(q_shell(ShellSpec(3, 1.0, 2.0)), 0.25)
    assert q_shell(ShellSpec(2, 1.0 - 1e-9, 1.0)) > 1.0 - 1e-8


@pytest.mark.parametrize("n", DIMENSIONS)
@pytest.mark.parametrize("ratio", RATIOS)
def test_small_beta_slope(n, ratio):
    spec = ShellSpec(n, ratio, 1.0)
    slope = shell_small_beta_slope(spec)
    assert_allclose(slope, ratio ** (n - 1))
    assert abs(sigma_beta_shell(spec, 1e-4) / 1e-4 - slope) / slope <= 1e-3


def test_uncorrected_formula_fails_robin_condition():
    spec = ShellSpec(3, 1.0, 2.0)
    robin, _ = shell_bc_residuals_uncorrected(spec, 1.0)
    assert_allclose(robin, 0.5, rtol=1e-14)
    corrected, _ = shell_bc_residuals(spec, 1.0)
    assert corrected < 1e-14


def test_uncorrected_formula_has_wrong_slope():
    spec = ShellSpec(3, 1.0, 2.0)
    slope = sigma_beta_shell_uncorrected(spec, 1e-8) / 1e-8
    assert_allclose(slope, 0.5, rtol=1e-6)
    assert abs(slope - shell_small_beta_slope(spec)) > 0.2


def test_uncorrected_formula_agrees_in_the_plane():
    spec = ShellSpec(2, 0.3, 1.7)
    assert sigma_beta_shell_uncorrected(spec, 3.0) == sigma_beta_shell(spec, 3.0)


@pytest.mark.parametrize("args", [(1, 1.0, 2.0), (2, 0.0, 2.0), (2, 2.0, 1.0), (2, 1.0, 1.0), (2.5, 1.0, 2.0),
                                  (2, float("inf"), 2.0)])
def test_invalid_shell(args):
    with pytest.raises(ParameterDomainError):
        ShellSpec(*args)


@pytest.mark.parametrize("beta", [0.0, -1.0, float("nan")])
def test_invalid_beta(beta):
    with pytest.raises(ParameterDomainError):
        sigma_beta_shell(ShellSpec(2, 1.0, 2.0), beta)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 6), ratio=st.floats(0.05, 0.95), beta=st.floats(1e-3, 1e3),
       factor=st.floats(1.01, 10.0))
def test_monotone_in_beta_and_below_dirichlet(n, ratio, beta, factor):
    spec = ShellSpec(n, ratio, 1.0)
    low = sigma_beta_shell(spec, beta)
    high = sigma_beta_shell(spec, beta * factor)
    assert 0.0 < low < high < sigma_dirichlet_shell(spec)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 6), ratio=st.floats(0.05, 0.95), beta=st.floats(1e-2, 1e2))
def test_profile_positive_and_increasing(n, ratio, beta):
    spec = ShellSpec(n, ratio, 1.0)
    radii = [ratio + (1.0 - ratio) * k / 10.0 for k in range(11)]
    values = [shell_eigenfunction(spec, beta, min(s, 1.0)) for s in radii]
    assert values[0] > 0.0
    assert all(b > a for a, b in zip(values, values[1:]))


def test_degeneration_as_hole_shrinks():
    values = [sigma_beta_shell(ShellSpec(2, r, 1.0), 1.0) for r in (0.5, 1e-2, 1e-4, 1e-8)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-7
