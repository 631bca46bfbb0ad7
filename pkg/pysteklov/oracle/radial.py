# coding=utf-8
"""
Closed-form Steklov-Robin eigenpairs of spherical shells A_{r,R} = {r < |x| < R} in dimension n >= 2

The first eigenfunction of a shell is radial, v(s) = c1 log s + c2 (n = 2) or v(s) = c1 s^(2-n) + c2 (n >= 3),
    and the two boundary conditions

        v'(r) = beta v(r)        (Robin on the hole, outward normal points to the origin)
        v'(R) = sigma v(R)       (Steklov on the outer sphere)

    fix sigma. For n >= 3 the widely quoted closed form carries the exponent n-2 on the beta term; solving the
    2x2 system exactly gives n-1 instead. Both are provided here: the consistent form drives every other module
    and the ``*_uncorrected`` variants exist so the discrepancy stays pinned by tests.
"""
import logging
import math
from dataclasses import dataclass

from pysteklov.errors import ParameterDomainError

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShellSpec:
    """
    Spherical shell A_{r,R} in dimension n

    Parameters
    ----------
    n : int
        space dimension, n >= 2
    r : float
        inner (hole) radius, r > 0
    R : float
        outer radius, R > r
    """
    n: int
    r: float
    R: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ParameterDomainError(f"dimension must be an integer >= 2, got {self.n!r}")
        if not (math.isfinite(self.r) and math.isfinite(self.R)):
            raise ParameterDomainError("radii must be finite")
        if self.r <= 0:
            raise ParameterDomainError(f"inner radius must be positive, got {self.r}")
        if self.r >= self.R:
            raise ParameterDomainError(f"inner radius {self.r} must be smaller than outer radius {self.R}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "R", float(self.R))


@dataclass(frozen=True)
class ShellEigen:
    """First eigenvalue and radial profile coefficients of a shell."""
    sigma: float
    c1: float
    c2: float

    def profile(self, n, s):
        if n == 2:
            return self.c1 * math.log(s) + self.c2
        return self.c1 * s ** (2 - n) + self.c2


def _check_beta(beta):
    beta = float(beta)
    if not (beta > 0) or math.isnan(beta):
        raise ParameterDomainError(f"Robin weight must be positive, got {beta}")
    return beta


def sigma_beta_shell(spec, beta):
    """
    First Steklov-Robin eigenvalue of the shell

    Parameters
    ----------
    spec : ShellSpec
        the shell
    beta : float
        constant Robin weight on the inner sphere, beta > 0

    Returns
    -------
    float
        sigma_beta(A_{r,R}), strictly increasing in beta, below sigma_dirichlet_shell(spec)

    Examples
    --------
    >>> sigma_beta_shell(ShellSpec(2, 1.0, 2.0), 1.0)
    0.29530805...
    """
    beta = _check_beta(beta)
    n, r, R = spec.n, spec.r, spec.R
    if n == 2:
        return 1.0 / (R / (beta * r) + R * math.log(R / r))
    ratio = R / r
    return (n - 2) / (((n - 2) / beta) * ratio ** (n - 1) + R * (ratio ** (n - 2) - 1.0))


def sigma_dirichlet_shell(spec):
    """
    First Steklov-Dirichlet eigenvalue of the shell, the beta -> infinity limit of sigma_beta_shell
    """
    n, r, R = spec.n, spec.r, spec.R
    if n == 2:
        return 1.0 / (R * math.log(R / r))
    return (n - 2) / (R * ((R / r) ** (n - 2) - 1.0))


def shell_eigenfunction(spec, beta, s):
    """
    Radial profile of the first eigenfunction at radius s

    The profile is positive and strictly increasing on [r, R]. At s = r it equals the Robin trace 1/(beta r)
        for n = 2 and (n-2)/(beta r^(n-1)) for n >= 3.

    Parameters
    ----------
    spec : ShellSpec
    beta : float
    s : float
        radius in [r, R]

    Returns
    -------
    float
    """
    beta = _check_beta(beta)
    n, r, R = spec.n, spec.r, spec.R
    s = float(s)
    if not (r <= s <= R):
        raise ParameterDomainError(f"radius {s} outside the shell [{r}, {R}]")
    if n == 2:
        return math.log(s / r) + 1.0 / (beta * r)
    return 1.0 / r ** (n - 2) - 1.0 / s ** (n - 2) + (n - 2) / (beta * r ** (n - 1))


def shell_eigenfunction_derivative(spec, s):
    """d/ds of shell_eigenfunction (independent of beta)."""
    n = spec.n
    if n == 2:
        return 1.0 / s
    return (n - 2) / s ** (n - 1)


def shell_coefficients(spec, beta):
    """
    Eigenvalue and profile coefficients (c1, c2) of the first eigenpair

    Returns
    -------
    ShellEigen
        v(s) = c1 log s + c2 for n = 2, v(s) = c1 s^(2-n) + c2 for n >= 3
    """
    beta = _check_beta(beta)
    n, r = spec.n, spec.r
    sigma = sigma_beta_shell(spec, beta)
    if n == 2:
        return ShellEigen(sigma=sigma, c1=1.0, c2=-math.log(r) + 1.0 / (beta * r))
    return ShellEigen(sigma=sigma, c1=-1.0, c2=1.0 / r ** (n - 2) + (n - 2) / (beta * r ** (n - 1)))


def shell_bc_residuals(spec, beta):
    """
    Boundary-condition residuals of the implemented eigenpair

    The profile is scaled to v(R) = 1 before the residuals are formed, so the numbers are comparable across
        the whole (n, r/R, beta) range.

    Returns
    -------
    tuple of float
        (|-v'(r) + beta v(r)|, |v'(R) - sigma v(R)|)
    """
    beta = _check_beta(beta)
    sigma = sigma_beta_shell(spec, beta)
    scale = shell_eigenfunction(spec, beta, spec.R)
    v_r = shell_eigenfunction(spec, beta, spec.r) / scale
    dv_r = shell_eigenfunction_derivative(spec, spec.r) / scale
    dv_R = shell_eigenfunction_derivative(spec, spec.R) / scale
    robin = abs(-dv_r + beta * v_r)
    steklov = abs(dv_R - sigma * 1.0)
    logger.debug("shell residuals n=%d r=%g R=%g beta=%g: robin=%.3e steklov=%.3e",
                 spec.n, spec.r, spec.R, beta, robin, steklov)
    return robin, steklov


def q_shell(spec):
    """Harmonic-extension quotient q(A_{r,R}) = (r/R)^(n-1), attained by the constant mode."""
    return (spec.r / spec.R) ** (spec.n - 1)


def shell_small_beta_slope(spec):
    """Limit of sigma_beta / beta as beta -> 0, the perimeter ratio P(B_r)/P(B_R)."""
    return q_shell(spec)


def shell_identity_kutt40(spec, beta):
    """
    Signed residual 1/sigma_beta - 1/sigma_D - 1/(beta q) of the harmonic-splitting bound

    The bound is attained by shells, so the residual vanishes up to round-off.
    """
    beta = _check_beta(beta)
    return (1.0 / sigma_beta_shell(spec, beta)
            - 1.0 / sigma_dirichlet_shell(spec)
            - 1.0 / (beta * q_shell(spec)))


def sigma_beta_shell_uncorrected(spec, beta):
    """
    Commonly printed n >= 3 closed form, with exponent n-2 on the beta term

    It fails the Robin condition and its small-beta slope is (r/R)^(n-2) instead of (r/R)^(n-1).
        For n = 2 it coincides with sigma_beta_shell.
    """
    beta = _check_beta(beta)
    n, r, R = spec.n, spec.r, spec.R
    if n == 2:
        return sigma_beta_shell(spec, beta)
    ratio = R / r
    return (n - 2) / (((n - 2) / beta) * ratio ** (n - 2) + R * (ratio ** (n - 2) - 1.0))


def shell_bc_residuals_uncorrected(spec, beta):
    """
    Residuals of the commonly printed n >= 3 eigenpair

    The profile is v(s) = c2 - 1/s^(n-2) with c2 = 1/r^(n-2) + (n-2)/(beta R r^(n-2)), unscaled, paired with
        sigma_beta_shell_uncorrected. Its Robin residual is (n-2)(1/r^(n-1) - 1/(R r^(n-2))).

    Returns
    -------
    tuple of float
        (robin_residual, steklov_residual)
    """
    beta = _check_beta(beta)
    n, r, R = spec.n, spec.r, spec.R
    if n == 2:
        return shell_bc_residuals(spec, beta)
    c2 = 1.0 / r ** (n - 2) + (n - 2) / (beta * R * r ** (n - 2))

    def v(s):
        return c2 - 1.0 / s ** (n - 2)

    sigma = sigma_beta_shell_uncorrected(spec, beta)
    robin = abs(-shell_eigenfunction_derivative(spec, r) + beta * v(r))
    steklov = abs(shell_eigenfunction_derivative(spec, R) - sigma * v(R))
    return robin, steklov
