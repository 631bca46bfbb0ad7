# coding=utf-8
"""
General utility scripts used throughout the package
"""
import numpy as np

from pysteklov.errors import ParameterDomainError

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"


def relative_error(approx, exact):
    """
    |approx - exact| / |exact|

    Parameters
    ----------
    approx : numerical
        computed value(s)
    exact : numerical
        reference value(s), nonzero

    Returns
    -------
    numerical

    Examples
    --------
    >>> relative_error(1.01, 1.0)
    0.01...
    """
    return np.abs(np.asarray(approx, dtype=float) - exact) / np.abs(exact)


def convergence_orders(errors, exact_floor=1e-13):
    """
    Observed orders log2(e_k / e_{k+1}) between consecutive halvings of h

    Errors at round-off level carry no rate; their orders are reported as NaN.

    Parameters
    ----------
    errors : sequence of float
        errors on successively refined meshes
    exact_floor : float
        errors at or below this value count as exact

    Returns
    -------
    ndarray
        one order per consecutive pair
    """
    errors = np.asarray(errors, dtype=float)
    coarse, fine = errors[:-1], errors[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log2(coarse / fine)
    resolvable = (coarse > exact_floor) & (fine > exact_floor)
    return np.where(resolvable, orders, np.nan)


def fitted_order(h_values, errors):
    """Least-squares slope of log(error) against log(h)."""
    h_values = np.asarray(h_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = errors > 0.0
    if keep.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(h_values[keep]), np.log(errors[keep]), 1)
    return float(slope)


def worst_step_ratio(values, increasing=True):
    """
    Largest ratio against the requested monotone direction

    For an increasing sequence returns max_k values[k] / values[k+1] (< 1 when strictly increasing); for a decreasing
        one max_k values[k+1] / values[k].
    """
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return 0.0
    if increasing:
        return float(np.max(values[:-1] / values[1:]))
    return float(np.max(values[1:] / values[:-1]))


def parse_geometric_grid(text):
    """
    Parse ``lo:hi:count`` into count geometrically spaced values

    Examples
    --------
    >>> parse_geometric_grid("1e-4:1e4:9")
    array([1.e-04, 1.e-03, 1.e-02, 1.e-01, 1.e+00, 1.e+01, 1.e+02, 1.e+03, 1.e+04])
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise ParameterDomainError(f"expected lo:hi:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ParameterDomainError(f"expected lo:hi:count, got {text!r}") from None
    if not (0.0 < lo < hi) or count < 2:
        raise ParameterDomainError(f"grid needs 0 < lo < hi and count >= 2, got {text!r}")
    grid = np.geomspace(lo, hi, count)
    # exact decades when the endpoints are powers of ten
    exponents = np.log10(grid)
    rounded = np.round(exponents)
    decades = np.isclose(exponents, rounded, rtol=0.0, atol=1e-9)
    grid[decades] = 10.0 ** rounded[decades]
    return grid


def parse_float_list(text):
    """Parse ``a,b,c`` into a list of floats."""
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ParameterDomainError(f"expected comma separated numbers, got {text!r}") from None
    if not values:
        raise ParameterDomainError("empty list")
    return values


def format_table(frame, float_format="{:.7g}"):
    """Fixed-width text rendering of a DataFrame for terminal output."""
    return frame.to_string(index=False, float_format=lambda v: float_format.format(v))

