# coding=utf-8
"""
SVG figures of sweeps and convergence tables
"""
import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from pysteklov.tools.io import atomic_write  # noqa: E402
from pysteklov.tools.utilities import fitted_order  # noqa: E402

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

matplotlib.rcParams["svg.hashsalt"] = "pysteklov"
matplotlib.rcParams["svg.fonttype"] = "none"


def _save(fig, path):
    buffer = io.BytesIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    plt.close(fig)
    return atomic_write(path, buffer.getvalue())


def plot_beta_sweep(table, path, title=None):
    """sigma_beta against beta (log x) with the Steklov-Dirichlet level."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(table["beta"], table["sigma_beta"], marker="o", label=r"$\sigma_\beta$")
    ax.axhline(float(table["sigma_D"].iloc[0]), color="grey", linestyle="--", label=r"$\sigma_D$")
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel("eigenvalue")
    ax.set_title(title or "Steklov-Robin eigenvalue against beta")
    ax.legend()
    return _save(fig, path)


def plot_radius_sweep(table, path, title=None):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(table["r"], table["sigma_beta"], marker="o", label=r"$\sigma_\beta(\Omega)$")
    ax.plot(table["r"], table["shell_sigma"], marker="s", linestyle="--", label=r"$\sigma_\beta(A_{r,R_m})$")
    ax.set_xlabel("hole radius r")
    ax.set_ylabel("eigenvalue")
    ax.set_title(title or "Steklov-Robin eigenvalue against hole radius")
    ax.legend()
    return _save(fig, path)


def plot_h1_distance(table, path, title=None):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(table["beta"], table["h1_distance"], marker="o", label=r"$\|u_\beta - v\|_{H^1}$")
    ax.loglog(table["beta"], table["inner_trace"], marker="s", label=r"$\|u_\beta\|_{L^2(\partial B_r)}$")
    ax.set_xlabel(r"$\beta$")
    ax.set_title(title or "eigenfunction convergence")
    ax.legend()
    return _save(fig, path)


def plot_convergence(table, path, columns, title=None):
    """Log-log error against h for each error column, annotated with the fitted slope."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for column in columns:
        errors = np.asarray(table[column], dtype=float)
        if not np.any(errors > 0.0):
            continue
        slope = fitted_order(table["h"], errors)
        ax.loglog(table["h"], errors, marker="o", label=f"{column} (slope {slope:.2f})")
    ax.set_xlabel("h")
    ax.set_ylabel("relative error")
    ax.set_title(title or "mesh convergence")
    ax.legend()
    return _save(fig, path)
