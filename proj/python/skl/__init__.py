"""Python interface to the spectral kernel laboratory."""

import json

from . import _core
from ._core import (
    SklError,
    chebyshev_first,
    fejer,
    fourier_h,
    kernel_k,
    laplace_defect,
    profile_h,
    profile_q,
    tree_transform,
    truncated_transform,
)

__all__ = [
    "SklError",
    "chebyshev_first",
    "design_tree_kernel",
    "fejer",
    "fourier_h",
    "kernel_k",
    "laplace_defect",
    "profile_h",
    "profile_q",
    "projection_bound",
    "propagation_closed_form",
    "run",
    "tree_transform",
    "truncated_transform",
]


def propagation_closed_form(p, n):
    """P_n(T_p/2) applied to the root delta, as a decoded JSON radial function."""
    return json.loads(_core.propagation_closed_form(p, n))


def design_tree_kernel(p, eta, N, theta0):
    """Designed tree kernel with its property report."""
    return json.loads(_core.design_tree_kernel(p, eta, N, theta0))


def projection_bound(components, r, omega):
    """Projection bound report for a Laplace decomposition [(r_i, c_i), ...]."""
    return json.loads(_core.projection_bound(list(components), r, omega))


def run(command, **options):
    """Run a harness command. Returns (report dict, passed, csv text)."""
    config = dict(options)
    config["command"] = command
    if "r_target" in config:
        config["r_target"] = [str(r) for r in config["r_target"]]
    report, passed, csv = _core.run_command(json.dumps(config))
    return json.loads(report), passed, csv
