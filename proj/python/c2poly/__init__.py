"""Polynomial inequalities on C2 planar domains: nets, discretization, cubature."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import run_experiment as _run_experiment

INF = float("inf")


def run(config, out_dir="."):
    """Run one experiment from a config dict; returns (files, summary dict)."""
    files, summary = _run_experiment(_json.dumps(config), str(out_dir))
    return files, _json.loads(summary)
