"""Thermalized Davydov D2 ensemble dynamics.

Configurations are plain dicts with the same layout as the JSON files read
by ``davydov-sim``; a path to such a file is accepted as well.
"""

import json
import os

from ._core import (
    DavydovError,
    __version__,
    exciton_basis,
    mode_temperature,
    occupancy,
    recursion_time,
    spectral_density,
    trajectory_seed,
)
from . import _core

__all__ = [
    "DavydovError",
    "__version__",
    "bath_modes",
    "exciton_basis",
    "mode_temperature",
    "occupancy",
    "recursion_time",
    "run",
    "spectral_density",
    "trajectory_seed",
    "validate",
]


def _text(config):
    if isinstance(config, (str, os.PathLike)):
        with open(config, encoding="utf-8") as fh:
            return fh.read()
    return json.dumps(config)


def validate(config, overrides=()):
    """Return (resolved config dict, list of warnings). Raises DavydovError."""
    resolved, warnings = _core.validate(_text(config), list(overrides))
    return json.loads(resolved), warnings


def run(config, overrides=(), threads=0, out_dir=None):
    """Run an ensemble and return a dict of numpy arrays.

    Keys: times, populations (exciton, ascending energy), temperature (per
    site, K), energy (cm^-1), phase_space and phase_space_labels, plus
    trajectories, failures, scatter_events and the resolved config.
    """
    out = _core.run(_text(config), list(overrides), threads, os.fspath(out_dir) if out_dir else "")
    out["config"] = json.loads(out["config"])
    return out


def bath_modes(config):
    """Frequencies (cm^-1) and dimensionless couplings of one site's bath."""
    return _core.bath_modes(_text(config))
