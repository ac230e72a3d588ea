"""Named run configurations reproducing the reference parameter sets."""

from __future__ import annotations

import copy

_BASE_MODEL = {
    "type": "ejdcev",
    "beta": -1.0,
    "gamma": 2.0,
    "b": 0.02,
    "c": 0.5,
    "rbar": 0.1,
    "qbar": 0.0,
    "sigma0": 0.25,
    "y0": 100.0,
}

_BASE_CONTRACT = {
    "style": "call",
    "K": 100.0,
    "L": 90.0,
    "U": 120.0,
    "T": 0.5,
    "rebate": 0.0,
}

_BASE_NUMERICS = {
    "mesh_points": 10001,
    "nsbf_order": None,
    "nsbf_order_cap": 60,
    "omega_max": 15.0,
    "omega_grid_count": 100,
    "refine_tol": 1e-12,
    "lambda_decay_cap": 35.0,
    "lambda_cutoff": None,
    "n_max": None,
}

_BASE_OUTPUT = {"format": "json", "path": None}

PRESETS = {
    # six-month horizon: a handful of eigenvalues inside omega < 15 suffice
    "table1-medium": {
        "model": dict(_BASE_MODEL),
        "contract": dict(_BASE_CONTRACT),
        "numerics": dict(_BASE_NUMERICS),
        "output": dict(_BASE_OUTPUT),
        "sweep": {
            "K": [95.0, 100.0, 105.0],
            "beta": [0.5, 0.0, -1.0, -2.0],
            "gamma": [0.0, 1.0, 2.0],
        },
    },
    # one-day horizon: slow exponential decay, wide omega window, N ~ 45
    "table3-short": {
        "model": dict(_BASE_MODEL, beta=-2.0),
        "contract": dict(_BASE_CONTRACT, T=1.0 / 360.0),
        "numerics": dict(_BASE_NUMERICS, omega_max=100.0, omega_grid_count=1000),
        "output": dict(_BASE_OUTPUT),
        "sweep": {
            "K": [100.0],
            "beta": [-2.0, 1.0],
            "gamma": [3.0, 2.0, 1.0, 0.0],
        },
        "bands": [[1, 5], [6, 10], [11, 15], [16, 20], [21, 25],
                  [26, 30], [31, 35], [36, 40], [41, 45], [46, None]],
    },
}


def preset(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return copy.deepcopy(PRESETS[name])


def default_config() -> dict:
    cfg = preset("table1-medium")
    cfg.pop("sweep", None)
    return cfg
