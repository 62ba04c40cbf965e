"""Experiment configuration shared by the command-line tools."""
from __future__ import annotations

import copy
import json
import os
from pathlib import Path

from .grid import ContractError, Grid2D, QuadratureScheme, TimeQuadrature

__all__ = ["DEFAULTS", "ExperimentConfig", "worker_count"]

DEFAULTS = {
    "grid": {"n_points": 64, "half_width": 10.0},
    "time_quadrature": {"scheme": "TangentMappedLegendre", "n_nodes": 129, "scale": 0.5, "t_max": 10.0},
    "solver": {"max_iter": 300, "tol": 1e-7, "omega_tol": 1e-10, "init": "random", "seed": None,
               "renormalize_scale": True},
    "analysis": {"s": 2.0, "s_list": [2.0, 3.0, 5.0], "mu": None, "eps_list": [1.0, 0.1, 0.01, 0.001],
                 "annulus": None},
    "sweep": {"s": 1.0, "N_list": [4, 16, 64, 256], "seeds": [0, 1, 2], "n_points": 2048,
              "half_width": 9.42477796076938, "subcells": 3},
    "io": {"out_path": "run", "format": "json"},
}


def _merge(base: dict, extra: dict, where="") -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if k not in out:
            raise ContractError(f"unknown config key {where}{k}")
        if isinstance(out[k], dict):
            if not isinstance(v, dict):
                raise ContractError(f"config section {where}{k} must be an object")
            out[k] = _merge(out[k], v, f"{where}{k}.")
        else:
            out[k] = v
    return out


def worker_count() -> int:
    """Thread count from ``STRZ_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("STRZ_THREADS", "1")))
    except ValueError as exc:
        raise ContractError("STRZ_THREADS must be an integer") from exc


class ExperimentConfig:
    """Nested configuration; unknown keys and non-positive sizes are rejected."""

    def __init__(self, data: dict | None = None):
        self.data = _merge(DEFAULTS, data or {})
        self._validate()

    def __getitem__(self, key):
        return self.data[key]

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls(json.loads(Path(path).read_text()))

    def updated(self, overrides: dict) -> "ExperimentConfig":
        return ExperimentConfig(_merge(self.data, overrides))

    def _validate(self):
        d = self.data
        for sec, keys in (("grid", ("n_points", "half_width")),
                          ("time_quadrature", ("n_nodes", "scale", "t_max")),
                          ("solver", ("max_iter", "tol", "omega_tol")),
                          ("sweep", ("s", "n_points", "half_width", "subcells"))):
            for k in keys:
                v = d[sec][k]
                if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                    raise ContractError(f"{sec}.{k} must be a positive number, got {v!r}")
        n = d["grid"]["n_points"]
        if not isinstance(n, int) or n % 2 or n < 8:
            raise ContractError(f"grid.n_points must be an even integer >= 8, got {n!r}")
        QuadratureScheme(d["time_quadrature"]["scheme"])
        if d["io"]["format"] != "json":
            raise ContractError("io.format must be 'json'")

    def grid(self) -> Grid2D:
        return Grid2D(self.data["grid"]["n_points"], float(self.data["grid"]["half_width"]))

    def quadrature(self) -> TimeQuadrature:
        tq = self.data["time_quadrature"]
        if tq["scheme"] == QuadratureScheme.UNIFORM_TRUNCATED.value:
            return TimeQuadrature.uniform_truncated(tq["n_nodes"], float(tq["t_max"]))
        return TimeQuadrature.tangent_legendre(tq["n_nodes"], float(tq["scale"]))

    def as_dict(self) -> dict:
        return copy.deepcopy(self.data)
