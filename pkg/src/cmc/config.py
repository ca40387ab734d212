"""Run configuration shared by the command line and the library entry points."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, DomainError


@dataclass(frozen=True)
class RunConfig:
    # beta-bar certification: grid spacing 2h / beta_divisions, scan stops at beta_cap_multiple * 2h
    beta_divisions: int = 64
    beta_cap_multiple: float = 4.0
    # admissibility
    alpha_fraction: float = 0.9
    sphere_oversample: int = 16
    barrier_rho_max: float = 14.0
    containment_tol: float = 1e-9
    # solver
    slack: float = 1e-6
    newton_tol: float = 1e-8
    newton_max_iter: int = 30
    damping_floor: float = 1.0 / 64.0
    sigma_step: float = 0.25
    sigma_step_min: float = 1e-3
    sigma_step_max: float = 0.5
    grad_ceiling_factor: float = 10.0
    cone_margin: float = 1e-3
    n_s: int = 64
    n_theta: int = 128
    grid_map: str = "quadratic"

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name.endswith("_tol") or f.name in ("slack", "damping_floor", "sigma_step", "sigma_step_min",
                                                       "sigma_step_max", "grad_ceiling_factor", "cone_margin"):
                if not v > 0:
                    raise DomainError(f"config '{f.name}' must be positive, got {v}")
        if self.n_s < 8 or self.n_theta < 8:
            raise DomainError("grid sizes must be at least 8")
        if self.grid_map not in ("linear", "quadratic"):
            raise DomainError(f"unknown grid_map {self.grid_map!r}")

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ParseError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ParseError(f"bad config value: {exc}") from exc


def load_config(path) -> RunConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: config must be a JSON object")
    return RunConfig.from_dict(data)
