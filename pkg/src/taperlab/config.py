"""Run configuration loaded from JSON.

Example::

    {
      "f0_hz": [4e9, 5e9],
      "t_hb": 4,
      "sigma": 0.1,
      "grid": {"n_min": 101, "n_max": 901, "n_step": 50},
      "objective": {"form": "squared", "normalize": true, "domain": "linear"},
      "gating": {"distance_m": 1.5, "rect_width_s": 2e-9},
      "seed": 7,
      "paths": {"sweep": "sweep.csv", "reference": "ref.csv"}
    }

Unknown keys are rejected so that typos do not silently fall back to defaults.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import LoadError
from .tuner import SearchGrid


@dataclass(frozen=True)
class ObjectiveConfig:
    form: str = "squared"
    normalize: bool = True
    domain: str = "linear"


@dataclass(frozen=True)
class GatingConfig:
    distance_m: Optional[float] = None
    rect_width_s: float = 2e-9
    hann_width_s: float = 4e-9
    hann_center_s: Optional[float] = None
    rel_start: float = 0.5
    rel_stop: float = 0.25
    taper_fraction: float = 0.25


@dataclass(frozen=True)
class RunConfig:
    f0_hz: tuple = ()
    bandwidth_hz: Optional[float] = None
    t_hb: float = 4.0
    sigma: float = 0.1
    grid: SearchGrid = field(default_factory=SearchGrid)
    objective: ObjectiveConfig = field(default_factory=ObjectiveConfig)
    gating: GatingConfig = field(default_factory=GatingConfig)
    er_normalization: str = "peak"
    seed: int = 0
    paths: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        nested = {"grid": SearchGrid, "objective": ObjectiveConfig, "gating": GatingConfig}
        try:
            for key, kind in nested.items():
                if key in d:
                    d[key] = (kind.from_dict(d[key]) if hasattr(kind, "from_dict")
                              else kind(**d[key]))
            if "f0_hz" in d:
                f0 = d["f0_hz"]
                d["f0_hz"] = tuple(float(x) for x in (f0 if isinstance(f0, list) else [f0]))
            return cls(**d)
        except TypeError as exc:
            raise LoadError(f"invalid configuration: {exc}") from None

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise LoadError(f"{path}: {exc}") from None
        if not isinstance(d, dict):
            raise LoadError(f"{path}: top level must be a JSON object")
        return cls.from_dict(d)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)
