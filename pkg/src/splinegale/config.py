"""Experiment configuration: strict JSON schema with range validation."""

import json
import math
from dataclasses import asdict, dataclass, field, fields

from .errors import InvalidConfig

KNOWN_CHECKS = (
    "shadrin", "doob", "stein", "lepingle", "tower", "jensen", "domination",
    "duality", "h1bmo", "g_props", "phi", "remez", "burkholder", "stability",
    "decay",
)

SWEEP_AXES = ("k", "gamma_max", "levels", "p")

SCHEMA_VERSION = 1


def _num(value):
    if isinstance(value, str) and value.lower() in ("inf", "infinity"):
        return math.inf
    return float(value)


@dataclass
class ExperimentConfig:
    master_seed: int = 0
    k: int = 2
    kprime: int = 2
    levels: int = 8
    gamma_max: float = 4.0
    elementary: bool = True
    trials: int = 50
    p: float = 2.0
    r: float = 2.0
    q: float = 0.7
    tol_quad: float = 1e-10
    grid_size: int = 256
    check: str | None = None
    output: str = "out"
    schema: int = SCHEMA_VERSION
    axis: str | None = None
    axis_values: tuple = ()
    split_range: tuple = (0.25, 0.75)

    def __post_init__(self):
        self.p = _num(self.p)
        self.r = _num(self.r)
        self.axis_values = tuple(self.axis_values)
        self.split_range = tuple(self.split_range)
        self.validate()

    def validate(self):
        if self.schema != SCHEMA_VERSION:
            raise InvalidConfig(f"unsupported schema version {self.schema}")
        if self.k < 1 or self.kprime < 1:
            raise InvalidConfig("spline orders must be >= 1")
        if self.levels < 1:
            raise InvalidConfig("levels must be >= 1")
        if self.gamma_max < 1.0:
            raise InvalidConfig("gamma_max must be >= 1")
        if self.trials < 1:
            raise InvalidConfig("trials must be >= 1")
        if not (self.p >= 1.0 and self.r >= 1.0):
            raise InvalidConfig("p and r must be >= 1")
        if not 0.0 < self.q < 1.0:
            raise InvalidConfig("q must lie in (0, 1)")
        if self.tol_quad <= 0.0:
            raise InvalidConfig("tol_quad must be positive")
        if self.grid_size < 2:
            raise InvalidConfig("grid_size must be >= 2")
        if self.check is not None and self.check not in KNOWN_CHECKS:
            raise InvalidConfig(f"unknown check {self.check!r}")
        if self.axis is not None:
            if self.axis not in SWEEP_AXES:
                raise InvalidConfig(f"unknown sweep axis {self.axis!r}")
            if len(self.axis_values) == 0:
                raise InvalidConfig("axis_values must be a nonempty list")
        lo, hi = self.split_range
        if not (0.0 < lo <= hi < 1.0):
            raise InvalidConfig("split_range must satisfy 0 < lo <= hi < 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidConfig(f"malformed JSON config: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("p", "r"):
            if out[key] == math.inf:
                out[key] = "inf"
        out["axis_values"] = list(out["axis_values"])
        out["split_range"] = list(out["split_range"])
        return out

    def replace(self, **kwargs) -> "ExperimentConfig":
        data = asdict(self)
        data.update(kwargs)
        return ExperimentConfig(**data)
