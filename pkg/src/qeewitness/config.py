"""Run configuration: a JSON document of nested sections plus dotted overrides."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .errors import ValidationError
from .nvbath import GAMMA_E, GAMMA_N_C13, ContactModel, LatticeConfig
from .protocol import TimeGrid

_FIELD_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*(T|G|mT|tesla|gauss)?\s*$")
_TO_TESLA = {"T": 1.0, "tesla": 1.0, "G": 1e-4, "gauss": 1e-4, "mT": 1e-3}


def parse_field(value) -> float:
    """Magnetic field in tesla from a number (tesla) or a string such as ``"200 G"``."""
    if isinstance(value, bool):
        raise ValidationError(f"bad field value {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    m = _FIELD_RE.match(str(value))
    if not m:
        raise ValidationError(f"cannot parse magnetic field {value!r}; use e.g. '200 G' or '0.02 T'")
    return float(m.group(1)) * _TO_TESLA[m.group(2) or "T"]


@dataclass(frozen=True)
class PolarizationConfig:
    r_p: float = 0.9
    p_inner: float = 1.0


@dataclass(frozen=True)
class NoiseConfig:
    kind: str = "ornstein-uhlenbeck"
    sigma: float = 1.0
    corr_time: float = 1.0
    mean: float = 0.0
    dt: float = 0.01
    duration: float = 5.0
    count: int = 10000
    tau: float = 0.0


@dataclass(frozen=True)
class ToleranceConfig:
    qee: float = 1e-9
    echo: float = 1e-10


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    b_z: float = 0.02
    gamma_e: float = GAMMA_E
    gamma_n: float = GAMMA_N_C13
    threads: int = 1
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    contact: ContactModel = field(default_factory=ContactModel)
    polarization: PolarizationConfig = field(default_factory=PolarizationConfig)
    grid: TimeGrid = field(default_factory=TimeGrid)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    tolerance: ToleranceConfig = field(default_factory=ToleranceConfig)

    def __post_init__(self):
        if self.b_z <= 0 or self.gamma_e <= 0 or self.gamma_n <= 0:
            raise ValidationError("b_z, gamma_e and gamma_n must be positive")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        # one seed drives the whole run
        object.__setattr__(self, "lattice", replace(self.lattice, seed=int(self.seed)))

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("b_z")
        d["field"] = f"{self.b_z!r} T"
        d["lattice"].pop("seed")
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


_SECTIONS = {"lattice": LatticeConfig, "contact": ContactModel, "polarization": PolarizationConfig,
             "grid": TimeGrid, "noise": NoiseConfig, "tolerance": ToleranceConfig}
_SCALARS = {"seed": int, "threads": int, "gamma_e": float, "gamma_n": float}


def _coerce(cls, key, value):
    types = {f.name: f.type for f in fields(cls)}
    if key not in types:
        raise ValidationError(f"unknown key {key!r} in section {cls.__name__}")
    kind = types[key] if isinstance(types[key], str) else types[key].__name__
    try:
        if kind == "bool":
            if isinstance(value, str):
                return value.lower() in ("1", "true", "yes", "on")
            return bool(value)
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        return value
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad value for {key!r}: {value!r}") from exc


def from_dict(d: dict) -> RunConfig:
    kwargs = {}
    for key, value in d.items():
        if key == "field":
            kwargs["b_z"] = parse_field(value)
        elif key in _SCALARS:
            try:
                kwargs[key] = _SCALARS[key](value)
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"bad value for {key!r}: {value!r}") from exc
        elif key in _SECTIONS:
            cls = _SECTIONS[key]
            if not isinstance(value, dict):
                raise ValidationError(f"section {key!r} must be a mapping")
            kwargs[key] = cls(**{k: _coerce(cls, k, v) for k, v in value.items()})
        else:
            raise ValidationError(f"unknown config key {key!r}")
    try:
        return RunConfig(**kwargs)
    except TypeError as exc:
        raise ValidationError(str(exc)) from exc


def loads(text: str) -> RunConfig:
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from exc
    return from_dict(data)


def load(path) -> RunConfig:
    return loads(Path(path).read_text())


def apply_overrides(cfg: RunConfig, overrides) -> RunConfig:
    """Apply ``section.key=value`` / ``key=value`` strings on top of ``cfg``."""
    d = cfg.to_dict()
    for item in overrides:
        if "=" not in item:
            raise ValidationError(f"override {item!r} is not key=value")
        path, value = item.split("=", 1)
        parts = path.strip().split(".")
        node = d
        for p in parts[:-1]:
            if p not in node or not isinstance(node[p], dict):
                raise ValidationError(f"unknown config section {p!r}")
            node = node[p]
        node[parts[-1]] = value.strip()
    return from_dict(d)
