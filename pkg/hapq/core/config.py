"""
Configuration management for hapq.

Run configs are line-oriented text files::

    # comment
    lattice.chain_spacing = 3.44 Å
    device.gradient = 2e6 G/cm
    simulation.planes = 0 1 2

Values carry unit suffixes and are converted to SI on ingestion. Unknown sections or keys
are rejected.
"""

import math
import os
from pathlib import Path
from typing import Any, Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from hapq.core.exceptions import ConfigError, ConfigMissingError, ConfigUnknownKeyError
from hapq.utils.helpers import parse_bool, parse_quantity

# Load environment variables
load_dotenv()


class LatticeConfig(BaseModel):
    """Configuration for the hydrogen chain lattice."""

    model_config = ConfigDict(extra="forbid")

    chain_spacing: float = Field(default=3.44e-10, gt=0.0)
    chain_separation: float = Field(default=9.42e-10, gt=0.0)
    n_planes: int = Field(default=3, ge=1)
    chain_pattern: Literal["single", "central_plus_six_hex", "explicit"] = Field(default="single")
    chain_offsets: list[tuple[float, float]] = Field(default_factory=list)
    field_axis: tuple[float, float, float] = Field(default=(0.0, 0.0, 1.0))


class DeviceConfig(BaseModel):
    """Configuration for the device plan. Every field is required."""

    model_config = ConfigDict(extra="forbid")

    gradient: float = Field(ge=0.0)
    bandwidth: float = Field(gt=0.0)
    sample_thickness: float = Field(gt=0.0)
    sample_width: float = Field(gt=0.0)
    sample_depth: float = Field(gt=0.0)
    strategy: Literal["nn", "nnn"]
    broadening: float | None = Field(default=None, ge=0.0)


class SimulationConfig(BaseModel):
    """Configuration for cluster simulations."""

    model_config = ConfigDict(extra="forbid")

    planes: list[int] | None = Field(default=None)
    chains: list[int] | None = Field(default=None)
    cutoff: float = Field(default=0.0, ge=0.0)
    gradient: float = Field(default=0.0, ge=0.0)
    carrier_plane: int = Field(default=0, ge=0)
    dipolar_form: Literal["auto", "full_secular", "zz_truncated", "interplane_zz"] = Field(default="auto")
    amplitude_ratio: float = Field(default=50.0, gt=0.0)
    sweep_ratios: list[float] = Field(default_factory=lambda: [10.0, 20.0, 50.0, 100.0])
    n_cycles: int = Field(default=10, ge=1)
    mrev8_tau: float = Field(default=5e-6, gt=0.0)
    mrev8_offset: float = Field(default=1000.0, gt=0.0)
    recouple_amplitude: float = Field(default=100e3, gt=0.0)
    plane_a: int = Field(default=0, ge=0)
    plane_b: int = Field(default=2, ge=0)
    tolerance: float = Field(default=1e-6, gt=0.0)
    trotter_steps: int = Field(default=64, ge=1)
    symmetrized: bool = Field(default=True)
    finite_pulses: bool = Field(default=False)
    selective_amplitude: float = Field(default=50.0, gt=0.0)
    sequence: Literal["lg", "mrev8", "recouple", "file"] = Field(default="lg")
    sequence_file: str | None = Field(default=None)


class OutputConfig(BaseModel):
    """Configuration for report output."""

    model_config = ConfigDict(extra="forbid")

    directory: str = Field(default="reports")
    format: Literal["csv", "json", "both"] = Field(default="both")


class LoggingConfig(BaseModel):
    """Configuration for logging."""

    model_config = ConfigDict(extra="forbid")

    level: str = Field(default="INFO")
    file: str = Field(default="")


def _split_list(text: str) -> list[str]:
    return [item for item in text.replace(",", " ").split() if item]


def _lengths(text: str) -> list[float]:
    """Parse ``"0 0; 9.42 0 Å"`` style offset lists. One trailing unit applies to every number; Å if absent."""
    unit = "Å"
    body = text.strip()
    for suffix in ("angstrom", "nm", "um", "µm", "Å", "A", "m"):
        if body.endswith(suffix):
            unit, body = suffix, body[: -len(suffix)]
            break
    return [parse_quantity(f"{item} {unit}", "length") for item in _split_list(body.replace(";", " "))]


# Per-section value parsers. Keys missing from these tables are unknown keys.
_LATTICE_PARSERS: dict[str, Any] = {
    "chain_spacing": lambda v: parse_quantity(v, "length"),
    "chain_separation": lambda v: parse_quantity(v, "length"),
    "n_planes": int,
    "chain_pattern": str.strip,
    "chain_offsets": lambda v: [tuple(pair) for pair in zip(*[iter(_lengths(v))] * 2)],
    "field_axis": lambda v: tuple(float(x) for x in _split_list(v)),
}
_DEVICE_PARSERS: dict[str, Any] = {
    "gradient": lambda v: parse_quantity(v, "gradient"),
    "bandwidth": lambda v: parse_quantity(v, "frequency"),
    "sample_thickness": lambda v: parse_quantity(v, "length"),
    "sample_width": lambda v: parse_quantity(v, "length"),
    "sample_depth": lambda v: parse_quantity(v, "length"),
    "strategy": str.strip,
    "broadening": lambda v: parse_quantity(v, "frequency"),
}
_SIMULATION_PARSERS: dict[str, Any] = {
    "planes": lambda v: [int(x) for x in _split_list(v)],
    "chains": lambda v: [int(x) for x in _split_list(v)],
    "cutoff": lambda v: math.inf if v.strip().lower() in {"inf", "infinity"} else parse_quantity(v, "frequency"),
    "gradient": lambda v: parse_quantity(v, "gradient"),
    "carrier_plane": int,
    "dipolar_form": str.strip,
    "amplitude_ratio": float,
    "sweep_ratios": lambda v: [float(x) for x in _split_list(v)],
    "n_cycles": int,
    "mrev8_tau": lambda v: parse_quantity(v, "time"),
    "mrev8_offset": lambda v: parse_quantity(v, "frequency"),
    "recouple_amplitude": lambda v: parse_quantity(v, "frequency"),
    "plane_a": int,
    "plane_b": int,
    "tolerance": float,
    "trotter_steps": int,
    "symmetrized": parse_bool,
    "finite_pulses": parse_bool,
    "selective_amplitude": lambda v: parse_quantity(v, "frequency"),
    "sequence": str.strip,
    "sequence_file": str.strip,
}
_OUTPUT_PARSERS: dict[str, Any] = {"directory": str.strip, "format": str.strip}
_LOGGING_PARSERS: dict[str, Any] = {"level": str.strip, "file": str.strip}

SECTION_PARSERS = {
    "lattice": _LATTICE_PARSERS,
    "device": _DEVICE_PARSERS,
    "simulation": _SIMULATION_PARSERS,
    "output": _OUTPUT_PARSERS,
    "logging": _LOGGING_PARSERS,
}


def _raise_from_pydantic(section: str, error: PydanticValidationError) -> None:
    missing = [f"{section}.{'.'.join(str(p) for p in e['loc'])}" for e in error.errors() if e["type"] == "missing"]
    if missing:
        raise ConfigMissingError(
            f"Missing configuration keys: {', '.join(missing)}", missing_keys=missing, config_key=missing[0]
        )
    first = error.errors()[0]
    key = f"{section}.{'.'.join(str(p) for p in first['loc'])}"
    messages = "; ".join(f"{section}.{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in error.errors())
    raise ConfigError(f"Invalid configuration: {messages}", config_key=key)


class Config(BaseModel):
    """Main configuration class for hapq."""

    model_config = ConfigDict(extra="forbid")

    lattice: LatticeConfig = Field(default_factory=LatticeConfig)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    device_fields: dict[str, Any] = Field(default_factory=dict)

    @field_validator("device_fields")
    @classmethod
    def _known_device_keys(cls, value: dict[str, Any]) -> dict[str, Any]:
        unknown = sorted(set(value) - set(_DEVICE_PARSERS))
        if unknown:
            raise ValueError(f"unknown device keys: {', '.join(unknown)}")
        return value

    @model_validator(mode="after")
    def _planes_exist(self) -> "Config":
        # Recoupling planes are checked when set or when recoupling is the configured sequence
        sim = self.simulation
        n_planes = self.lattice.n_planes
        referenced = list(sim.planes or []) + [sim.carrier_plane]
        for name in ("plane_a", "plane_b"):
            if name in sim.model_fields_set or sim.sequence == "recouple":
                referenced.append(getattr(sim, name))
        bad = sorted({p for p in referenced if p >= n_planes})
        if bad:
            raise ValueError(f"planes {bad} are outside the declared lattice of {n_planes} planes")
        return self

    def require_device(self) -> DeviceConfig:
        """Validate and return the device section, naming every missing key at once."""
        try:
            return DeviceConfig(**self.device_fields)
        except PydanticValidationError as e:
            _raise_from_pydantic("device", e)
            raise  # unreachable

    @classmethod
    def from_sections(cls, sections: dict[str, dict[str, Any]]) -> "Config":
        """Build a config from already-converted section dictionaries."""
        built: dict[str, Any] = {}
        for name, model in (
            ("lattice", LatticeConfig),
            ("simulation", SimulationConfig),
            ("output", OutputConfig),
            ("logging", LoggingConfig),
        ):
            try:
                built[name] = model(**sections.get(name, {}))
            except PydanticValidationError as e:
                _raise_from_pydantic(name, e)
        try:
            return cls(**built, device_fields=dict(sections.get("device", {})))
        except PydanticValidationError as e:
            messages = "; ".join(e_["msg"] for e_ in e.errors())
            raise ConfigError(f"Invalid configuration: {messages}") from e

    @classmethod
    def from_file(cls, path: str | Path) -> "Config":
        """
        Load configuration from a ``section.key = value`` file.

        Args:
            path: Config file path

        Returns:
            Validated configuration (environment overrides applied to logging)
        """
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}", config_key="--config")

        sections: dict[str, dict[str, Any]] = {}
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'section.key = value'", details=raw)
            dotted, value = (part.strip() for part in line.split("=", 1))
            section, _, key = dotted.partition(".")
            if section not in SECTION_PARSERS:
                raise ConfigUnknownKeyError(f"{path}:{lineno}: unknown section '{section}'", config_key=dotted)
            parsers = SECTION_PARSERS[section]
            if key not in parsers:
                raise ConfigUnknownKeyError(f"{path}:{lineno}: unknown key '{dotted}'", config_key=dotted)
            try:
                sections.setdefault(section, {})[key] = parsers[key](value)
            except ValueError as e:
                raise ConfigError(f"{path}:{lineno}: {dotted}: {e}", config_key=dotted) from e

        sections.setdefault("logging", {}).update(_logging_overrides())
        return cls.from_sections(sections)

    @classmethod
    def from_env(cls) -> "Config":
        """Create a default configuration with environment overrides."""
        return cls.from_sections({"logging": _logging_overrides()})


def _logging_overrides() -> dict[str, str]:
    overrides = {}
    if os.getenv("HAPQ_LOG_LEVEL"):
        overrides["level"] = os.environ["HAPQ_LOG_LEVEL"]
    if os.getenv("HAPQ_LOG_FILE") is not None:
        overrides["file"] = os.environ["HAPQ_LOG_FILE"]
    return overrides
