"""
Configuration models and loaders.

Every structured input is a pydantic model that rejects unknown keys.
Precedence for run settings: CLI flag > --config JSON > environment
(.env via python-dotenv) > built-in default.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Literal

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from handrig.errors import InputError, SchemaError
from handrig.geometry.projection import ProjectionConfig

AxisRole = str  # "x", "-y", ...
METHODS = ("bch", "naive", "lsq")


def read_json(path: str | Path) -> Any:
    """Parse a JSON file, turning decode failures into SchemaError with line/column."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"file not found: {path}")
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: malformed JSON: {e.msg}", e.lineno, e.colno) from e


def validate_document(model: type[BaseModel], raw: Any, source: str) -> BaseModel:
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise SchemaError(f"{source}: {where}: {first['msg']}") from e


def _check_range(value: tuple[float, float]) -> tuple[float, float]:
    lower, upper = value
    if not lower < upper:
        raise ValueError(f"lower limit {lower} must be below upper limit {upper}")
    return value


class JointLimits(BaseModel):
    """Joint limits in radians, (lower, upper)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    flexion: tuple[float, float] = (-0.35, 1.92)
    abduction: tuple[float, float] = (-0.52, 0.52)
    thumb_cmc: tuple[float, float] = (-1.05, 1.05)

    @field_validator("flexion", "abduction", "thumb_cmc")
    @classmethod
    def check_ranges(cls, value: tuple[float, float]) -> tuple[float, float]:
        return _check_range(value)


class InertialConfig(BaseModel):
    """Placeholder mass properties: solid boxes of uniform density."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    density: float = Field(1000.0, gt=0.0)  # kg/m^3
    min_extent: float = Field(1e-3, gt=0.0)  # m, floor for flat bounding boxes
    box_padding: float = Field(0.008, ge=0.0)  # m, half-thickness of bone boxes


class DynamicsConfig(BaseModel):
    """URDF <limit>/<dynamics> values. Invented defaults; nothing measured them."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    effort: float = Field(1.0, gt=0.0)
    velocity: float = Field(3.0, gt=0.0)
    damping: float = Field(0.05, ge=0.0)
    friction: float = Field(0.0, ge=0.0)


def _default_axis_roles() -> dict[str, tuple[AxisRole, AxisRole]]:
    return {
        "thumb": ("y", "z"),
        "index": ("x", "y"),
        "middle": ("-y", "x"),
        "ring": ("-y", "x"),
        "pinky": ("-y", "x"),
    }


class HandConfig(BaseModel):
    """Everything build_hand_model needs besides the skeleton."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    limits: JointLimits = JointLimits()
    # (abduction, flexion) source per finger: a triad axis name with optional
    # sign. Thumb entries name the CMC axes (y, z).
    axis_roles: dict[str, tuple[AxisRole, AxisRole]] = Field(default_factory=_default_axis_roles)
    thumb_tilt: float = 0.96
    inertial: InertialConfig = InertialConfig()
    dynamics: DynamicsConfig = DynamicsConfig()

    @field_validator("axis_roles")
    @classmethod
    def check_roles(cls, roles: dict[str, tuple[str, str]]) -> dict[str, tuple[str, str]]:
        expected = {"thumb", "index", "middle", "ring", "pinky"}
        if set(roles) != expected:
            raise ValueError(f"axis_roles needs exactly the fingers {sorted(expected)}")
        for finger, pair in roles.items():
            allowed = ("y", "z") if finger == "thumb" else ("x", "y")
            names = [role.lstrip("-") for role in pair]
            if any(name not in allowed for name in names) or names[0] == names[1]:
                raise ValueError(f"{finger}: roles must be two distinct of {allowed}, got {pair}")
        return roles


def load_hand_config(path: str | Path | None) -> HandConfig:
    if path is None:
        return HandConfig()
    return validate_document(HandConfig, read_json(path), str(path))


class SampleSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["on_manifold", "off_manifold", "adversarial"]
    n: int = Field(gt=0)
    max_angle_deg: float | None = Field(None, gt=0.0, le=180.0)


class RunConfig(BaseModel):
    """Optional --config document; every field can also come from the CLI."""

    model_config = ConfigDict(extra="forbid")

    skeleton: Path | None = None
    mesh: Path | None = None
    weights: Path | None = None
    weights_order: Literal["model", "mano"] = "model"
    hand_config: Path | None = None
    out_dir: Path | None = None
    model_dir: Path | None = None
    poses: Path | None = None
    out: Path | None = None
    per_joint_out: Path | None = None
    method: Literal["bch", "naive", "lsq"] = "bch"
    methods: list[Literal["bch", "naive", "lsq"]] = list(METHODS)
    sample: SampleSpec | None = None
    seed: int | None = None
    threads: int | None = Field(None, gt=0)
    projection: ProjectionConfig = ProjectionConfig()
    limits: JointLimits | None = None


def load_run_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    return validate_document(RunConfig, read_json(path), str(path))


def _env_int(name: str) -> int:
    value = os.environ[name]
    try:
        return int(value)
    except ValueError as e:
        raise InputError(f"{name} must be an integer, got {value!r}") from e


def environment_defaults() -> dict[str, Any]:
    """Settings from the environment, after loading a .env file if present."""
    load_dotenv(find_dotenv(usecwd=True))
    env: dict[str, Any] = {}
    if os.getenv("HANDRIG_THREADS"):
        env["threads"] = _env_int("HANDRIG_THREADS")
    if os.getenv("HANDRIG_SEED"):
        env["seed"] = _env_int("HANDRIG_SEED")
    if os.getenv("HANDRIG_LOG_LEVEL"):
        level = os.environ["HANDRIG_LOG_LEVEL"].upper()
        if level not in logging.getLevelNamesMapping():
            raise InputError(f"HANDRIG_LOG_LEVEL {level!r} is not a logging level")
        env["log_level"] = level
    return env
