"""
Created on : Wednesday, 21st October 2026 10:04:19 am
Author: chiral-vdw contributors
-----
Run configuration: TOML (or echoed JSON) files, dotted `key=value` overrides and
conversion of the resolved config into domain objects.

Lengths are in c/omega_ref; `units` only selects the output unit system.
"""

import json
import logging
import tomllib
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from vdw.exceptions import ConfigError
from vdw.schemas import Environment, QuadratureSpec, Sign, Triple
from vdw.units import DEFAULT_OMEGA_REF

logger = logging.getLogger(__name__)

type Scenario = Literal["potential", "scan", "cavity", "greens-dump"]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class MoleculeSection(_Section):
    """Molecule file paths or `preset:<name>` references."""

    a: str = "preset:3mcp-like"
    b: str = "preset:rb-like"
    c: str = "preset:3mcp-like"


class EnvironmentSection(_Section):
    kind: Literal["free", "plate", "cavity"] = "plate"


class PlateSection(_Section):
    z: float = 0.0
    chirality: Sign = -1


class CavitySection(_Section):
    separation: float = Field(default=4e-3, gt=0.0)
    offset: float = Field(default=1e-3, gt=0.0)
    axis: Literal["normal", "parallel"] = "normal"
    chirality: Sign = 1
    handedness_a: Sign = 1
    handedness_c: Sign = 1
    full: bool = False


class GeometrySection(_Section):
    r_a: Triple = (0.0, 0.0, 1e-3)
    r_b: Triple = (0.0, 1e-3, 1e-3)
    xi: tuple[float, ...] = (1.0,)


class ScanSection(_Section):
    """Grid offsets of B from A in units of z_a; `calibrate` sets the parallel asymptote."""

    z_a: float = Field(default=1e-3, gt=0.0)
    x: tuple[float, ...] = (0.0,)
    y: tuple[float, ...] = (1.0, 2.0, 5.0, 10.0, 20.0)
    z: tuple[float, ...] = (0.0,)
    full: bool = False
    step: float = Field(default=1e-4, gt=0.0)
    workers: int = Field(default=1, ge=1)
    calibrate: float | None = None


class RunConfig(_Section):
    scenario: Scenario = "potential"
    units: Literal["internal", "SI"] = "internal"
    omega_ref: float = Field(default=DEFAULT_OMEGA_REF, gt=0.0)
    molecules: MoleculeSection = MoleculeSection()
    environment: EnvironmentSection = EnvironmentSection()
    plate: PlateSection = PlateSection()
    cavity: CavitySection = CavitySection()
    geometry: GeometrySection = GeometrySection()
    scan: ScanSection = ScanSection()
    quadrature: QuadratureSpec = QuadratureSpec()

    def build_environment(self) -> Environment:
        match self.environment.kind:
            case "free":
                return Environment.free()
            case "plate":
                return Environment.single_plate(self.plate.chirality, z0=self.plate.z)
            case "cavity":
                return self.build_cavity()
        raise ConfigError(f"build_environment: unknown kind {self.environment.kind!r}", key="environment.kind")

    def build_cavity(self) -> Environment:
        return Environment.cavity(self.cavity.separation, self.cavity.chirality, z0=self.plate.z)


def parse_value(text: str) -> Any:
    """Interpret an override value as a TOML literal, falling back to a bare string."""
    try:
        return tomllib.loads(f"value = {text}")["value"]
    except tomllib.TOMLDecodeError:
        return text


def apply_override(document: dict[str, Any], assignment: str) -> dict[str, Any]:
    """Set a dotted key such as `plate.chirality=-1` in a nested config dictionary."""
    key, sep, raw = assignment.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"apply_override: expected KEY=VALUE, got {assignment!r}", key=assignment)
    *parents, leaf = key.split(".")
    node = document
    for part in parents:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(f"apply_override: {part!r} is not a section", key=key)
        node = child
    node[leaf] = parse_value(raw.strip())
    logger.debug("apply_override: %s=%r", key, node[leaf])
    return document


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Load a TOML file, or a JSON config as echoed into output headers."""
    location = Path(path)
    text = location.read_text(encoding="utf-8")
    try:
        if location.suffix == ".json":
            document: dict[str, Any] = json.loads(text)
        else:
            document = tomllib.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        logger.error("read_config_file: cannot parse %s: %s", location, e, exc_info=True)
        raise ConfigError(f"read_config_file: cannot parse {location}: {e}", key=str(location)) from e
    return document


def anchor_molecule_paths(document: dict[str, Any], base: Path) -> dict[str, Any]:
    """Make relative molecule file paths in a loaded config relative to `base`."""
    molecules = document.get("molecules")
    if not isinstance(molecules, dict):
        return document
    for key, source in molecules.items():
        if not isinstance(source, str) or source.startswith("preset:"):
            continue
        if not Path(source).is_absolute():
            molecules[key] = str(base / source)
    return document


def resolve_config(
    path: str | Path | None, overrides: list[str], **fixed: Any
) -> RunConfig:
    """File contents, then `--set` overrides, then dotted `fixed` settings from flags.

    Relative molecule paths in the file resolve against its directory; those given as
    overrides resolve against the working directory.
    """
    document: dict[str, Any] = {}
    if path is not None:
        base = Path(path).resolve().parent
        document = anchor_molecule_paths(read_config_file(path), base)
    for assignment in overrides:
        apply_override(document, assignment)
    for key, value in fixed.items():
        apply_override(document, f"{key}={json.dumps(value)}")
    try:
        config = RunConfig.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"])
        logger.error("resolve_config: invalid %s: %s", key, first["msg"])
        raise ConfigError(f"resolve_config: invalid {key}: {first['msg']}", key=key) from e
    logger.info("resolve_config: scenario=%s units=%s", config.scenario, config.units)
    return config
