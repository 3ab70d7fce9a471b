"""Build options, with optional overrides from a fidyll.toml file."""
from __future__ import annotations

import sys
from dataclasses import dataclass, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .codegen import DEFAULT_WPM
from .collect import DEFAULT_FRAMES, DEFAULT_MAX_CONFIGS
from .model import ALL_FORMATS, FORMAT_NAMES, Format

CONFIG_FILENAME = "fidyll.toml"


class ConfigError(ValueError):
    """Raised when fidyll.toml or the assembled options are invalid."""


@dataclass
class BuildOptions:
    input: Path
    targets: tuple[Format, ...] = ALL_FORMATS
    out_dir: Path = Path("out")
    default_frames: int = DEFAULT_FRAMES
    max_configs: int = DEFAULT_MAX_CONFIGS
    jobs: int | None = None
    print_columns: int = 1
    wpm: int = DEFAULT_WPM
    pdf_command: str | None = None
    narration_command: str | None = None
    composite_command: str | None = None
    runtime_path: Path | None = None

    def validate(self) -> None:
        if not self.targets:
            raise ConfigError("at least one target format is required")
        if self.out_dir.resolve() == self.input.resolve().parent:
            raise ConfigError(
                "output directory must be distinct from the source directory"
            )
        if self.print_columns not in (1, 2):
            raise ConfigError("print columns must be 1 or 2")
        if self.default_frames < 2:
            raise ConfigError("default frame count must be at least 2")
        if self.max_configs < 1:
            raise ConfigError("max configurations must be positive")
        if self.jobs is not None and self.jobs < 1:
            raise ConfigError("jobs must be positive")
        if self.wpm <= 0:
            raise ConfigError("words-per-minute must be positive")


def parse_targets(names: list[str] | str) -> tuple[Format, ...]:
    if isinstance(names, str):
        names = [part.strip() for part in names.split(",") if part.strip()]
    targets = []
    for name in names:
        if name not in FORMAT_NAMES:
            known = ", ".join(sorted(FORMAT_NAMES))
            raise ConfigError(f"unknown target {name!r} (expected one of: {known})")
        fmt = Format(name)
        if fmt not in targets:
            targets.append(fmt)
    return tuple(targets)


def _norm_key(key: str) -> str:
    return key.replace("-", "_")


def load_config_file(path: Path) -> dict:
    """Read fidyll.toml into the flat override dict used by from_sources."""
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    overrides: dict = {}
    build = raw.get("build", {})
    if not isinstance(build, dict):
        raise ConfigError(f"{path}: [build] must be a table")
    for key, value in build.items():
        key = _norm_key(key)
        if key == "targets":
            overrides["targets"] = parse_targets(value)
        elif key == "out":
            overrides["out_dir"] = Path(value)
        elif key == "frames":
            overrides["default_frames"] = int(value)
        elif key == "max_configs":
            overrides["max_configs"] = int(value)
        elif key == "jobs":
            overrides["jobs"] = int(value)
        elif key == "print_columns":
            overrides["print_columns"] = int(value)
        elif key == "wpm":
            overrides["wpm"] = int(value)
        elif key == "runtime":
            overrides["runtime_path"] = Path(value)
        else:
            raise ConfigError(f"{path}: unknown [build] key {key!r}")
    hooks = raw.get("hooks", {})
    if not isinstance(hooks, dict):
        raise ConfigError(f"{path}: [hooks] must be a table")
    known_hooks = {"pdf": "pdf_command", "narration": "narration_command",
                   "composite": "composite_command"}
    for key, value in hooks.items():
        field_name = known_hooks.get(_norm_key(key))
        if field_name is None:
            raise ConfigError(f"{path}: unknown [hooks] key {key!r}")
        overrides[field_name] = str(value)
    for section in raw:
        if section not in ("build", "hooks"):
            raise ConfigError(f"{path}: unknown section [{section}]")
    return overrides


def from_sources(
    input_path: Path | str,
    cli_overrides: dict | None = None,
    config_path: Path | str | None = None,
) -> BuildOptions:
    """Assemble options: defaults, then fidyll.toml, then CLI flags.

    When config_path is None, a fidyll.toml next to the input file is
    picked up automatically.
    """
    input_path = Path(input_path)
    options = BuildOptions(input=input_path)
    if config_path is None:
        candidate = input_path.resolve().parent / CONFIG_FILENAME
        if candidate.exists():
            config_path = candidate
    if config_path is not None:
        file_overrides = load_config_file(Path(config_path))
        options = replace(options, **file_overrides)
        # relative paths in the config resolve against the config's directory
        base = Path(config_path).resolve().parent
        if "out_dir" in file_overrides and not options.out_dir.is_absolute():
            options = replace(options, out_dir=base / options.out_dir)
        if (
            "runtime_path" in file_overrides
            and options.runtime_path is not None
            and not options.runtime_path.is_absolute()
        ):
            options = replace(options, runtime_path=base / options.runtime_path)
    if cli_overrides:
        options = replace(
            options, **{k: v for k, v in cli_overrides.items() if v is not None}
        )
    options.validate()
    return options
