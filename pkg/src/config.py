"""
Config Module - Configuration Management

Provides configuration loading and validation from YAML files
and environment variables.

Configuration Precedence (highest to lowest):
1. Environment variables
2. YAML config file
3. Default values

Environment Variables:
    LARR_NO_COLOR: Disable ANSI styling (any value except 0/false/no/off)
    LARR_LOG_LEVEL: Logging level
    LARR_DEMO_OUT_DIR: Output directory of the reduction demo
    LARR_DEMO_SEED: Random seed of the reduction demo

Example:
    from src.config import Config

    # Load from environment variables
    config = Config.from_env()

    # Load from YAML with env override
    config = Config.load_with_env("config.yaml")
"""

import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List

import yaml


# Environment variable prefix
ENV_PREFIX = "LARR_"

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def get_env(name: str, default: str = "") -> str:
    """Get environment variable with prefix."""
    return os.environ.get(f"{ENV_PREFIX}{name}", default)


def get_env_flag(name: str) -> bool:
    """True if the variable is set to anything but an explicit false value."""
    val = get_env(name, "").strip().lower()
    return bool(val) and val not in ("0", "false", "no", "off")


def get_env_int(name: str, default: int = 0) -> int:
    """Get integer environment variable."""
    val = get_env(name, "")
    if val:
        try:
            return int(val)
        except ValueError:
            pass
    return default


class ConfigError(Exception):
    """Base exception for configuration errors."""
    pass


class ConfigNotFoundError(ConfigError):
    """Raised when config file is not found."""
    pass


def _section(data: Dict[str, Any], key: str) -> Dict[str, Any]:
    section = data[key] or {}
    if not isinstance(section, dict):
        raise ConfigError(f"Config section {key!r} must be a mapping")
    return section


@dataclass
class RenderConfig:
    """Terminal rendering settings."""
    no_color: bool = False
    max_rows: int = 50


@dataclass
class DemoConfig:
    """
    Synthetic reduction pipeline settings.

    Attributes:
        pixels: Number of detector pixels (spectra)
        events: Approximate total number of events per generated set
        seed: Random seed for the sample set
        vanadium_seed_offset: Added to seed for the vanadium set
        out_dir: Directory for saved containers and plots
        tof_min, tof_max, tof_bins: Histogram edges of the tof axis (us)
        theta_min, theta_max, theta_bins: Grouping edges of the theta axis (rad)
    """
    pixels: int = 100
    events: int = 10000
    seed: int = 7
    vanadium_seed_offset: int = 1000
    out_dir: str = "demo_out"
    tof_min: float = 0.0
    tof_max: float = 20000.0
    tof_bins: int = 200
    theta_min: float = 0.5
    theta_max: float = 1.2
    theta_bins: int = 10


@dataclass
class Config:
    """
    Main configuration class.

    Attributes:
        render: Terminal rendering settings
        demo: Reduction demo settings
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
    """

    render: RenderConfig = field(default_factory=RenderConfig)
    demo: DemoConfig = field(default_factory=DemoConfig)
    log_level: str = "INFO"

    @classmethod
    def load(cls, filepath: str = "config.yaml") -> "Config":
        """
        Load configuration from YAML file.

        Args:
            filepath: Path to YAML config file

        Returns:
            Config instance

        Raises:
            ConfigNotFoundError: If the file does not exist
            ConfigError: If the file cannot be read or parsed
        """
        path = Path(filepath)

        if not path.exists():
            raise ConfigNotFoundError(f"Config file not found: {filepath}")
        if not path.is_file():
            raise ConfigError(f"Config path is not a file: {filepath}")

        try:
            with open(path, 'r') as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in {filepath}: {e}") from None
        except OSError as e:
            raise ConfigError(f"Cannot read {filepath}: {e.strerror or e}") from None

        if not isinstance(data, dict):
            raise ConfigError(f"Config file {filepath} must hold a mapping")
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Config":
        """
        Create Config from dictionary.

        Raises:
            ConfigError: If a section is not a mapping or a value has the wrong type
        """
        try:
            return cls._from_dict(data)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid config value: {e}") from None

    @classmethod
    def _from_dict(cls, data: Dict[str, Any]) -> "Config":
        config = cls()

        if "render" in data:
            render_data = _section(data, "render")
            config.render = RenderConfig(
                no_color=bool(render_data.get("no_color", config.render.no_color)),
                max_rows=int(render_data.get("max_rows", config.render.max_rows)),
            )

        if "demo" in data:
            demo_data = _section(data, "demo")
            defaults = asdict(config.demo)
            unknown = set(demo_data) - set(defaults)
            if unknown:
                raise ConfigError(f"Unknown demo settings: {sorted(unknown)}")
            merged = {**defaults, **demo_data}
            config.demo = DemoConfig(
                pixels=int(merged["pixels"]),
                events=int(merged["events"]),
                seed=int(merged["seed"]),
                vanadium_seed_offset=int(merged["vanadium_seed_offset"]),
                out_dir=str(merged["out_dir"]),
                tof_min=float(merged["tof_min"]),
                tof_max=float(merged["tof_max"]),
                tof_bins=int(merged["tof_bins"]),
                theta_min=float(merged["theta_min"]),
                theta_max=float(merged["theta_max"]),
                theta_bins=int(merged["theta_bins"]),
            )

        if "log_level" in data:
            config.log_level = str(data["log_level"]).upper()

        return config

    def apply_env(self) -> "Config":
        """Override settings from LARR_ environment variables in place."""
        if get_env_flag("NO_COLOR"):
            self.render.no_color = True

        log_level = get_env("LOG_LEVEL")
        if log_level:
            self.log_level = log_level.upper()

        out_dir = get_env("DEMO_OUT_DIR")
        if out_dir:
            self.demo.out_dir = out_dir

        if get_env("DEMO_SEED"):
            self.demo.seed = get_env_int("DEMO_SEED", self.demo.seed)

        return self

    @classmethod
    def from_env(cls) -> "Config":
        """
        Load configuration from environment variables.

        Returns:
            Config instance
        """
        return cls().apply_env()

    @classmethod
    def load_with_env(cls, filepath: str = "config.yaml") -> "Config":
        """
        Load configuration from YAML file with environment variable overrides.

        Args:
            filepath: Path to YAML config file

        Returns:
            Config instance with env vars taking precedence
        """
        path = Path(filepath)
        if path.exists():
            config = cls.load(filepath)
        else:
            config = cls()
        return config.apply_env()

    def save(self, filepath: str = "config.yaml") -> None:
        """Save configuration to YAML file."""
        data = self.to_dict()
        path = Path(filepath)
        path.parent.mkdir(parents=True, exist_ok=True)

        with open(path, 'w') as f:
            yaml.dump(data, f, default_flow_style=False, indent=2)

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary."""
        return {
            "render": asdict(self.render),
            "demo": asdict(self.demo),
            "log_level": self.log_level,
        }

    def validate(self) -> List[str]:
        """
        Validate configuration.

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []

        if self.log_level not in LOG_LEVELS:
            errors.append(f"log_level must be one of {', '.join(LOG_LEVELS)}")

        if self.render.max_rows < 1:
            errors.append("render.max_rows must be positive")

        demo = self.demo
        if demo.pixels < 1:
            errors.append("demo.pixels must be positive")
        if demo.events < 0:
            errors.append("demo.events must not be negative")
        if demo.tof_bins < 1 or demo.theta_bins < 1:
            errors.append("demo bin counts must be positive")
        if not demo.tof_min < demo.tof_max:
            errors.append("demo.tof_min must be below demo.tof_max")
        if not demo.theta_min < demo.theta_max:
            errors.append("demo.theta_min must be below demo.theta_max")

        return errors

    def __repr__(self) -> str:
        """String representation."""
        return (
            f"Config(log_level={self.log_level}, "
            f"no_color={self.render.no_color}, "
            f"demo_out_dir={self.demo.out_dir})"
        )
