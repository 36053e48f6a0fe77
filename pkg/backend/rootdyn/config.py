"""
Centralised configuration for the root-dynamics toolkit
File: config.py

Settings come from built-in defaults or from an optional YAML file passed to
the CLI with --config. No environment variables are read.
"""

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import yaml

logger = logging.getLogger(__name__)


DEFAULT_PALETTE: list[tuple[int, int, int]] = [
    (230, 159, 0),    # +i
    (86, 180, 233),   # -i
    (0, 158, 115),
    (240, 228, 66),
    (0, 114, 178),
    (213, 94, 0),
    (204, 121, 167),
    (0, 0, 0),        # non-convergent
]


@dataclass
class PrecisionSettings:
    """Big-float precision budget"""
    default_digits: int = 32
    guard_digits: int = 10
    oracle_guard_digits: int = 20
    min_digits: int = 5


@dataclass
class DriftSettings:
    """Defaults for finite-precision drift experiments"""
    default_steps: int = 300
    tol: float = 0.5


@dataclass
class RenderSettings:
    """Basin renderer limits and viewport defaults"""
    max_pixels: int = 4_000_000
    workers: int = 4
    escape_radius: float = 1e12
    center: complex = 0j
    width: float = 4.0
    height: float = 4.0
    cols: int = 256
    rows: int = 256
    max_iter: int = 60
    tol: float = 1e-8
    palette: list[tuple[int, int, int]] = field(default_factory=lambda: list(DEFAULT_PALETTE))

    def __post_init__(self):
        if isinstance(self.center, (list, tuple)):
            self.center = complex(*self.center)
        elif isinstance(self.center, str):
            self.center = complex(self.center.replace(" ", ""))
        self.palette = [tuple(int(c) for c in rgb) for rgb in self.palette]


@dataclass
class LoggingSettings:
    """Logging setup consumed by main.configure_logging"""
    level: str = "WARNING"
    log_file: Optional[str] = None


@dataclass
class Config:
    """Global configuration"""
    precision: PrecisionSettings = field(default_factory=PrecisionSettings)
    drift: DriftSettings = field(default_factory=DriftSettings)
    render: RenderSettings = field(default_factory=RenderSettings)
    logging: LoggingSettings = field(default_factory=LoggingSettings)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Config":
        """Build configuration from a nested mapping; unknown sections are rejected"""
        data = data or {}
        sections = {
            "precision": PrecisionSettings,
            "drift": DriftSettings,
            "render": RenderSettings,
            "logging": LoggingSettings,
        }
        unknown = set(data) - set(sections)
        if unknown:
            raise ValueError(f"Unknown configuration sections: {', '.join(sorted(unknown))}")
        kwargs = {}
        for name, section_cls in sections.items():
            try:
                kwargs[name] = section_cls(**(data.get(name) or {}))
            except TypeError as e:
                raise ValueError(f"Invalid '{name}' section: {e}") from e
        return cls(**kwargs)

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "Config":
        """Load configuration from a YAML file"""
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ValueError(f"Configuration file {path} must contain a mapping")
        logger.info(f"Loaded configuration from {path}")
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["render"]["center"] = [self.render.center.real, self.render.center.imag]
        data["render"]["palette"] = [list(rgb) for rgb in self.render.palette]
        return data

    def validate(self) -> list[str]:
        """Validate the configuration and return the list of errors"""
        errors = []
        p = self.precision

        if p.min_digits < 5:
            errors.append(f"min_digits ({p.min_digits}) must be at least 5")
        if p.default_digits < p.min_digits:
            errors.append(f"default_digits ({p.default_digits}) cannot be below min_digits ({p.min_digits})")
        if p.guard_digits < 0 or p.oracle_guard_digits < 0:
            errors.append("guard digit counts must be non-negative")

        if self.drift.default_steps < 0:
            errors.append(f"drift default_steps must be non-negative, got {self.drift.default_steps}")
        if self.drift.tol <= 0:
            errors.append(f"drift tol must be positive, got {self.drift.tol}")

        r = self.render
        if r.max_pixels < 1:
            errors.append(f"render max_pixels must be positive, got {r.max_pixels}")
        if r.workers < 1:
            errors.append(f"render workers must be at least 1, got {r.workers}")
        if r.escape_radius <= 0:
            errors.append(f"render escape_radius must be positive, got {r.escape_radius}")
        if r.width <= 0 or r.height <= 0:
            errors.append("render viewport width and height must be positive")
        if r.cols < 1 or r.rows < 1:
            errors.append("render cols and rows must be at least 1")
        elif r.cols * r.rows > r.max_pixels:
            errors.append(f"default grid {r.cols}x{r.rows} exceeds max_pixels ({r.max_pixels})")
        if len(r.palette) < 3:
            errors.append("render palette needs at least 3 colours (two roots plus non-convergent)")
        for rgb in r.palette:
            if len(rgb) != 3 or any(not 0 <= c <= 255 for c in rgb):
                errors.append(f"invalid palette entry {rgb}")
                break

        if not isinstance(logging.getLevelName(self.logging.level.upper()), int):
            errors.append(f"unknown log level: {self.logging.level}")

        return errors


# Global configuration instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Return the global configuration (singleton)"""
    global _config
    if _config is None:
        _config = Config()
        errors = _config.validate()
        if errors:
            raise ValueError(f"Configuration errors: {', '.join(errors)}")
    return _config


def set_config(config: Config) -> Config:
    """Install a configuration after validating it"""
    global _config
    errors = config.validate()
    if errors:
        raise ValueError(f"Configuration errors: {', '.join(errors)}")
    _config = config
    return _config


def reload_config(path: Optional[Union[str, Path]] = None) -> Config:
    """Reload configuration, from a YAML file when given, else from defaults"""
    global _config
    _config = None
    if path is not None:
        return set_config(Config.from_yaml(path))
    return get_config()
