"""
Configuration and environment setup for premise-forge.

Settings are grouped in dataclasses and aggregated in PipelineConfig.
Values come from three layers, later layers winning:

- dataclass defaults
- an optional ``key=value`` file named by the PREMISE_FORGE_CONFIG
  environment variable (or passed explicitly)
- command-line flags, applied by the CLI through ``PipelineConfig.override``
"""

import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

from dotenv import load_dotenv

from .errors import ConfigError

# Load .env file from project root
_env_path = Path(__file__).parent.parent / ".env"
load_dotenv(_env_path)

CONFIG_ENV_VAR = "PREMISE_FORGE_CONFIG"

DATA_DIR = Path(__file__).parent / "data"


@dataclass
class ResourceConfig:
    """Paths of the bundled lexical resources."""

    lexicon: Path = DATA_DIR / "lexicon.tsv"
    stoplist: Path = DATA_DIR / "stoplist.txt"
    abstraction: Path = DATA_DIR / "abstraction.txt"
    colors: Path = DATA_DIR / "colors.txt"
    animate: Path = DATA_DIR / "animate.txt"
    exclusion: Path = DATA_DIR / "exclusion.txt"
    aliases: Path = DATA_DIR / "aliases.txt"
    classes: Path = DATA_DIR / "coco_classes.txt"


@dataclass
class CorpusConfig:
    """Annotation, feature and embedding inputs."""

    objects: Optional[Path] = None
    attributes: Optional[Path] = None
    features: Optional[Path] = None
    embeddings: Optional[Path] = None
    captions: Optional[Path] = None
    normalize_features: bool = False  # L2-normalize image vectors on load


@dataclass
class GenerationConfig:
    """Premise question generation settings."""

    dedup_threshold: float = 0.9  # SPICE F1 at or above this counts as a restatement


@dataclass
class TrainingConfig:
    """Relevance / false-premise classifier hyperparameters."""

    learning_rate: float = 0.1
    epochs: int = 200
    batch_size: int = 32
    optimizer: str = "sgd"  # "sgd" or "adam"
    hidden: List[int] = field(default_factory=lambda: [64])
    threshold: float = 0.5  # probability at or above this is positive


@dataclass
class PipelineConfig:
    """Everything a CLI run needs."""

    resources: ResourceConfig = field(default_factory=ResourceConfig)
    corpus: CorpusConfig = field(default_factory=CorpusConfig)
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    seed: int = 0
    workers: int = 1

    def override(self, **values: Any) -> "PipelineConfig":
        """Apply dotted-key overrides in place, skipping None values."""
        for key, value in values.items():
            if value is not None:
                _assign(self, key, value)
        return self

    def validate_paths(self) -> None:
        """Raise ConfigError naming the first configured file that does not exist."""
        for section in (self.resources, self.corpus):
            for item in fields(section):
                value = getattr(section, item.name)
                if isinstance(value, Path) and not value.exists():
                    raise ConfigError(f"{item.name}: file not found: {value}")

    def validate(self) -> None:
        if not 0.0 <= self.generation.dedup_threshold <= 1.0:
            raise ConfigError(
                f"dedup threshold must be in [0, 1], got {self.generation.dedup_threshold}"
            )
        if self.training.optimizer not in ("sgd", "adam"):
            raise ConfigError(f"unknown optimizer: {self.training.optimizer}")
        if self.training.epochs < 1 or self.training.batch_size < 1:
            raise ConfigError("epochs and batch size must be positive")
        if self.training.learning_rate <= 0:
            raise ConfigError("learning rate must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")


def _section_for(config: PipelineConfig, key: str) -> tuple:
    if "." in key:
        section_name, name = key.split(".", 1)
        section = getattr(config, section_name, None)
        if section is None or section_name not in {f.name for f in fields(config)}:
            raise ConfigError(f"unknown config section: {section_name}")
        return section, name
    return config, key


def _coerce(current: Any, raw: Any, name: str) -> Any:
    if not isinstance(raw, str):
        return Path(raw) if isinstance(current, Path) else raw
    text = raw.strip()
    if isinstance(current, bool):
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    if isinstance(current, int):
        try:
            return int(text)
        except ValueError as e:
            raise ConfigError(f"{name}: expected an integer, got {raw!r}") from e
    if isinstance(current, float):
        try:
            return float(text)
        except ValueError as e:
            raise ConfigError(f"{name}: expected a number, got {raw!r}") from e
    if isinstance(current, list):
        try:
            return [int(part) for part in text.split(",") if part.strip()]
        except ValueError as e:
            raise ConfigError(f"{name}: expected comma-separated integers, got {raw!r}") from e
    if current is None or isinstance(current, Path):
        return Path(text)
    return text


def _assign(config: PipelineConfig, key: str, raw: Any) -> None:
    section, name = _section_for(config, key)
    if name not in {f.name for f in fields(section)}:
        raise ConfigError(f"unknown config key: {key}")
    setattr(section, name, _coerce(getattr(section, name), raw, key))


def parse_config_file(path: Union[str, Path]) -> List[Tuple[int, str, str]]:
    """Read a ``key=value`` file into (line number, key, value) entries.

    Blank lines and ``#`` comments are ignored.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    entries: List[Tuple[int, str, str]] = []
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{line_number}: expected key=value")
            key, value = stripped.split("=", 1)
            entries.append((line_number, key.strip(), value.strip()))
    return entries


def get_config(config_path: Optional[Union[str, Path]] = None) -> PipelineConfig:
    """Build the pipeline configuration.

    Args:
        config_path: Optional ``key=value`` file. If not provided, the file
            named by PREMISE_FORGE_CONFIG is used when that variable is set.

    Returns:
        PipelineConfig with file values applied over the defaults.

    Raises:
        ConfigError: If the file is missing or contains an unknown key.
    """
    config = PipelineConfig()
    if config_path is None:
        config_path = os.environ.get(CONFIG_ENV_VAR) or None
    if config_path is None:
        return config

    path = Path(config_path)
    for line_number, key, value in parse_config_file(path):
        try:
            _assign(config, key, value)
        except ConfigError as e:
            raise ConfigError(f"{path}:{line_number}: {e}") from e
    config.validate()
    return config


def get_training_config(**overrides: Any) -> TrainingConfig:
    """TrainingConfig with keyword overrides applied."""
    training = TrainingConfig()
    for key, value in overrides.items():
        if not hasattr(training, key):
            raise ConfigError(f"unknown training option: {key}")
        setattr(training, key, value)
    return training
