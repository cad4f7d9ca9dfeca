"""
Settings for aromakit, read from YAML and the environment.

Lookup order: the file named by $AROMAKIT_CONFIG, else <state_dir>/config.yml,
then environment overrides (AROMAKIT_THREADS).
"""

import os
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError

from core.errors import ConfigError

CONFIG_ENV = "AROMAKIT_CONFIG"
THREADS_ENV = "AROMAKIT_THREADS"
DEFAULT_STATE_DIR = "~/.aromakit"


class AromaKitSettings(BaseModel):
    """
    User settings

    Args:
        threads: Worker threads for matrix column assembly
        state_dir: Directory holding state.json, status.json and logs
        cache: Persist computed dimensions and ranks in the state store
        default_format: Output format when no --format/--json/--csv is given
        max_order: Largest order enumeration commands accept without --force
        verbose: Emit progress lines
    """

    threads: int = Field(default=1, ge=1)
    state_dir: str = DEFAULT_STATE_DIR
    cache: bool = True
    default_format: Literal["text", "json", "csv"] = "text"
    max_order: int = Field(default=14, ge=1)
    verbose: bool = False

    @property
    def state_path(self) -> str:
        return os.path.expanduser(self.state_dir)


def _load_config(path: str) -> dict:
    """Load a YAML config file, empty when missing"""
    if not os.path.exists(path):
        return {}
    try:
        with open(path, "r") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping, got {type(data).__name__}")
    return data


def save_settings(settings: AromaKitSettings, path: str):
    """Save settings to a YAML file"""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        yaml.dump(settings.model_dump(), f, default_flow_style=False)


def load_settings(path: Optional[str] = None) -> AromaKitSettings:
    """
    Build the settings from file and environment

    Args:
        path: Explicit config file; defaults to $AROMAKIT_CONFIG or <state_dir>/config.yml
    """
    path = path or os.environ.get(CONFIG_ENV)
    if path is None:
        path = os.path.join(os.path.expanduser(DEFAULT_STATE_DIR), "config.yml")
    data = _load_config(os.path.expanduser(path))

    threads = os.environ.get(THREADS_ENV)
    if threads:
        data["threads"] = threads

    try:
        return AromaKitSettings.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid settings: {e}") from e
