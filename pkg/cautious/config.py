"""Resolution of run settings: explicit flag, then YAML file, then environment, then defaults."""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml
from dotenv import load_dotenv
from pydantic import ValidationError

from cautious.errors import DataParseError, PreconditionError
from cautious.models.config import RunConfig

logger = logging.getLogger(__name__)

SEED_ENV = "CSS_SEED"


def load_environment() -> None:
    load_dotenv()


def read_config_file(path: str | Path) -> Dict[str, Any]:
    """YAML mapping whose keys are long flag names (`alpha-lo` or `alpha_lo`)."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise DataParseError(f"config file {path} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise DataParseError(f"config file {path} must contain a mapping")
    return {str(k).replace("-", "_"): v for k, v in raw.items()}


def env_seed(environ: Mapping[str, str] = os.environ) -> Optional[int]:
    value = environ.get(SEED_ENV)
    if value is None or value.strip() == "":
        return None
    try:
        return int(value)
    except ValueError:
        raise PreconditionError(f"{SEED_ENV} must be an integer, got '{value}'") from None


def resolve_run_config(
    flags: Mapping[str, Any], file_values: Optional[Mapping[str, Any]] = None, environ: Mapping[str, str] = os.environ
) -> RunConfig:
    """Merges the layers; `flags` holds None for every flag that was not given."""
    file_values = dict(file_values or {})
    unknown = set(file_values) - set(RunConfig.model_fields)
    if unknown:
        raise PreconditionError(f"unknown config keys: {sorted(unknown)}")
    merged: Dict[str, Any] = {}
    for name in RunConfig.model_fields:
        if flags.get(name) is not None:
            merged[name] = flags[name]
        elif name in file_values:
            merged[name] = file_values[name]
    if "seed" not in merged:
        seed = env_seed(environ)
        if seed is not None:
            merged["seed"] = seed
    try:
        config = RunConfig(**merged)
    except ValidationError as exc:
        raise PreconditionError(f"invalid settings: {exc.errors()[0]['loc']}: {exc.errors()[0]['msg']}") from exc
    logger.debug("resolved run config: %s", config.model_dump(exclude_none=True))
    return config
