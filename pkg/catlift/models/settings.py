"""
Configuration for enumeration guards, data locations and logging.
"""

import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel

from catlift.errors import ConfigError

load_dotenv()

REPO_ROOT = Path(__file__).resolve().parents[2]


class Settings(BaseModel):
    """Environment-derived settings."""

    size_guard: int = 200_000
    max_objects: int = 3
    max_morphisms: int = 8
    suite_limit: int = 300
    cache_size: int = 256
    data_dir: Path = REPO_ROOT / "data"
    log_level: str = "INFO"


def _positive_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"{name} must be positive, got {value}")
    return value


def load_settings() -> Settings:
    """Read settings from the environment (and a .env file if present)."""
    return Settings(
        size_guard=_positive_int("CATLIFT_SIZE_GUARD", 200_000),
        max_objects=_positive_int("CATLIFT_MAX_OBJECTS", 3),
        max_morphisms=_positive_int("CATLIFT_MAX_MORPHISMS", 8),
        suite_limit=_positive_int("CATLIFT_SUITE_LIMIT", 300),
        cache_size=_positive_int("CATLIFT_CACHE_SIZE", 256),
        data_dir=Path(os.getenv("CATLIFT_DATA_DIR", str(REPO_ROOT / "data"))),
        log_level=os.getenv("CATLIFT_LOG_LEVEL", "INFO").upper(),
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings dependency, read on first use."""
    return load_settings()
