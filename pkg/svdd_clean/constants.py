import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from xdg import xdg_data_home

_EMBED_URL_ENV = "SVDD_CLEAN_EMBED_URL"
_DATA_PATH_ENV = "SVDD_CLEAN_DATA_PATH"
_LOG_LEVEL_ENV = "SVDD_CLEAN_LOG_LEVEL"

FORMAT_VERSION = 1

# Base URL of the remote embedding service, unless overridden by config or env
DEFAULT_EMBED_URL = "http://localhost:8080"

BASE_DATA_PATH = (
    Path(os.environ[_DATA_PATH_ENV])
    if _DATA_PATH_ENV in os.environ
    else Path(xdg_data_home(), "svdd-clean")
)


def _log_level(arg):
    level = getattr(logging, arg.upper(), None)
    if not isinstance(level, int):
        raise ValueError(f"Invalid log level '{arg}'")
    return level


LOG_LEVEL = (
    _log_level(os.environ[_LOG_LEVEL_ENV])
    if _LOG_LEVEL_ENV in os.environ
    else logging.INFO
)


def embed_url_override() -> Optional[str]:
    # Read lazily so the env var wins over config files and flags at call time
    return os.environ.get(_EMBED_URL_ENV) or None


# Smallest class a per-class model is fitted on without --allow-small-classes
MIN_CLASS_SIZE = 500

DEFAULT_THRESHOLD = 0.6
DEFAULT_THRESHOLDS = (0.2, 0.4, 0.6, 0.8, 1.0)

JsonDict = Dict[str, Any]
