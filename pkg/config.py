"""
Environment settings
"""

import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

# Load .env next to this file
load_dotenv(dotenv_path=Path(__file__).with_name(".env"))


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() == "true"


def _int(name: str, default: int) -> int:
    try:
        return max(1, int(os.getenv(name, str(default))))
    except ValueError:
        return default


LOG_LEVEL = os.getenv("MATCHMAKER_LOG_LEVEL", "WARNING").upper()
LOG_FILE: Optional[str] = os.getenv("MATCHMAKER_LOG_FILE") or None

# Pairwise φ evaluation pool size; 1 runs sequentially
WORKERS = _int("MATCHMAKER_WORKERS", 1)

# Assert E ⊓ D ≡ C after every semantic difference
CHECK_RECONSTRUCTION = _flag("MATCHMAKER_CHECK_RECONSTRUCTION", "true")
