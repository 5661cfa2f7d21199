"""
Centralized path management for the toolkit.
"""
import os
from pathlib import Path

from dotenv import load_dotenv

# Base project directory
# Priority: 1. Environment variable EHNET_HOME (also read from .env)
#          2. Repository root (parent of src)
_REPO_ROOT = Path(__file__).parent.parent.parent
load_dotenv(_REPO_ROOT / ".env")

EHNET_HOME = Path(os.environ.get('EHNET_HOME', _REPO_ROOT))

# Core directories
PROJECT_DIR = EHNET_HOME
CONFIG_DIR = PROJECT_DIR / "config"
LOGS_DIR = PROJECT_DIR / "logs"


def resolve(path: str) -> Path:
    """Resuelve rutas relativas contra EHNET_HOME."""
    p = Path(path)
    return p if p.is_absolute() else PROJECT_DIR / p
