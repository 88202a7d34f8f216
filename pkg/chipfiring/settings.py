"""
Settings Module

Reads the optional project-root .env file and exposes the limits and
defaults used by the oracles, the canonical-representative search and the
verification runner. Every value here can be overridden per call.

Values are read on attribute access (settings.ORACLE_MAX_VERTICES), so a
malformed .env entry surfaces as a ValueError where the CLI can report it.
"""

import os
from dotenv import load_dotenv

# Load .env from project root (one level up from chipfiring/)
_env_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
load_dotenv(os.path.join(_env_dir, '.env'))

# attribute name -> (.env key, default)
_INT_SETTINGS = {
    # enumeration guards (oracles are desk-scale only)
    'ORACLE_MAX_VERTICES': ('oracle_max_vertices', 8),
    'ORACLE_MAX_EDGES': ('oracle_max_edges', 16),
    'ORACLE_MAX_BOX': ('oracle_max_box', 10_000_000),
    # recurrent_representative iteration cap = factor * number of spanning trees
    'CANON_ITERATION_FACTOR': ('canon_iteration_factor', 10),
    'VERIFY_WORKERS': ('verify_workers', 1),
}


def _int_setting(key, default):
    raw = os.getenv(key)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"Setting '{key}' in .env must be an integer, got '{raw}'")


def __getattr__(name):
    if name in _INT_SETTINGS:
        return _int_setting(*_INT_SETTINGS[name])
    if name == 'VERIFY_ARTIFACT_DIR':
        return os.getenv('verify_artifact_dir') or os.path.join('Collected-Data', 'verify')
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
