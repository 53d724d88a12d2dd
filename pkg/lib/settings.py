import copy
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from loguru import logger

from lib.errors import ParseError

SETTINGS_FILE = Path(__file__).parent.parent / "settings.json"

DEFAULT_SETTINGS: Dict[str, Any] = {
    "tolerances": {
        "distinctness": 1e-9,
        "residual": 1e-6,
        "multiplicity_residual": 1e-6,
        "remark": 1e-9,
        "clifford": 1e-12,
        "strictness_margin": 1e-12,
        "pole_margin": 1e-6,
        "bisection_xtol": 1e-12,
        "bisection_max_iter": 200,
    },
    "scan": {
        "trials": 100,
        "n_range": [3, 6],
        "rational_bound": 50,
        "seed": 0,
        "workers": 1,
    },
    "isoparametric": {
        "samples": 100,
    },
    "logging": {
        "console_level": "INFO",
        "file_enabled": False,
        "file_path": "logs/rigiditykit.log",
    },
}

# Dimensions the scan is allowed to sweep
N_MIN = 3
N_MAX = 16

_settings = None


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_settings() -> Dict[str, Any]:
    """Load settings from settings.json over the built-in defaults. Caches result.

    RIGIDITYKIT_SETTINGS may point at an alternative file.
    """
    global _settings
    if _settings is None:
        settings_path = Path(os.getenv("RIGIDITYKIT_SETTINGS", SETTINGS_FILE))
        if settings_path.exists():
            with open(settings_path) as f:
                _settings = _merge(DEFAULT_SETTINGS, json.load(f))
            logger.debug(f"[Settings] Loaded {settings_path}")
        else:
            logger.debug(f"[Settings] {settings_path} not found, using defaults")
            _settings = copy.deepcopy(DEFAULT_SETTINGS)
    return _settings


def reset_settings():
    """Drop the cached settings (next load re-reads the file)."""
    global _settings
    _settings = None


# =============================================================================
# TYPED VIEWS
# =============================================================================

@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by every module."""
    distinctness: float = 1e-9
    residual: float = 1e-6
    multiplicity_residual: float = 1e-6
    remark: float = 1e-9
    clifford: float = 1e-12
    strictness_margin: float = 1e-12
    pole_margin: float = 1e-6
    bisection_xtol: float = 1e-12
    bisection_max_iter: int = 200

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value > 0:
                raise ParseError(f"tolerance '{name}' must be positive, got {value}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Tolerances":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        if "bisection_max_iter" in known:
            known["bisection_max_iter"] = int(known["bisection_max_iter"])
        return cls(**known)

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


@dataclass(frozen=True)
class ScanDefaults:
    trials: int
    n_range: Tuple[int, int]
    rational_bound: int
    seed: int
    workers: int


def get_tolerances(override: Optional[Tolerances] = None) -> Tolerances:
    if override is not None:
        return override
    return Tolerances.from_dict(load_settings()["tolerances"])


def get_scan_defaults() -> ScanDefaults:
    scan = load_settings()["scan"]
    lo, hi = scan["n_range"]
    return ScanDefaults(
        trials=int(scan["trials"]),
        n_range=(int(lo), int(hi)),
        rational_bound=int(scan["rational_bound"]),
        seed=int(scan["seed"]),
        workers=int(scan["workers"]),
    )
