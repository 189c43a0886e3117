"""Seeded simulator of proactive result caching and delay-constrained task
matching in a fog network of cloudlets and user nodes."""

__version__ = "0.1.0"

from .config import ConfigError, ScenarioConfig, config_from_dict, load_config
from .engine import Engine, EngineError, RunResult, run
from .rng import RandomSource

__all__ = [
    "ConfigError", "ScenarioConfig", "config_from_dict", "load_config",
    "Engine", "EngineError", "RunResult", "run", "RandomSource",
    "__version__",
]
