import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import yaml

from src.exception import CustomException, InvalidInputError
from src.logger import logging

REPO_ROOT = Path(__file__).resolve().parents[1]
DEFAULT_CONFIG_PATH = REPO_ROOT / "config.yaml"

DEFAULT_SETTINGS = {
    "MATRIX_CACHE_PATH": "artifacts/matrices",
    "MAX_STRATEGIES": 50_000,
    "SOLVER_TOLERANCE": 1e-7,
    "LP_BACKEND": "highs",
    "DOA_MAX_ITERATIONS": 10_000,
    "DOA_ITERATION_FACTOR": 10,
    "MWU_PHI": 0.1,
    "MWU_STEPS": 10_000,
    "WORKERS": 1,
    "NAIVE_MAX_N": 8,
    "BENCH_TIMEOUT_S": 60,
    "BENCH_OUTPUT_PATH": "artifacts/bench/bench.csv",
}

_active_config_path = None


def load_config(config_path: str) -> dict:
    """
    Loads the configuration from a YAML file.

    Args:
        config_path (str): The path to the config file

    Raises:
        CustomException: If the file exists but is not valid YAML.

    Returns:
        dict: Configuration keys and values
    """
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f)
        return config or {}
    except yaml.YAMLError as e:
        error_message = f"Error parsing config file {config_path}: {str(e)}"
        logging.error(error_message)
        raise CustomException(error_message) from e


def use_config(config_path) -> None:
    """Makes `config_path` the file every later get_settings() call reads."""
    global _active_config_path
    _active_config_path = config_path
    logging.info(f"Using config file {config_path}")


def active_config_path():
    """The path set by use_config(), or None when the repository config.yaml is in use."""
    return _active_config_path


def get_settings(config_path=None) -> dict:
    """
    Built-in defaults overlaid with the YAML config, if one is present.

    Args:
        config_path (str, optional): Explicit config file. Defaults to the one set by
            use_config(), then to the repository config.yaml.

    Raises:
        InvalidInputError: If an explicitly requested config file does not exist.

    Returns:
        dict: Merged settings
    """
    config_path = config_path or _active_config_path
    path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    settings = dict(DEFAULT_SETTINGS)
    if path.exists():
        config = load_config(str(path))
        if not isinstance(config, dict):
            error_message = f"Config file {path} must hold a mapping of settings"
            logging.error(error_message)
            raise CustomException(error_message)
        settings.update(config)
    elif config_path:
        error_message = f"Config file not found: {path}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    return settings


def format_fraction(value: Fraction) -> str:
    """Exact 'numerator/denominator' text, e.g. 0 -> '0/1'."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


@contextmanager
def stopwatch():
    """Yields a dict whose 'seconds' key is filled when the block exits."""
    timing = {"seconds": 0.0}
    start = time.perf_counter()
    try:
        yield timing
    finally:
        timing["seconds"] = time.perf_counter() - start
