"""Configuration management for the application."""

import os
from dotenv import load_dotenv

load_dotenv()


def _flag(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class Config:
    # Logging
    LOG_LEVEL = os.getenv("QEDLAB_LOG_LEVEL", "INFO")
    LOG_DIR = os.getenv("QEDLAB_LOG_DIR", "logs")
    LOG_TO_FILE = _flag("QEDLAB_LOG_TO_FILE")

    # Processor defaults
    VALUE_MODULUS = int(os.getenv("QEDLAB_VALUE_MODULUS", 8))
    CONFIG_DIR = os.getenv("QEDLAB_CONFIG_DIR", "configs")

    # Search budgets
    MAX_STATES = int(os.getenv("QEDLAB_MAX_STATES", 2_000_000))
    MAX_TESTS = int(os.getenv("QEDLAB_MAX_TESTS", 5_000_000))
    MAX_NOP_INSERTIONS = int(os.getenv("QEDLAB_MAX_NOP_INSERTIONS", 2))
    CONNECTOR_DEPTH = int(os.getenv("QEDLAB_CONNECTOR_DEPTH", 3))

    # Initial-state sampling
    INIT_SAMPLES = int(os.getenv("QEDLAB_INIT_SAMPLES", 64))
    DEFAULT_SEED = int(os.getenv("QEDLAB_DEFAULT_SEED", 0))

    # Parallelism
    DEFAULT_JOBS = int(os.getenv("QEDLAB_DEFAULT_JOBS", 1))

config = Config()
