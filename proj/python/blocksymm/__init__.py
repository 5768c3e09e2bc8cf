"""Python access to the blocksymm library."""

import json

from ._core import (
    ConfigError,
    DomainError,
    NumericalError,
    VacuousBoundError,
    ValidationError,
    concentration_general,
    concentration_lq,
    concentration_subexp,
    exact_enumeration,
    hoeffding_factor,
    kolmogorov_distance,
    optimal_truncation,
    psi_eval,
    remainder_r1,
    remainder_r2,
    remainder_rn,
)
from . import _core


def validate_config(config):
    """Raise ConfigError listing every problem in a config mapping."""
    _core.validate_config(json.dumps(config))


def run(config):
    """Run a config mapping. Returns (exit_code, list of report dicts)."""
    code, docs = _core.run_config_json(json.dumps(config))
    return code, [json.loads(d) for d in docs]


__all__ = [
    "ConfigError",
    "DomainError",
    "NumericalError",
    "VacuousBoundError",
    "ValidationError",
    "concentration_general",
    "concentration_lq",
    "concentration_subexp",
    "exact_enumeration",
    "hoeffding_factor",
    "kolmogorov_distance",
    "optimal_truncation",
    "psi_eval",
    "remainder_r1",
    "remainder_r2",
    "remainder_rn",
    "run",
    "validate_config",
]
