"""Rational-ball covers and Cantor schemes on self-similar sets."""

import json

from ._vwak import (
    ConfigError,
    DegenerateFit,
    SchemeError,
    build_scheme,
    count_table,
    critical_exponent,
    dimension,
    frostman_scan,
    hull,
    load_config,
    mass_summary,
    measure_interval,
    run,
)

CANTOR = [("1/3", "0"), ("1/3", "2/3")]


def build_tree(maps, v, **kwargs):
    """Scheme tree as a parsed JSON document."""
    return json.loads(build_scheme(maps, v, **kwargs))


__all__ = [
    "CANTOR",
    "ConfigError",
    "DegenerateFit",
    "SchemeError",
    "build_scheme",
    "build_tree",
    "count_table",
    "critical_exponent",
    "dimension",
    "frostman_scan",
    "hull",
    "load_config",
    "mass_summary",
    "measure_interval",
    "run",
]
