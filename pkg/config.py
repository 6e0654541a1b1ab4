"""
Configuration for the Big -1 Jacobi toolkit
Loads tolerances and overrides from environment variables,
named parameter sets from params.yaml
"""

import os
from fractions import Fraction
from typing import Dict

import yaml
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    return float(raw)


# Quadrature defaults (univariate paths)
QUAD_ABS_TOL = 1e-12
QUAD_REL_TOL = _env_float("M1J_QUAD_TOL", 1e-10)
QUAD_LEVEL_MAX = 12

# Nested 2D quadrature is coarser; Gram checks need 1e-6
BIV_QUAD_ABS_TOL = 1e-13
BIV_QUAD_REL_TOL = min(QUAD_REL_TOL * 10, 1e-8)
BIV_QUAD_LEVEL_MAX = 8

# Suite tolerances
TOLERANCES = {
    "exact": 0.0,
    "uni_orthogonality": 1e-8,
    "norm_triangle": 1e-8,
    "chihara_relation": 1e-10,
    "biv_orthogonality": 1e-6,
    "projection": 1e-7,
    "pearson": 1e-10,
    "q_identity": 1e-9,
    "limit_order": 0.3,
    "operator_limit": 1e-3,
    "positivity": 0.0,
}

# q -> -1 limit sequence
LIMIT_EPSILONS = (1e-2, 1e-3, 1e-4)

# Default suite sizes
DEFAULT_N_MAX = {
    "uni": 8,
    "chihara": 6,
    "biv_exact": 5,
    "biv_gram": 4,
    "projection": 3,
    "recurrence": 4,
    "limit": 3,
    "q": 4,
    "commutation_degree": 6,
}
DEFAULT_PEARSON_GRID = 10
POSITIVITY_SAMPLES = 1000
RANDOM_SEED = 20140101

# Worker threads for suites
JOBS = int(os.getenv("M1J_JOBS", "1"))

# Files
PARAMS_FILE = os.getenv("M1J_PARAMS_FILE", "params.yaml")
DEVIATIONS_FILE = os.path.join("output", "deviations.json")


def parse_scalar(value):
    """'p/q' strings and ints become Fraction; decimals stay float"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    text = str(value).strip()
    try:
        return Fraction(text) if ("/" in text or text.lstrip("+-").isdigit()) else float(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {value!r}") from None


def load_parameter_sets(path: str = None) -> Dict[str, list]:
    """Load named parameter sets from the YAML file"""
    path = path or PARAMS_FILE
    if not os.path.exists(path):
        return {}
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    sets = {}
    for name, entries in data.items():
        sets[name] = [
            {key: val if key == "kind" else parse_scalar(val) for key, val in entry.items()} for entry in entries or []
        ]
    return sets


def validate_config():
    """Validate tolerances and the parameter file"""
    if QUAD_REL_TOL <= 0 or QUAD_ABS_TOL <= 0:
        raise ValueError(
            "Quadrature tolerances must be positive.\n"
            "Check M1J_QUAD_TOL in your .env file"
        )
    if JOBS < 1:
        raise ValueError("M1J_JOBS must be at least 1")
    sets = load_parameter_sets()

    print("✓ Configuration loaded successfully")
    print(f"✓ Quadrature: abs {QUAD_ABS_TOL:g}, rel {QUAD_REL_TOL:g}, level_max {QUAD_LEVEL_MAX}")
    print(f"✓ Worker threads: {JOBS}")
    print(f"✓ Parameter sets: {', '.join(sets) if sets else 'none (' + PARAMS_FILE + ' missing)'}")
    return True
