# src/config.py

from pathlib import Path

import yaml

from src.utils.errors import InputError

# Project root
PROJECT_ROOT = Path(__file__).resolve().parents[1]

# Output paths
OUTPUT_DIR = PROJECT_ROOT / "outputs"
LOG_DIR = OUTPUT_DIR / "logs"
STUDY_DIR = OUTPUT_DIR / "study"

LOG_LEVEL = "INFO"

# --- Kernel: K(x, x') = offset + exp(-|x - x'|^2 / (2 bandwidth^2)) ---

KERNEL_FAMILY = "gaussian_plus_one"
BANDWIDTH = 1.0
KERNEL_OFFSET = 1.0

# --- Quasi-optimality grid: lambda_i = LAMBDA_0 * RHO**i, i = 1..GRID_W ---

LAMBDA_0 = 0.9
RHO = (1.0 / 9.0) ** (1.0 / 9.0)
GRID_W = 9

# --- Simulation study (p ~ N(2, 5), q ~ N(mu_q, 0.5), mean/variance) ---

N_SAMPLES = 100
M_SAMPLES = 100
MU_P = 2.0
VAR_P = 5.0
MU_Q_LIST = [2.0, 3.0, 4.0]
VAR_Q = 0.5
K_LIST = [1, 2, 3, 5, 10]
REPLICATIONS = 20
SEED = 20240601

# Probe grid for pointwise errors: (start, stop, count)
POINTWISE_GRID = (-2.0, 6.0, 81)

# --- Rate study ---

RATE_N_LIST = [50, 100, 200, 400]
RATE_ETA = 1.0
RATE_VARSIGMA = 0.5
RATE_K = 10

# --- Numerical tolerances ---

PSD_RTOL = 1e-10              # tol_psd = PSD_RTOL * n * max diagonal
CHRISTOFFEL_FLOOR = -1e-10    # C_lambda below this is a numerical error
LAMBDA_STAR_LO = 1e-8
LAMBDA_STAR_RTOL = 1e-9

# --- Capacity probes ---

PROBE_SIZE = 200
PROBE_INFLATE = 0.2

# --- Scheme constant checks ---

CHECK_GRID_SIZE = 2000
CHECK_T_MIN_RATIO = 1e-10     # grid starts at t_max * ratio


def load_config_file(path) -> dict:
    """
    Reads a YAML or JSON run configuration into a flat dict.
    Keys use the CLI flag names with dashes replaced by underscores.
    """

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config not found: {path}")

    with open(path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise InputError(f"Config {path} is not valid YAML/JSON: {e}", flag="config") from e

    if not isinstance(data, dict):
        raise InputError(f"Config {path} must contain a mapping, got {type(data).__name__}", flag="config")

    return {str(k).replace("-", "_"): v for k, v in data.items()}
