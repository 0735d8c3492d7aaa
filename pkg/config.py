"""
Configuration module for the HJM quadrature Monte Carlo toolkit
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Monte Carlo
DEFAULT_SEED = int(os.getenv("HJM_SEED", "20100901"))
DEFAULT_PATHS = int(os.getenv("HJM_PATHS", "1000000"))
MAX_CONCURRENT_BLOCKS = int(os.getenv("HJM_THREADS", "4"))
PATH_BLOCK_SIZE = int(os.getenv("HJM_PATH_BLOCK", "8192"))  # paths per random stream
HALF_WIDTH_C = int(os.getenv("HJM_HALF_WIDTH_C", "2"))  # 0.95 fiducial probability

# Grids
ALPHA_ROUNDING = os.getenv("HJM_ALPHA_ROUNDING", "nearest")
DEFAULT_H_LADDER = (0.2, 0.1, 0.05, 0.025)
REFERENCE_H = float(os.getenv("HJM_REFERENCE_H", "0.0125"))
GRID_TOLERANCE = 1e-9

# Paths
BASE_DIR = Path(__file__).parent
OUTPUT_DIR = BASE_DIR / "output"
REFERENCE_FILE = OUTPUT_DIR / "reference.json"

# Caplet set at t* = 1 paying at T* = 6
CAPLET_DEFAULTS = {
    "t0": 0.0,
    "set_date": 1.0,
    "payment_dates": (6.0,),
    "strike": 0.03,
}

# Vasicek parameter sets
VASICEK_PARAMS = {
    "sigma": 0.02,
    "kappa": 1.0,
    "r0": 0.05,
    "theta": 1.0,
}
VASICEK_LOW_PARAMS = {
    "sigma": 0.02,
    "kappa": 0.178,
    "r0": 0.05,
    "theta": 0.086,
}

# Two-factor proportional volatility
PROPORTIONAL_PARAMS = {
    "sigmas": (0.1043, 0.1719),
    "kappas": (0.052, 0.035),
}
GAMMA_CAP = float(os.getenv("HJM_GAMMA_CAP", "1.0"))

# Algorithm label -> default maturity step law
STEP_LAWS = {
    "5.1": "h",
    "5.2": "sqrt",
    "5.3": "quartic",
}

CSV_HEADER = ["h", "delta", "alpha", "L", "estimate", "reference", "bias", "half_width_c2", "seconds"]
