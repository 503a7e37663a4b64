"""
Application Configuration Settings
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Project Root
PROJECT_ROOT = Path(__file__).parent.parent

# Fixture Configuration
FIXTURES_CONFIG = {
    "base_dir": os.getenv("NCERT_FIXTURES_DIR", str(PROJECT_ROOT / "fixtures")),
}

# Sampling of sup-norms and grid checks
SAMPLING_CONFIG = {
    "samples": int(os.getenv("NCERT_SAMPLES", "2001")),
    "window_length": float(os.getenv("NCERT_WINDOW", "50.0")),
    "declared_tolerance": 1e-12,
    # findings within this fraction of a declared bound become warnings
    "warning_fraction": 0.01,
}

# Certificate evaluation and decay-rate search
CERTIFY_CONFIG = {
    "boundary_margin": float(os.getenv("NCERT_BOUNDARY_MARGIN", "1e-9")),
    "lambda_min": 1e-4,
    "lambda_max": float(os.getenv("NCERT_LAMBDA_MAX", "1.0")),
    "lambda_grid_points": int(os.getenv("NCERT_LAMBDA_POINTS", "40")),
    "bisection_tolerance": 1e-6,
    "workers": int(os.getenv("NCERT_WORKERS", "4")),
}

# Method-of-steps integration
SIMULATION_CONFIG = {
    "step": float(os.getenv("NCERT_STEP", "1e-3")),
    "t_end": float(os.getenv("NCERT_T_END", "10.0")),
    "csv_float_format": "%.17g",
    "residual_tolerance": 1e-10,
}

# Parameter sweeps
SWEEP_CONFIG = {
    "refine_tolerance": 1e-6,
    "default_tests": ["thm32", "thm32a"],
    "workers": int(os.getenv("NCERT_WORKERS", "4")),
}

# Norm selection
NORM_CONFIG = {
    "default": os.getenv("NCERT_NORM", "inf"),
    "supported": ["inf", "one"],
}

# Logging Configuration
LOGGING_CONFIG = {
    "level": os.getenv("LOG_LEVEL", "WARNING"),
    "format": os.getenv("LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"),
    "file_path": os.getenv("LOG_FILE"),
}
