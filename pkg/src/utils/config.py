"""
Path and environment configuration for MNPCA.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Root directory of the project (one level up from src/)
ROOT_DIR = Path(__file__).parent.parent.parent

load_dotenv(ROOT_DIR / ".env")

# Directory paths
DATA_DIR = ROOT_DIR / "data"
LOGS_DIR = ROOT_DIR / "logs"
RESULTS_DIR = ROOT_DIR / "results"
CONFIGS_DIR = ROOT_DIR / "configs"

# Logging
LOG_LEVEL = os.getenv("MNPCA_LOG_LEVEL", "INFO").upper()
LOG_FILE = LOGS_DIR / "mnpca.log"

# Kaggle CSV form of the FashionMNIST test split
FASHION_MNIST_CSV = Path(
    os.getenv("MNPCA_FASHION_MNIST_CSV", str(DATA_DIR / "fashion-mnist_test.csv"))
)

# Create necessary directories
for directory in [DATA_DIR, LOGS_DIR, RESULTS_DIR]:
    directory.mkdir(parents=True, exist_ok=True)

__all__ = [
    'ROOT_DIR',
    'DATA_DIR',
    'LOGS_DIR',
    'RESULTS_DIR',
    'CONFIGS_DIR',
    'LOG_LEVEL',
    'LOG_FILE',
    'FASHION_MNIST_CSV',
]
