import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from project root
project_root = Path(__file__).parent.parent
load_dotenv(project_root / '.env')

class Config:
    VERSION = '1.0.0'

    GROUP_CAP = int(os.getenv('SEPDEG_GROUP_CAP', 2048))
    POINT_CAP = int(os.getenv('SEPDEG_POINT_CAP', 200000))
    CACHE_DIR = os.getenv('SEPDEG_CACHE_DIR')
    JOBS = int(os.getenv('SEPDEG_JOBS', 1))
    LOG_LEVEL = os.getenv('SEPDEG_LOG_LEVEL', 'INFO')

    # Seconds one brute-force delta/gamma job may take inside the built-in suite
    HEAVY_BUDGET = float(os.getenv('SEPDEG_HEAVY_BUDGET', 180))
    FALLBACK_DEGREE = 4

    # Rank-nullity and V0-stability assertions on every call
    STRICT_CHECKS = os.getenv('SEPDEG_STRICT_CHECKS', '0') == '1'

    # Widest dense block handed to row reduction; larger ones raise ComponentTooLarge
    COMPONENT_LIMIT = int(os.getenv('SEPDEG_COMPONENT_LIMIT', 1500))

    # Extension fields up to this size get table-driven vector arithmetic,
    # larger ones polynomial-basis arithmetic on coefficient digits
    TABLE_FIELD_LIMIT = 256
    FIELD_SIZE_LIMIT = 2 ** 20

    # Conway-style moduli, constant term first
    BUILTIN_MODULI = {
        (2, 1): (0, 1),
        (2, 2): (1, 1, 1),
        (3, 1): (0, 1),
        (3, 2): (2, 2, 1),
        (5, 1): (0, 1),
    }
