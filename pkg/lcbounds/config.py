import logging
import os
from pathlib import Path

from dotenv import load_dotenv
from pythonjsonlogger import jsonlogger

ROOT_DIR = Path(__file__).parent
load_dotenv(ROOT_DIR / '.env')

# Verification tolerances
NUM_TOL = float(os.environ.get('LCB_NUM_TOL', '1e-7'))
EQ_TOL = float(os.environ.get('LCB_EQ_TOL', '1e-8'))

# Adaptive quadrature
QUAD_ABS_TOL = float(os.environ.get('LCB_QUAD_ABS_TOL', '1e-10'))
QUAD_REL_TOL = float(os.environ.get('LCB_QUAD_REL_TOL', '1e-8'))

# Suite defaults
DEFAULT_TRIALS = int(os.environ.get('LCB_DEFAULT_TRIALS', '1000'))
DEFAULT_SEED = int(os.environ.get('LCB_DEFAULT_SEED', '0'))
MAX_SUPPORT_LEN = int(os.environ.get('LCB_MAX_SUPPORT_LEN', '200'))
MAX_KNOTS = int(os.environ.get('LCB_MAX_KNOTS', '256'))
N_JOBS = int(os.environ.get('LCB_N_JOBS', '1'))

LOG_LEVEL = os.environ.get('LCB_LOG_LEVEL', 'INFO')
LOG_FORMAT = os.environ.get('LCB_LOG_FORMAT', 'text')

LOG_LINE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging(level: str = LOG_LEVEL, fmt: str = LOG_FORMAT) -> None:
    """Configure root logging for CLI runs"""
    logging.basicConfig(level=level.upper(), format=LOG_LINE_FORMAT, force=True)
    if fmt == 'json':
        formatter = jsonlogger.JsonFormatter(LOG_LINE_FORMAT)
        for handler in logging.getLogger().handlers:
            handler.setFormatter(formatter)
