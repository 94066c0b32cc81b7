from dotenv import load_dotenv

from src.env_utils import env_int, env_str

# Load environment variables from .env file
load_dotenv()

# Logging
LOG_LEVEL = (env_str('PROBGEO_LOG_LEVEL', 'WARNING') or 'WARNING').upper()
LOG_FILE = env_str('PROBGEO_LOG_FILE')
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Randomness
DEFAULT_SEED = env_int('PROBGEO_DEFAULT_SEED', 0, minimum=0)

# Barycenter pullback: coordinate means this close to the codomain edge are rejected
BOUNDARY_TOL = 1e-12
# ... and this close are reported with boundary_flag set
BOUNDARY_FLAG_TOL = 1e-9

# Moment pullback is attempted only strictly inside (DEFINED_TOL, 1 - DEFINED_TOL)
DEFINED_TOL = 1e-12

# Chart invariants
INVERSION_ATOL = 1e-10
INVERSION_RTOL = 1e-10
BISECTION_WIDTH = 1e-13
BISECTION_MAX_ITER = 400
BRACKET_MAX_DOUBLINGS = 1100

# Quadrature in the p-variable
QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 200
QUAD_MAX_ERROR = 1e-10

# Output
FLOAT_FORMAT = '%.17g'
