from pathlib import Path


VERSION = "0.1.0"

# Grid resolution
MIN_CELLS_PER_BANDWIDTH = 16
MIN_RESOLUTION = 2
DEFAULT_RESOLUTION = {1: 2**14, 2: 2**9}

# Sub-samples per cell and axis used to cell-average kernel stencils
STENCIL_SUBSAMPLES = {1: 32, 2: 4}

# Kernel quadrature (composite midpoint rule)
QUADRATURE_NODES = {1: 2**14, 2: 2**9}
DERIVATIVE_NODES = {1: 2**10, 2: 2**7}
MOMENT_TOLERANCE = 1e-6
GAMMA_TOLERANCE = 0.1
DERIVATIVE_GROWTH_TOLERANCE = 0.5
DEFAULT_SHIFTS = (2**-2, 2**-3, 2**-4, 2**-5, 2**-6, 2**-7)
MAX_DYADIC_STEP = 4

# Bandwidth rule
DEFAULT_C = 1.0
# Default bandwidth constant of Lepski procedures
LEPSKI_DEFAULT_C = 0.5
MAX_BANDWIDTH = 0.5

# Seminorm diagnostics
SEMINORM_WINDOW_FRACTION = 4
DIVERGENCE_FACTOR = 2**0.1
WEIERSTRASS_ALIASING_FACTOR = 8
HIGHER_HOLDER_CELLS_PER_ORDER = 8

# Verdict thresholds
EXPONENT_TOLERANCE = 0.1
BOUNDED_MEDIAN_FACTOR = 1.5
GROWTH_FACTOR = 2.0
MONTE_CARLO_SLACK = 3.0
MIN_RATE_FIT_ROWS = 4
MIN_LEMMA1_REPLICATIONS = 50

# Lepski calibration
CALIBRATION_REPLICATIONS = 200
CALIBRATION_QUANTILE = 0.95
CALIBRATION_SAFETY = 1.2

# Defaults for experiments
DEFAULT_SIGMA = 1.0
DEFAULT_P = 2.0
DEFAULT_N_GRID = [4**k for k in range(5, 12)]

MEMBER = "member"
NON_MEMBER = "non-member"
BOUNDARY = "boundary"

# Reports
CSV_HEADER = ["n", "h", "risk", "std_error", "bias_sup", "variance_risk", "psi", "ratio"]
CSV_FILE = Path("risk.csv")
SUMMARY_FILE = Path("summary.json")
PLOT_FILE = Path("risk.svg")
MANIFEST_FILE = Path("manifest.json")
SIGNIFICANT_DIGITS = 12
OUTPUT_DIR_ENV = "SIMPLE_MAXISET_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = Path("maxiset_output")

# Exit codes
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
