"""Constants for regraph."""

from __future__ import annotations

DOMAIN = "regraph"

# Environment
ENV_THREADS = "REGRAPH_THREADS"
ENV_LOG_LEVEL = "REGRAPH_LOG_LEVEL"

# Config keys
CONF_METHODS = "methods"
CONF_TIMEOUTS = "timeouts"
CONF_TIMEOUT_OVERRIDE = "timeout_secs"
CONF_REPETITIONS = "repetitions"
CONF_REPEAT_UP_TO = "repeat_up_to_n"
CONF_WORKERS = "workers"
CONF_SERIAL = "serial"
CONF_SEED = "seed"

# Graph generation
DEFAULT_RETRY_BUDGET = 1000
PAIRINGS_PER_ATTEMPT = 32
DEFAULT_VERIFY_UP_TO = 64
MIN_DEGREE = 2

# Patterns
MAX_BRUTE_FORCE_K = 12

# Scores
CHI_DISPLAY_DIGITS = 12

# WL tuple table guard, counted across both graphs of a pair
DEFAULT_WL_MAX_TUPLES = 1 << 22

# Bench defaults
DEFAULT_TIMEOUTS: dict[int, float] = {3: 10.0, 4: 30.0, 5: 90.0}
DEFAULT_TIMEOUT_FALLBACK = 10.0
DEFAULT_REPETITIONS = 3
DEFAULT_REPEAT_UP_TO = 1000
DESK_SIZES = [50, 100, 200, 400, 800]
DESK_PAIRS = 50
FULL_SIZES = [100, 500, 1000, 5000, 10000]
FULL_PAIRS = 500
DEFAULT_WORKERS = 0  # 0: resolve from the environment, then the CPU count

# Calibration dataset for the default GENEO model
CALIBRATION_DEGREES = [3, 4, 5]
CALIBRATION_SIZES = list(range(8, 41, 4))
CALIBRATION_GRAPHS_PER_CELL = 6
CALIBRATION_SEED = 2024
DEFAULT_MODEL_SIZE = 3
CALIBRATION_MAX_K = 7  # candidate patterns for calibration have at most this many nodes

METHOD_GENEO = ("geneo-1", "geneo-2", "geneo-3")
METHOD_WL = ("wl-1", "wl-2", "wl-3")
METHOD_FILTER = ("filter-faster", "filter-fast", "filter-could")
METHOD_EXACT = "exact"
METHOD_OPTIONS = [*METHOD_GENEO, *METHOD_WL, *METHOD_FILTER, METHOD_EXACT]

FILTER_LEVELS = ("faster", "fast", "could")

# Cycle-with-pendant-star specs for the default roster: every binary
# pendant pattern on C3..C6 up to rotation and reflection, plus one
# double pendant on the triangle.
CYCLE_STAR_SPECS: list[tuple[int, ...]] = [
    (1, 0, 0),
    (1, 1, 0),
    (1, 1, 1),
    (2, 0, 0),
    (1, 0, 0, 0),
    (1, 1, 0, 0),
    (1, 0, 1, 0),
    (1, 1, 1, 0),
    (1, 1, 1, 1),
    (1, 0, 0, 0, 0),
    (1, 1, 0, 0, 0),
    (1, 0, 1, 0, 0),
    (1, 1, 1, 0, 0),
    (1, 1, 0, 1, 0),
    (1, 1, 1, 1, 0),
    (1, 1, 1, 1, 1),
    (1, 0, 0, 0, 0, 0),
    (1, 1, 0, 0, 0, 0),
    (1, 0, 1, 0, 0, 0),
    (1, 0, 0, 1, 0, 0),
    (1, 1, 1, 0, 0, 0),
    (1, 1, 0, 1, 0, 0),
    (1, 0, 1, 0, 1, 0),
    (1, 1, 1, 1, 0, 0),
    (1, 1, 1, 0, 1, 0),
    (1, 1, 0, 1, 1, 0),
    (1, 1, 1, 1, 1, 0),
    (1, 1, 1, 1, 1, 1),
]

MANIFEST_FILENAME = "manifest.json"
GRAPH_DIR = "graphs"
GRAPH_SUFFIX = ".edges"
