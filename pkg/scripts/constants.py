import os

# Counting sort, hierarchical queues and level compression are used below
# this quantization; radix sort and a comparison heap at or above it.
SORT_SWITCH_BITS = 18

# Parent-array sentinels. Both lie outside [0, n).
UNPROCESSED = -1
INQUEUE = -2

MAX_BIT_DEPTH = 32
ORACLE_MAX_PIXELS = 10_000
DEFAULT_BENCH_SEED = 2013
MAX_TILE_FACTOR = 16  # per side; larger upscales are rejected by the bench

WORKERS_ENV = "MAXTREE_WORKERS"

# Defaults, overridden by config.py when present
try:
    from scripts.config import MAXTREE_CONFIG  # type: ignore[import]
    DEFAULT_CONNECTIVITY: int = MAXTREE_CONFIG["connectivity"]
    DEFAULT_PARALLEL_BASE: str = MAXTREE_CONFIG["parallel_base"]
    DEFAULT_WORKERS: int = MAXTREE_CONFIG.get("workers", 1)
except ImportError:
    DEFAULT_CONNECTIVITY = 4
    DEFAULT_PARALLEL_BASE = "uf_levelcomp"
    DEFAULT_WORKERS = 1
except KeyError as e:
    raise KeyError(f"config.py is present but missing required key: {e}") from e

try:
    DEFAULT_WORKERS = max(1, int(os.environ.get(WORKERS_ENV, DEFAULT_WORKERS)))
except ValueError:
    DEFAULT_WORKERS = 1
