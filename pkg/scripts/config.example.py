# Copy this file to config.py. Do not commit config.py to version control.

# --- Builders ---
# connectivity:  4 or 8; used when the CLI is not given --connectivity
# parallel_base: sequential builder run on each band by the "parallel" algorithm
#                (uf, uf_rank, uf_levelcomp, salembier, nonrec)
# workers:       default worker count for map-reduce; MAXTREE_WORKERS wins when set
MAXTREE_CONFIG = {
    "connectivity": 4,
    "parallel_base": "uf_levelcomp",
    "workers": 4,
}

# --- Benchmark ---
# Presets live in config/bench_sweeps.yaml. Point the CLI at another file with
#   python scripts/run_maxtree.py bench --config my_sweeps.yaml
