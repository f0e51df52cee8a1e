"""Registry of max-tree builders addressable by id from the CLI and the benchmark."""
from __future__ import annotations

from collections.abc import Callable

from scripts.constants import DEFAULT_CONNECTIVITY, DEFAULT_PARALLEL_BASE
from scripts.flooding import maxtree_nonrec, maxtree_salembier
from scripts.image_core import Connectivity, Image2D
from scripts.mapreduce import MergeStats, maxtree_parallel
from scripts.timing import PhaseTimer
from scripts.tree_repr import MaxTree
from scripts.union_find import maxtree_uf, maxtree_uf_levelcomp, maxtree_uf_rank

SEQUENTIAL_BUILDERS: dict[str, Callable[..., MaxTree]] = {
    "uf": maxtree_uf,
    "uf_rank": maxtree_uf_rank,
    "uf_levelcomp": maxtree_uf_levelcomp,
    "salembier": maxtree_salembier,
    "nonrec": maxtree_nonrec,
}

ALGORITHM_IDS: tuple[str, ...] = (*SEQUENTIAL_BUILDERS, "parallel")

DEFAULT_BANDS = 2


def build_tree(
    img: Image2D,
    algorithm: str,
    conn: Connectivity | int = DEFAULT_CONNECTIVITY,
    bands: int | None = None,
    workers: int | None = None,
    base: str = DEFAULT_PARALLEL_BASE,
    timer: PhaseTimer | None = None,
    merge_stats: MergeStats | None = None,
) -> MaxTree:
    """
    Build with the named algorithm. Giving bands to a sequential id runs the
    map-reduce builder with that id on each band.
    """
    if algorithm not in ALGORITHM_IDS:
        raise ValueError(f"Unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHM_IDS)}")
    if algorithm == "parallel" or bands is not None:
        return maxtree_parallel(
            img,
            conn,
            base_algo=base if algorithm == "parallel" else algorithm,
            num_bands=bands if bands is not None else DEFAULT_BANDS,
            max_workers=workers,
            timer=timer,
            stats=merge_stats,
        )
    return SEQUENTIAL_BUILDERS[algorithm](img, conn, timer=timer)
