"""
Parallel max-tree by map-reduce over row bands.

Map: each band gets a parent array from a sequential builder with S output and
canonization stripped. Reduce: adjacent regions are merged along their junction
row following a balanced binary plan. The merged parent is then canonized and S
rebuilt in one top-down pass.
"""
from __future__ import annotations

import logging
from collections.abc import Callable, MutableSequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from scripts.constants import DEFAULT_CONNECTIVITY, DEFAULT_PARALLEL_BASE, DEFAULT_WORKERS
from scripts.flooding import nonrec_parent, salembier_parent
from scripts.image_core import Connectivity, Image2D
from scripts.timing import PhaseTimer, timer_or_null
from scripts.tree_repr import MaxTree, canonize_rebuild_S
from scripts.union_find import uf_levelcomp_parent, uf_parent, uf_rank_parent

_log = logging.getLogger("maxtree")

ParentBuilder = Callable[[Image2D, Connectivity], np.ndarray]

PARENT_BUILDERS: dict[str, ParentBuilder] = {
    "uf": uf_parent,
    "uf_rank": uf_rank_parent,
    "uf_levelcomp": uf_levelcomp_parent,
    "salembier": salembier_parent,
    "nonrec": nonrec_parent,
}


@dataclass(frozen=True)
class DomainSplit:
    bands: tuple[tuple[int, int], ...]

    @classmethod
    def rows(cls, height: int, num_bands: int) -> DomainSplit:
        chunks = np.array_split(np.arange(height), num_bands)
        return cls(tuple((int(c[0]), int(c[-1]) + 1) for c in chunks))

    def __len__(self) -> int:
        return len(self.bands)


@dataclass(frozen=True)
class Merge:
    """Join region bands[lo:mid] with bands[mid:hi]; the junction is the first row of bands[mid]."""
    lo: int
    mid: int
    hi: int


@dataclass
class MergePlan:
    num_bands: int
    merges: list[tuple[int, Merge]] = field(default_factory=list)  # (height in plan, merge)

    @classmethod
    def balanced(cls, num_bands: int) -> MergePlan:
        plan = cls(num_bands)
        plan._split(0, num_bands)
        return plan

    def _split(self, lo: int, hi: int) -> int:
        if hi - lo == 1:
            return 0
        mid = (lo + hi) // 2
        height = max(self._split(lo, mid), self._split(mid, hi)) + 1
        self.merges.append((height, Merge(lo, mid, hi)))
        return height

    def rounds(self) -> list[list[Merge]]:
        """Merges grouped so that every group only depends on earlier groups."""
        if not self.merges:
            return []
        depth = max(h for h, _ in self.merges)
        return [[m for h, m in self.merges if h == d] for d in range(1, depth + 1)]


@dataclass
class MergeStats:
    connect_calls: int = 0
    merges: int = 0


def findrepr(parent: MutableSequence[int], values, p: int) -> int:
    """Level root of p's flat zone; the traversed flat path is pointed at it."""
    root = p
    while True:
        q = parent[root]
        if q == root or values[q] != values[root]:
            break
        root = q
    while p != root:
        parent[p], p = root, parent[p]
    return root


def connect(parent: MutableSequence[int], values, p: int, q: int) -> None:
    """Interleave the root paths of p and q by decreasing level until they meet."""
    x = findrepr(parent, values, p)
    y = findrepr(parent, values, q)
    if values[x] < values[y]:
        x, y = y, x
    while x != y:
        z = parent[x] = findrepr(parent, values, parent[x])
        if x == z:
            parent[x] = y
            y = x
        elif values[z] >= values[y]:
            x = z
        else:
            parent[x] = y
            x = y
            y = z


def merge_regions(parent: MutableSequence[int], values, width: int, junction_row: int,
                  conn: Connectivity, stats: MergeStats | None = None) -> int:
    """Connect every neighbor pair across the row boundary above junction_row."""
    upper = (junction_row - 1) * width
    lower = junction_row * width
    offsets = (0,) if conn == Connectivity.C4 else (-1, 0, 1)
    calls = 0
    for c in range(width):
        for dc in offsets:
            cc = c + dc
            if 0 <= cc < width:
                connect(parent, values, upper + c, lower + cc)
                calls += 1
    if stats is not None:
        stats.connect_calls += calls
        stats.merges += 1
    return calls


def _build_band(img: Image2D, band: tuple[int, int], conn: Connectivity,
                builder: ParentBuilder) -> tuple[int, np.ndarray]:
    begin, end = band
    start, stop = begin * img.width, end * img.width
    sub = Image2D(img.width, end - begin, img.values[start:stop], img.bit_depth)
    return start, builder(sub, conn) + start


def maxtree_parallel(img: Image2D, conn: Connectivity = DEFAULT_CONNECTIVITY,
                     base_algo: str = DEFAULT_PARALLEL_BASE, num_bands: int = 2,
                     max_workers: int | None = None, *,
                     timer: PhaseTimer | None = None,
                     stats: MergeStats | None = None) -> MaxTree:
    if base_algo not in PARENT_BUILDERS:
        raise ValueError(f"Unknown base algorithm {base_algo!r}; choose from {sorted(PARENT_BUILDERS)}")
    if num_bands < 1:
        raise ValueError(f"num_bands must be >= 1, got {num_bands}")
    if num_bands > img.height:
        _log.warning("Requested %d bands for %d rows; using %d", num_bands, img.height, img.height)
        num_bands = img.height
    conn = Connectivity.parse(conn)
    timer = timer_or_null(timer)
    workers = max_workers or DEFAULT_WORKERS
    split = DomainSplit.rows(img.height, num_bands)
    builder = PARENT_BUILDERS[base_algo]
    _log.debug("Parallel build: %d bands %s, base %s, %d worker(s)", len(split), split.bands, base_algo, workers)

    parent = np.empty(img.n, dtype=np.int64)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        with timer.phase("build"):
            futures = [pool.submit(_build_band, img, band, conn, builder) for band in split.bands]
            for fut in futures:
                start, band_parent = fut.result()
                parent[start:start + band_parent.size] = band_parent

        with timer.phase("merge"):
            par = parent.tolist()
            values = img.values.tolist()
            for round_ in MergePlan.balanced(len(split)).rounds():
                futures = [
                    pool.submit(merge_regions, par, values, img.width, split.bands[m.mid][0], conn)
                    for m in round_
                ]
                for fut in futures:
                    calls = fut.result()
                    if stats is not None:
                        stats.connect_calls += calls
                        stats.merges += 1

    with timer.phase("canonize+S"):
        return canonize_rebuild_S(img, np.asarray(par, dtype=np.int64))
