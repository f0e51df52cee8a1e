"""
Immersion builders: pixels are processed from the brightest down and merged into
the components of already-processed neighbors with a union-find forest (zpar).

zpar is a scratch structure only; path compression and balancing apply to it and
never to parent.
"""
from __future__ import annotations

import logging
from collections.abc import Callable, MutableSequence
from dataclasses import dataclass

import numpy as np

from scripts.constants import DEFAULT_CONNECTIVITY, SORT_SWITCH_BITS, UNPROCESSED
from scripts.image_core import Connectivity, Image2D, neighbor_fn
from scripts.pixel_sort import sort_pixels
from scripts.timing import PhaseTimer, timer_or_null
from scripts.tree_repr import MaxTree, canonize

_log = logging.getLogger("maxtree")

TraceFn = Callable[[int, list], None]


@dataclass
class UfScratch:
    zpar: list[int]
    rank: list[int]
    repr: list[int]

    @classmethod
    def allocate(cls, n: int) -> UfScratch:
        return cls(zpar=[0] * n, rank=[0] * n, repr=[0] * n)


def find_root(zpar: MutableSequence[int], p: int) -> int:
    """Return the zpar root of p and point every node on the path straight at it."""
    root = p
    while zpar[root] != root:
        root = zpar[root]
    while zpar[p] != root:
        zpar[p], p = root, zpar[p]
    return root


def _build_uf(img: Image2D, conn: Connectivity, order: list[int],
              trace: TraceFn | None = None) -> list[int]:
    par = [UNPROCESSED] * img.n
    zpar = [0] * img.n
    nbrs = neighbor_fn(img.width, img.height, conn)
    for p in reversed(order):
        par[p] = p
        zpar[p] = p
        for q in nbrs(p):
            if par[q] != UNPROCESSED:
                r = find_root(zpar, q)
                if r != p:
                    zpar[r] = p
                    par[r] = p
        if trace is not None:
            trace(p, zpar)
    return par


def _build_uf_rank(img: Image2D, conn: Connectivity, order: list[int]) -> list[int]:
    par = [UNPROCESSED] * img.n
    scratch = UfScratch.allocate(img.n)
    zpar, rank, repr_ = scratch.zpar, scratch.rank, scratch.repr
    nbrs = neighbor_fn(img.width, img.height, conn)
    for p in reversed(order):
        par[p] = p
        zpar[p] = p
        rank[p] = 0
        repr_[p] = p
        zp = p
        for q in nbrs(p):
            if par[q] == UNPROCESSED:
                continue
            zn = find_root(zpar, q)
            if zn == zp:
                continue
            par[repr_[zn]] = p
            if rank[zp] < rank[zn]:
                zp, zn = zn, zp
            zpar[zn] = zp
            repr_[zp] = p
            if rank[zp] == rank[zn]:
                rank[zp] += 1
    return par


def _build_uf_levelcomp(img: Image2D, conn: Connectivity, order: list[int],
                        with_s: bool = True) -> tuple[list[int], list[int] | None]:
    values = img.values.tolist()
    par = [UNPROCESSED] * img.n
    zpar = [0] * img.n
    nbrs = neighbor_fn(img.width, img.height, conn)
    S = list(order) if with_s else None
    j = img.n - 1
    for p in reversed(order):
        par[p] = p
        zpar[p] = p
        zp = p
        for q in nbrs(p):
            if par[q] == UNPROCESSED:
                continue
            zn = find_root(zpar, q)
            if zn == zp:
                continue
            if values[zp] == values[zn]:
                zp, zn = zn, zp
            zpar[zn] = zp
            par[zn] = zp
            if S is not None:
                S[j] = zn
            j -= 1
    if S is not None:
        S[0] = par[S[0]]
    return par, S


def _finish(img: Image2D, par: list[int], S, timer: PhaseTimer) -> MaxTree:
    with timer.phase("canonize+S"):
        parent = np.asarray(par, dtype=np.int64)
        S = np.asarray(S, dtype=np.int64)
        canonize(img, parent, S)
    return MaxTree(parent=parent, S=S)


def maxtree_uf(img: Image2D, conn: Connectivity = DEFAULT_CONNECTIVITY, *,
               timer: PhaseTimer | None = None, trace: TraceFn | None = None) -> MaxTree:
    """
    Plain union-find. The pixel being processed always becomes the new zpar root,
    so S is simply the increasing sort order.

    trace(p, zpar) is called after each pixel with the live zpar list.
    """
    timer = timer_or_null(timer)
    conn = Connectivity.parse(conn)
    with timer.phase("sort"):
        order = sort_pixels(img).order
    with timer.phase("build"):
        par = _build_uf(img, conn, order.tolist(), trace)
    return _finish(img, par, order, timer)


def maxtree_uf_rank(img: Image2D, conn: Connectivity = DEFAULT_CONNECTIVITY, *,
                    timer: PhaseTimer | None = None) -> MaxTree:
    """Union-by-rank on zpar; repr links each zpar root to its node root in parent."""
    timer = timer_or_null(timer)
    conn = Connectivity.parse(conn)
    with timer.phase("sort"):
        order = sort_pixels(img).order
    with timer.phase("build"):
        par = _build_uf_rank(img, conn, order.tolist())
    return _finish(img, par, order, timer)


def _level_compression_enabled(img: Image2D, level_compression: bool | None,
                               switch_bits: int) -> bool:
    if level_compression is None:
        return img.bit_depth < switch_bits
    return level_compression


def maxtree_uf_levelcomp(img: Image2D, conn: Connectivity = DEFAULT_CONNECTIVITY, *,
                         level_compression: bool | None = None,
                         switch_bits: int = SORT_SWITCH_BITS,
                         timer: PhaseTimer | None = None) -> MaxTree:
    """
    Union-find where equal-level merges keep the existing flat-zone root, which
    inverts parent links inside flat zones. S is rebuilt from the back as pixels
    stop being roots.

    level_compression=None turns the compression on below switch_bits only.
    """
    if not _level_compression_enabled(img, level_compression, switch_bits):
        _log.debug("Level compression off at %d bits; running plain union-find", img.bit_depth)
        return maxtree_uf(img, conn, timer=timer)
    timer = timer_or_null(timer)
    conn = Connectivity.parse(conn)
    with timer.phase("sort"):
        order = sort_pixels(img).order
    with timer.phase("build"):
        par, S = _build_uf_levelcomp(img, conn, order.tolist())
    return _finish(img, par, S, timer)


# Parent-only variants for the map step: no S output, no canonization.

def uf_parent(img: Image2D, conn: Connectivity) -> np.ndarray:
    order = sort_pixels(img).order.tolist()
    return np.asarray(_build_uf(img, Connectivity.parse(conn), order), dtype=np.int64)


def uf_rank_parent(img: Image2D, conn: Connectivity) -> np.ndarray:
    order = sort_pixels(img).order.tolist()
    return np.asarray(_build_uf_rank(img, Connectivity.parse(conn), order), dtype=np.int64)


def uf_levelcomp_parent(img: Image2D, conn: Connectivity) -> np.ndarray:
    order = sort_pixels(img).order.tolist()
    conn = Connectivity.parse(conn)
    if not _level_compression_enabled(img, None, SORT_SWITCH_BITS):
        return np.asarray(_build_uf(img, conn, order), dtype=np.int64)
    par, _ = _build_uf_levelcomp(img, conn, order, with_s=False)
    return np.asarray(par, dtype=np.int64)
