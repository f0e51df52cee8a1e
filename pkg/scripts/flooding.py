"""
Flooding builders: Salembier's hierarchical-queue flood (run with an explicit
frame stack instead of recursion) and the non-recursive level-root-stack variant.
"""
from __future__ import annotations

import heapq
import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from scripts.constants import DEFAULT_CONNECTIVITY, INQUEUE, SORT_SWITCH_BITS, UNPROCESSED
from scripts.image_core import Connectivity, Image2D, neighbor_fn
from scripts.timing import PhaseTimer, timer_or_null
from scripts.tree_repr import MaxTree

_log = logging.getLogger("maxtree")


class UnsupportedConfigurationError(ValueError):
    pass


@dataclass
class FloodStats:
    pushes: int = 0
    pops: int = 0
    process_stack_calls: int = 0
    non_increasing_stacks: int = 0


def _highest_at_least(arr: np.ndarray, below: int, floor: int) -> int:
    """Largest h < below with arr[h] >= floor, or -1. Scans in growing windows."""
    hi, width = below, 64
    while hi > 0:
        lo = max(0, hi - width)
        hits = np.flatnonzero(arr[lo:hi] >= floor)
        if hits.size:
            return lo + int(hits[-1])
        hi, width = lo, width * 2
    return -1


class HierarchicalQueue:
    """One FIFO per gray level, carved out of a single buffer sized by the histogram."""

    def __init__(self, histogram: np.ndarray) -> None:
        counts = np.asarray(histogram, dtype=np.int64)
        starts = np.concatenate(([0], np.cumsum(counts)[:-1])).tolist()
        self._data = [0] * int(counts.sum())
        self._head = list(starts)
        self._tail = list(starts)
        self._size = 0

    def push(self, level: int, p: int) -> None:
        self._data[self._tail[level]] = p
        self._tail[level] += 1
        self._size += 1

    def pop(self, level: int) -> int:
        p = self._data[self._head[level]]
        self._head[level] += 1
        self._size -= 1
        return p

    def front(self, level: int) -> int:
        return self._data[self._head[level]]

    def empty(self, level: int) -> bool:
        return self._head[level] == self._tail[level]

    def __len__(self) -> int:
        return self._size


class MaxPriorityQueue:
    """Pixels keyed by gray level. Bucketed below the switch, binary heap above it."""

    def __init__(self, img: Image2D, switch_bits: int = SORT_SWITCH_BITS) -> None:
        self.backend = "bucketed" if img.bit_depth < switch_bits else "heap"
        self._top_level = -1
        self._seq = 0
        if self.backend == "bucketed":
            k = 1 << img.bit_depth
            self._hq = HierarchicalQueue(np.bincount(img.values, minlength=k))
            self._fill = np.zeros(k, dtype=np.int64)
        else:
            self._heap: list[tuple[int, int, int]] = []

    def push(self, p: int, level: int) -> None:
        if self.backend == "bucketed":
            self._hq.push(level, p)
            self._fill[level] += 1
            if level > self._top_level:
                self._top_level = level
        else:
            # seq keeps equal levels FIFO
            heapq.heappush(self._heap, (-level, self._seq, p))
            self._seq += 1

    def top(self) -> int:
        if self.backend == "bucketed":
            return self._hq.front(self._top_level)
        return self._heap[0][2]

    def pop(self) -> int:
        if self.backend == "heap":
            return heapq.heappop(self._heap)[2]
        level = self._top_level
        p = self._hq.pop(level)
        self._fill[level] -= 1
        if self._fill[level] == 0:
            self._top_level = _highest_at_least(self._fill, level, 1)
        return p

    def __len__(self) -> int:
        return len(self._hq) if self.backend == "bucketed" else len(self._heap)


def _salembier(img: Image2D, conn: Connectivity, with_s: bool,
               stats: FloodStats | None) -> tuple[list[int], deque | None]:
    values = img.values.tolist()
    nbrs = neighbor_fn(img.width, img.height, conn)
    k = 1 << img.bit_depth
    hq = HierarchicalQueue(np.bincount(img.values, minlength=k))
    levroot = np.full(k, UNPROCESSED, dtype=np.int64)
    par = [UNPROCESSED] * img.n
    S: deque | None = deque() if with_s else None
    pushes = pops = 0

    p_min = int(np.argmin(img.values))
    l_min = values[p_min]
    hq.push(l_min, p_min)
    pushes += 1
    par[p_min] = INQUEUE
    levroot[l_min] = p_min

    # frame: [level, level root, pending neighbors of the current pixel, next neighbor index]
    frames = [[l_min, p_min, [], 0]]
    returned: int | None = None
    while frames:
        frame = frames[-1]
        lam, r = frame[0], frame[1]
        if returned is not None:
            level, returned = returned, None
            if level > lam:
                frames.append([level, int(levroot[level]), [], 0])
                continue
        descended = False
        while not descended:
            pending, i = frame[2], frame[3]
            while i < len(pending):
                q = pending[i]
                i += 1
                if par[q] != UNPROCESSED:
                    continue
                level = values[q]
                if levroot[level] == UNPROCESSED:
                    levroot[level] = q
                hq.push(level, q)
                pushes += 1
                par[q] = INQUEUE
                if level > lam:
                    frame[3] = i
                    frames.append([level, int(levroot[level]), [], 0])
                    descended = True
                    break
            if descended:
                break
            if hq.empty(lam):
                break
            p = hq.pop(lam)
            pops += 1
            par[p] = r
            if S is not None and p != r:
                S.appendleft(p)
            frame[2], frame[3] = nbrs(p), 0
        if descended:
            continue

        levroot[lam] = UNPROCESSED
        lpar = _highest_at_least(levroot, lam, 0)
        if lpar != -1:
            par[r] = int(levroot[lpar])
        if S is not None:
            S.appendleft(r)
        frames.pop()
        returned = lpar

    if stats is not None:
        stats.pushes += pushes
        stats.pops += pops
    return par, S


def _check_supported(img: Image2D, switch_bits: int) -> None:
    if img.bit_depth >= switch_bits:
        raise UnsupportedConfigurationError(
            f"maxtree_salembier sizes its hierarchical queue at 2^bit_depth and needs "
            f"bit_depth < {switch_bits} (got {img.bit_depth}); use maxtree_nonrec instead."
        )


def maxtree_salembier(img: Image2D, conn: Connectivity = DEFAULT_CONNECTIVITY, *,
                      switch_bits: int = SORT_SWITCH_BITS,
                      timer: PhaseTimer | None = None,
                      stats: FloodStats | None = None) -> MaxTree:
    _check_supported(img, switch_bits)
    timer = timer_or_null(timer)
    with timer.phase("build"):
        par, S = _salembier(img, Connectivity.parse(conn), True, stats)
    return MaxTree(parent=np.asarray(par, dtype=np.int64), S=np.fromiter(S, dtype=np.int64, count=img.n))


def _nonrec(img: Image2D, conn: Connectivity, with_s: bool, stats: FloodStats | None,
            switch_bits: int) -> tuple[list[int], deque | None]:
    values = img.values.tolist()
    nbrs = neighbor_fn(img.width, img.height, conn)
    pq = MaxPriorityQueue(img, switch_bits)
    _log.debug("Non-recursive flooding on the %s priority queue", pq.backend)
    par = [UNPROCESSED] * img.n
    S: deque | None = deque() if with_s else None
    levroot: list[int] = []
    pushes = pops = calls = bad_stacks = 0

    def process_stack(r: int, q: int) -> None:
        nonlocal calls, bad_stacks
        calls += 1
        if stats is not None and any(
            values[a] >= values[b] for a, b in zip(levroot, levroot[1:])
        ):
            bad_stacks += 1
        lam = values[q]
        levroot.pop()
        while levroot and lam < values[levroot[-1]]:
            if S is not None:
                S.appendleft(r)
            nr = levroot.pop()
            par[r] = nr
            r = nr
        if not levroot or values[levroot[-1]] != lam:
            levroot.append(q)
        par[r] = levroot[-1]
        if S is not None:
            S.appendleft(r)

    p_start = 0
    pq.push(p_start, values[p_start])
    pushes += 1
    levroot.append(p_start)
    par[p_start] = INQUEUE
    while True:
        p = pq.top()
        r = levroot[-1]
        level = values[p]
        climbed = False
        for q in nbrs(p):
            if par[q] != UNPROCESSED:
                continue
            pq.push(q, values[q])
            pushes += 1
            par[q] = INQUEUE
            if level < values[q]:
                levroot.append(q)
                climbed = True
                break
        if climbed:
            continue
        pq.pop()
        pops += 1
        par[p] = r
        if S is not None and p != r:
            S.appendleft(p)
        if not len(pq):
            break
        q = pq.top()
        if values[q] != values[r]:
            process_stack(r, q)

    while levroot:
        root = levroot.pop()
        if levroot:
            par[root] = levroot[-1]
        if S is not None:
            S.appendleft(root)

    if stats is not None:
        stats.pushes += pushes
        stats.pops += pops
        stats.process_stack_calls += calls
        stats.non_increasing_stacks += bad_stacks
    return par, S


def maxtree_nonrec(img: Image2D, conn: Connectivity = DEFAULT_CONNECTIVITY, *,
                   switch_bits: int = SORT_SWITCH_BITS,
                   timer: PhaseTimer | None = None,
                   stats: FloodStats | None = None) -> MaxTree:
    """Flooding from pixel 0 with a stack of level roots; any bit depth."""
    timer = timer_or_null(timer)
    with timer.phase("build"):
        par, S = _nonrec(img, Connectivity.parse(conn), True, stats, switch_bits)
    return MaxTree(parent=np.asarray(par, dtype=np.int64), S=np.fromiter(S, dtype=np.int64, count=img.n))


def salembier_parent(img: Image2D, conn: Connectivity) -> np.ndarray:
    _check_supported(img, SORT_SWITCH_BITS)
    par, _ = _salembier(img, Connectivity.parse(conn), False, None)
    return np.asarray(par, dtype=np.int64)


def nonrec_parent(img: Image2D, conn: Connectivity) -> np.ndarray:
    par, _ = _nonrec(img, Connectivity.parse(conn), False, None, SORT_SWITCH_BITS)
    return np.asarray(par, dtype=np.int64)
