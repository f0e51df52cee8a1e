"""
The (parent, S) max-tree encoding.

parent maps every pixel to a canonical pixel of its parent node (the root
points to itself); S lists pixels so that a parent always comes before its
children. A pixel is canonical when it is the root or strictly brighter than
its parent, so each node is identified by exactly one canonical pixel.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from scripts.image_core import Image2D

_log = logging.getLogger("maxtree")


class InvalidTreeError(ValueError):
    def __init__(self, report: ValidationReport) -> None:
        first = report.violations[0] if report.violations else {}
        super().__init__(
            f"Tree failed validation with {len(report.violations)} violation(s); "
            f"first: {first.get('check')} at pixel {first.get('pixel')} ({first.get('detail')})"
        )
        self.report = report


class TreeCycleError(ValueError):
    def __init__(self, pixel: int) -> None:
        super().__init__(f"parent relation contains a cycle through pixel {pixel}")
        self.pixel = pixel


@dataclass(frozen=True, eq=False)
class MaxTree:
    parent: np.ndarray
    S: np.ndarray

    def __post_init__(self) -> None:
        for name in ("parent", "S"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def root(self) -> int:
        return int(self.S[0])


@dataclass
class ValidationReport:
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, check: str, pixels, detail: str) -> None:
        for p in np.atleast_1d(pixels):
            self.violations.append({"check": check, "pixel": int(p), "detail": detail})


@dataclass(frozen=True, eq=False)
class NormalizedTree:
    """
    Representation-independent form of a max-tree. Node ids follow the first pixel
    (in index order) belonging to each node, so two builders that picked different
    canonical pixels still produce equal objects.
    """

    node_of: np.ndarray
    node_level: np.ndarray
    node_parent: np.ndarray

    @classmethod
    def from_nodes(cls, node_of, node_level, node_parent) -> NormalizedTree:
        """Renumber arbitrary node ids; node_level and node_parent are indexed by those ids."""
        node_of = np.asarray(node_of, dtype=np.int64)
        node_level = np.asarray(node_level)
        node_parent = np.asarray(node_parent, dtype=np.int64)
        ids, first_seen = np.unique(node_of, return_index=True)
        ordered = ids[np.argsort(first_seen, kind="stable")]
        remap = np.full(max(int(node_of.max()) + 1, node_parent.size), -1, dtype=np.int64)
        remap[ordered] = np.arange(ordered.size)
        return cls(
            node_of=remap[node_of],
            node_level=node_level[ordered].astype(np.int64),
            node_parent=remap[node_parent[ordered]],
        )

    @property
    def num_nodes(self) -> int:
        return int(self.node_level.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NormalizedTree):
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None  # type: ignore[assignment]

    def first_difference(self, other: NormalizedTree) -> str | None:
        if self.node_of.size != other.node_of.size:
            return f"pixel count {self.node_of.size} != {other.node_of.size}"
        diff = np.flatnonzero(self.node_of != other.node_of)
        if diff.size:
            p = int(diff[0])
            return f"pixel {p}: node {int(self.node_of[p])} != {int(other.node_of[p])}"
        if self.num_nodes != other.num_nodes:
            return f"node count {self.num_nodes} != {other.num_nodes}"
        for name in ("node_level", "node_parent"):
            diff = np.flatnonzero(getattr(self, name) != getattr(other, name))
            if diff.size:
                k = int(diff[0])
                return f"node {k}: {name} {int(getattr(self, name)[k])} != {int(getattr(other, name)[k])}"
        return None

    def __repr__(self) -> str:
        return f"NormalizedTree({self.num_nodes} nodes over {self.node_of.size} pixels)"


@dataclass(frozen=True)
class TreeStats:
    nodes: int
    leaves: int
    depth: int


def canonical_mask(ima: Image2D, parent: np.ndarray) -> np.ndarray:
    parent = np.asarray(parent)
    values = ima.values
    return (parent == np.arange(parent.size)) | (values[parent] < values)


def is_canonical(ima: Image2D, tree: MaxTree, p: int) -> bool:
    q = int(tree.parent[p])
    return q == p or int(ima.values[q]) < int(ima.values[p])


def validate(ima: Image2D, tree: MaxTree) -> ValidationReport:
    report = ValidationReport()
    n = ima.n
    parent = np.asarray(tree.parent)
    S = np.asarray(tree.S)

    if parent.size != n or S.size != n:
        report.add("shape", -1, f"expected {n} entries, got parent={parent.size} S={S.size}")
        return report
    out_of_range = np.flatnonzero((parent < 0) | (parent >= n))
    if out_of_range.size:
        report.add("parent_range", out_of_range, "parent index outside the image")
        return report

    values = ima.values.astype(np.int64)
    idx = np.arange(n)
    roots = np.flatnonzero(parent == idx)
    if roots.size != 1:
        report.add("single_root", roots if roots.size else -1, f"found {roots.size} self-parented pixels")

    report.add("parent_level", np.flatnonzero(values[parent] > values), "parent is brighter than pixel")

    parent_is_canonical = (parent[parent] == parent) | (values[parent[parent]] < values[parent])
    report.add("parent_canonical", np.flatnonzero(~parent_is_canonical), "parent is not canonical")

    counts = np.bincount(S[(S >= 0) & (S < n)], minlength=n)
    if S.min() < 0 or S.max() >= n or np.any(counts != 1):
        report.add("s_permutation", np.flatnonzero(counts != 1), "S is not a permutation of the pixels")
        return report
    if roots.size == 1 and S[0] != roots[0]:
        report.add("s_root_first", S[0], f"S starts at {int(S[0])}, root is {int(roots[0])}")
    position = np.empty(n, dtype=np.int64)
    position[S] = idx
    late = (position[parent] >= position) & (parent != idx)
    report.add("s_order", np.flatnonzero(late), "parent appears after pixel in S")
    return report


def canonize(ima: Image2D, parent: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Point every pixel at a canonical parent, walking S top-down. Mutates parent."""
    values = ima.values.tolist()
    par = parent.tolist()
    for p in S.tolist():
        q = par[p]
        if values[par[q]] == values[q]:
            par[p] = par[q]
    parent[:] = par
    return parent


def canonize_rebuild_S(ima: Image2D, parent: np.ndarray) -> MaxTree:
    """
    Canonize a parent array that only satisfies the root and level properties and
    emit S top-down. Each pixel is finished after its parent, through an explicit
    root path instead of recursion.
    """
    values = ima.values.tolist()
    par = np.asarray(parent, dtype=np.int64).tolist()
    n = len(par)
    state = [0] * n  # 0 unseen, 1 on current path, 2 done
    S: list[int] = []
    for start in range(n):
        if state[start] == 2:
            continue
        path = []
        x = start
        while state[x] != 2:
            if state[x] == 1:
                raise TreeCycleError(x)
            state[x] = 1
            path.append(x)
            q = par[x]
            if q == x:
                break
            x = q
        for x in reversed(path):
            q = par[x]
            if q != x and values[par[q]] == values[q]:
                par[x] = par[q]
            S.append(x)
            state[x] = 2
    return MaxTree(parent=np.array(par, dtype=np.int64), S=np.array(S, dtype=np.int64))


def normalize(ima: Image2D, tree: MaxTree) -> NormalizedTree:
    report = validate(ima, tree)
    if not report.ok:
        raise InvalidTreeError(report)
    parent = np.asarray(tree.parent)
    representative = np.where(canonical_mask(ima, parent), np.arange(parent.size), parent)
    return NormalizedTree.from_nodes(representative, ima.values, parent)


def tree_stats(ima: Image2D, tree: MaxTree) -> TreeStats:
    parent = np.asarray(tree.parent)
    canonical = canonical_mask(ima, parent)
    nodes = np.flatnonzero(canonical)
    non_root = nodes[parent[nodes] != nodes]
    has_child = np.zeros(parent.size, dtype=bool)
    has_child[parent[non_root]] = True
    leaves = int(np.count_nonzero(~has_child[nodes]))

    par = parent.tolist()
    is_node = canonical.tolist()
    depth = [0] * parent.size
    deepest = 0
    for p in tree.S.tolist():
        if not is_node[p]:
            continue
        depth[p] = 1 if par[p] == p else depth[par[p]] + 1
        deepest = max(deepest, depth[p])
    return TreeStats(nodes=int(nodes.size), leaves=leaves, depth=deepest)


def dump_tree(ima: Image2D, tree: MaxTree, fh: TextIO) -> None:
    """One line per pixel in S order: `p parent(p) ima(p)`."""
    values = ima.values
    for p in tree.S.tolist():
        fh.write(f"{p} {int(tree.parent[p])} {int(values[p])}\n")


def load_tree_dump(fh: TextIO) -> MaxTree:
    order, parents = [], []
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"Line {lineno}: expected `p parent level`, got {line!r}")
        order.append(int(parts[0]))
        parents.append(int(parts[1]))
    n = len(order)
    parent = np.full(n, -1, dtype=np.int64)
    S = np.array(order, dtype=np.int64)
    if n and (S.min() < 0 or S.max() >= n):
        raise ValueError(f"Tree dump pixel indices must lie in [0, {n})")
    parent[S] = parents
    _log.debug("Loaded tree dump with %d pixels", n)
    return MaxTree(parent=parent, S=S)
