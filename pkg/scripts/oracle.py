"""
Brute-force ground truth built from explicit upper level sets with
scipy.ndimage.label. Nothing here touches the builders' machinery.
"""
from __future__ import annotations

import logging

import numpy as np
from scipy import ndimage as ndi

from scripts.constants import ORACLE_MAX_PIXELS
from scripts.image_core import Connectivity, Image2D
from scripts.tree_repr import NormalizedTree

_log = logging.getLogger("maxtree")


def _structure(conn: Connectivity) -> np.ndarray:
    return ndi.generate_binary_structure(2, 1 if Connectivity.parse(conn) == Connectivity.C4 else 2)


def _upper_sets(img: Image2D, conn: Connectivity):
    """Yield (level, labels, count) for every distinct level, darkest first."""
    if img.n > ORACLE_MAX_PIXELS:
        _log.warning("Oracle on %d pixels (limit %d) will be slow", img.n, ORACLE_MAX_PIXELS)
    arr = img.to_array()
    structure = _structure(conn)
    for level in np.unique(arr):
        labels, count = ndi.label(arr >= level, structure=structure)
        yield int(level), labels.reshape(-1), count


def brute_maxtree(img: Image2D, conn: Connectivity = Connectivity.C4) -> NormalizedTree:
    """
    One node per (level, upper component) pair holding pixels of exactly that level.
    A node's parent is the node last assigned to its pixels at a lower level.
    """
    values = img.values
    node_of = np.full(img.n, -1, dtype=np.int64)
    current = np.full(img.n, -1, dtype=np.int64)
    node_level: list[int] = []
    node_parent: list[int] = []

    for level, labels, count in _upper_sets(img, conn):
        exact = values == level
        has_node = np.zeros(count + 1, dtype=bool)
        has_node[labels[exact]] = True
        comps = np.flatnonzero(has_node)

        comp_ids, first_pixel = np.unique(labels, return_index=True)
        rep = np.zeros(count + 1, dtype=np.int64)
        rep[comp_ids] = first_pixel

        comp_node = np.full(count + 1, -1, dtype=np.int64)
        comp_node[comps] = np.arange(len(node_level), len(node_level) + comps.size)
        for comp in comps.tolist():
            above = int(current[rep[comp]])
            node_parent.append(above if above >= 0 else int(comp_node[comp]))
            node_level.append(level)

        node_of[exact] = comp_node[labels[exact]]
        inside = (labels > 0) & has_node[labels]
        current[inside] = comp_node[labels[inside]]

    return NormalizedTree.from_nodes(node_of, np.asarray(node_level), np.asarray(node_parent))


def brute_area_opening(img: Image2D, conn: Connectivity, threshold: int) -> Image2D:
    """out(p) is the highest level whose peak component at p has >= threshold pixels, else 0."""
    out = np.zeros(img.n, dtype=np.uint32)
    for level, labels, _ in _upper_sets(img, conn):
        sizes = np.bincount(labels)
        keep = (labels > 0) & (sizes[labels] >= threshold)
        out[keep] = level
    return img.with_values(out)


def brute_peak_area(img: Image2D, conn: Connectivity = Connectivity.C4) -> np.ndarray:
    """Pixel count of the peak component at each pixel's own level, as a 2D array."""
    area = np.zeros(img.n, dtype=np.int64)
    for level, labels, _ in _upper_sets(img, conn):
        exact = img.values == level
        area[exact] = np.bincount(labels)[labels[exact]]
    return area.reshape(img.height, img.width)
