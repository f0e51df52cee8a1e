"""
Node attributes accumulated leaves-to-root along S, and direct filtering.

An attribute is defined by a projection of each pixel into attribute space, an
associative combine and its identity. After accumulation the value stored at a
canonical pixel describes that node's whole peak component.
"""
from __future__ import annotations

import logging
import operator
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from scripts.image_core import Image2D
from scripts.tree_repr import InvalidTreeError, MaxTree, canonical_mask, validate

_log = logging.getLogger("maxtree")


@dataclass(frozen=True)
class AttributeDef:
    name: str
    project: Callable[[np.ndarray], np.ndarray]  # pixel values -> per-pixel attribute
    combine: Callable
    identity: object
    finalize: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None


AREA = AttributeDef("area", lambda values: np.ones(values.size, dtype=np.int64), operator.add, 0)

VALUE_SUM = AttributeDef("value_sum", lambda values: values.astype(np.int64), operator.add, 0)

# Accumulates the brightest level of the component, then subtracts the node level.
HEIGHT = AttributeDef(
    "height",
    lambda values: values.astype(np.int64),
    max,
    0,
    finalize=lambda acc, values: acc - values.astype(np.int64),
)

ATTRIBUTES = {a.name: a for a in (AREA, VALUE_SUM, HEIGHT)}


@dataclass(frozen=True, eq=False)
class AttributeMap:
    attr: np.ndarray
    definition: AttributeDef

    def at(self, p: int) -> int:
        return int(self.attr[p])


def compute_attribute(tree: MaxTree, img: Image2D, attrdef: AttributeDef = AREA,
                      check: bool = True) -> AttributeMap:
    if check:
        report = validate(img, tree)
        if not report.ok:
            raise InvalidTreeError(report)
    combine = attrdef.combine
    attr = [combine(attrdef.identity, v) for v in attrdef.project(img.values).tolist()]
    par = tree.parent.tolist()
    S = tree.S.tolist()
    root = S[0]
    for p in reversed(S):
        if p != root:
            q = par[p]
            attr[q] = combine(attr[q], attr[p])
    out = np.asarray(attr)
    if attrdef.finalize is not None:
        out = attrdef.finalize(out, img.values)
    _log.debug("Computed %s over %d pixels", attrdef.name, img.n)
    return AttributeMap(out, attrdef)


def direct_filter(tree: MaxTree, img: Image2D, attr: AttributeMap, threshold) -> Image2D:
    """
    Keep nodes whose attribute reaches threshold; lower the others to their closest
    surviving ancestor. A failing root goes to 0.
    """
    values = img.values.tolist()
    par = tree.parent.tolist()
    att = attr.attr.tolist()
    out = [0] * img.n
    root = int(tree.S[0])
    out[root] = 0 if att[root] < threshold else values[root]
    for p in tree.S.tolist():
        q = par[p]
        if values[q] == values[p]:
            out[p] = out[q]
        elif att[p] < threshold:
            out[p] = out[q]
        else:
            out[p] = values[p]
    return img.with_values(np.asarray(out, dtype=np.uint32))


def area_opening(tree: MaxTree, img: Image2D, threshold: int) -> Image2D:
    return direct_filter(tree, img, compute_attribute(tree, img, AREA), threshold)


def attribute_image(tree: MaxTree, img: Image2D, attr: AttributeMap) -> np.ndarray:
    """Per-pixel value of the attribute of the node each pixel belongs to."""
    parent = np.asarray(tree.parent)
    node = np.where(canonical_mask(img, parent), np.arange(parent.size), parent)
    return attr.attr[node].reshape(img.height, img.width)
