"""Stable increasing pixel ordering: counting sort below the switch, 16-bit radix above."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from scripts.constants import SORT_SWITCH_BITS
from scripts.image_core import Image2D

_log = logging.getLogger("maxtree")

_DIGIT_BITS = 16


class SortContractError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SortedPixels:
    order: np.ndarray


def _counting_pass(keys: list[int], items: list[int], k: int) -> list[int]:
    counts = [0] * k
    for key in keys:
        counts[key] += 1
    total = 0
    for level in range(k):
        counts[level], total = total, total + counts[level]
    out = [0] * len(items)
    for key, item in zip(keys, items):
        out[counts[key]] = item
        counts[key] += 1
    return out


def counting_sort(img: Image2D, bits: int | None = None,
                  switch_bits: int = SORT_SWITCH_BITS) -> SortedPixels:
    bits = img.bit_depth if bits is None else bits
    if bits >= switch_bits:
        raise SortContractError(
            f"counting_sort needs bits < {switch_bits}, got {bits}; use radix_sort instead."
        )
    order = _counting_pass(img.values.tolist(), list(range(img.n)), 1 << bits)
    return SortedPixels(np.asarray(order, dtype=np.int64))


def radix_sort(img: Image2D, bits: int | None = None) -> SortedPixels:
    """Least-significant digit first, one stable counting pass per 16-bit digit."""
    bits = img.bit_depth if bits is None else bits
    if bits < 1:
        raise SortContractError(f"radix_sort needs bits >= 1, got {bits}")
    values = img.values
    mask = (1 << _DIGIT_BITS) - 1
    order = list(range(img.n))
    passes = -(-bits // _DIGIT_BITS)
    for i in range(passes):
        digits = ((values[order] >> np.uint32(i * _DIGIT_BITS)) & np.uint32(mask)).tolist()
        order = _counting_pass(digits, order, 1 << _DIGIT_BITS)
    return SortedPixels(np.asarray(order, dtype=np.int64))


def reference_sort(img: Image2D) -> SortedPixels:
    return SortedPixels(np.argsort(img.values, kind="stable").astype(np.int64))


def sort_pixels(img: Image2D, switch_bits: int = SORT_SWITCH_BITS) -> SortedPixels:
    if img.bit_depth < switch_bits:
        _log.debug("Sorting %d pixels with counting sort (%d bits)", img.n, img.bit_depth)
        return counting_sort(img, img.bit_depth, switch_bits)
    _log.debug("Sorting %d pixels with radix sort (%d bits)", img.n, img.bit_depth)
    return radix_sort(img, img.bit_depth)
