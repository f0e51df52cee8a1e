"""
Image container, pixel neighborhoods, PGM / raw I/O and the benchmark image
transforms (crop/tile resize, over-quantization).
"""
from __future__ import annotations

import enum
import logging
import os
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from scripts.constants import MAX_BIT_DEPTH

_log = logging.getLogger("maxtree")

_WHITESPACE = b" \t\r\n\x0b\x0c"


class ImageDomainError(ValueError):
    pass


class PgmParseError(ValueError):
    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class Connectivity(enum.IntEnum):
    C4 = 4
    C8 = 8

    @classmethod
    def parse(cls, value: int | str | Connectivity) -> Connectivity:
        if isinstance(value, cls):
            return value
        try:
            return cls(int(str(value).upper().lstrip("C")))
        except ValueError:
            raise ImageDomainError(f"Unknown connectivity {value!r}; expected 4 or 8.") from None


@dataclass(frozen=True, eq=False)
class Image2D:
    """Row-major grid of unsigned values. Pixel (r, c) has linear index r * width + c."""

    width: int
    height: int
    values: np.ndarray
    bit_depth: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ImageDomainError(f"Image dimensions must be positive, got {self.width}x{self.height}.")
        if not 1 <= self.bit_depth <= MAX_BIT_DEPTH:
            raise ImageDomainError(f"bit_depth must lie in [1, {MAX_BIT_DEPTH}], got {self.bit_depth}.")
        raw = np.asarray(self.values).reshape(-1)
        if raw.size != self.width * self.height:
            raise ImageDomainError(
                f"Expected {self.width * self.height} values for a {self.width}x{self.height} image, got {raw.size}."
            )
        if raw.size and (int(raw.min()) < 0 or int(raw.max()) >= (1 << self.bit_depth)):
            raise ImageDomainError(f"Values must lie in [0, 2^{self.bit_depth}).")
        values = np.ascontiguousarray(raw, dtype=np.uint32).copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.width * self.height

    @classmethod
    def from_array(cls, array, bit_depth: int | None = None) -> Image2D:
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise ImageDomainError(f"Expected a 2D array, got {arr.ndim} dimensions.")
        if bit_depth is None:
            if arr.dtype == np.uint8:
                bit_depth = 8
            elif arr.dtype == np.uint16:
                bit_depth = 16
            else:
                bit_depth = max(1, int(arr.max()).bit_length()) if arr.size else 1
        return cls(arr.shape[1], arr.shape[0], arr.reshape(-1), bit_depth)

    def to_array(self) -> np.ndarray:
        return self.values.reshape(self.height, self.width)

    def with_values(self, values, bit_depth: int | None = None) -> Image2D:
        return Image2D(self.width, self.height, values, bit_depth or self.bit_depth)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Image2D):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.bit_depth == other.bit_depth
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Image2D({self.width}x{self.height}, {self.bit_depth} bits)"


def neighbor_fn(width: int, height: int, conn: Connectivity) -> Callable[[int], list[int]]:
    """Neighbor lookup without range checks. C4 order is N, W, E, S; C8 is row-major."""
    if conn == Connectivity.C4:
        def four(p: int) -> list[int]:
            r, c = divmod(p, width)
            out = []
            if r > 0:
                out.append(p - width)
            if c > 0:
                out.append(p - 1)
            if c < width - 1:
                out.append(p + 1)
            if r < height - 1:
                out.append(p + width)
            return out
        return four

    def eight(p: int) -> list[int]:
        r, c = divmod(p, width)
        out = []
        for rr in (r - 1, r, r + 1):
            if rr < 0 or rr >= height:
                continue
            base = rr * width
            for cc in (c - 1, c, c + 1):
                if 0 <= cc < width and not (rr == r and cc == c):
                    out.append(base + cc)
        return out
    return eight


def neighbors(img: Image2D, p: int, conn: Connectivity = Connectivity.C4) -> list[int]:
    if not 0 <= p < img.n:
        raise ImageDomainError(f"Pixel index {p} outside [0, {img.n}).")
    return neighbor_fn(img.width, img.height, Connectivity.parse(conn))(p)


# --- PGM / raw I/O ---------------------------------------------------------

def _next_token(data: bytes, pos: int) -> tuple[bytes | None, int]:
    size = len(data)
    while pos < size:
        ch = data[pos:pos + 1]
        if ch in _WHITESPACE:
            pos += 1
        elif ch == b"#":
            end = data.find(b"\n", pos)
            pos = size if end < 0 else end + 1
        else:
            break
    if pos >= size:
        return None, pos
    start = pos
    while pos < size and data[pos:pos + 1] not in _WHITESPACE and data[pos:pos + 1] != b"#":
        pos += 1
    return data[start:pos], pos


def _header_int(data: bytes, pos: int, name: str) -> tuple[int, int]:
    start = pos
    token, pos = _next_token(data, pos)
    if token is None:
        raise PgmParseError(f"Missing {name} in header", start)
    try:
        return int(token), pos
    except ValueError:
        raise PgmParseError(f"Invalid {name} {token!r}", start) from None


def parse_pgm(data: bytes) -> Image2D:
    magic, pos = _next_token(data, 0)
    if magic not in (b"P2", b"P5"):
        raise PgmParseError(f"Unsupported magic number {magic!r}; expected P2 or P5", 0)
    width, pos = _header_int(data, pos, "width")
    height, pos = _header_int(data, pos, "height")
    maxval, pos = _header_int(data, pos, "maxval")
    if width < 1 or height < 1:
        raise PgmParseError(f"Non-positive dimensions {width}x{height}", pos)
    if not 1 <= maxval <= 65535:
        raise PgmParseError(f"maxval {maxval} outside [1, 65535]", pos)

    n = width * height
    if magic == b"P5":
        pos += 1  # exactly one whitespace byte after maxval
        sample = 1 if maxval <= 255 else 2
        need = n * sample
        payload = data[pos:pos + need]
        if len(payload) < need:
            raise PgmParseError(
                f"Truncated payload: expected {need} bytes, found {len(payload)}", pos + len(payload)
            )
        values = np.frombuffer(payload, dtype=np.uint8 if sample == 1 else ">u2").astype(np.int64)
    else:
        values = np.empty(n, dtype=np.int64)
        for i in range(n):
            start = pos
            token, pos = _next_token(data, pos)
            if token is None:
                raise PgmParseError(f"Truncated payload: expected {n} samples, found {i}", start)
            try:
                values[i] = int(token)
            except ValueError:
                raise PgmParseError(f"Invalid sample {token!r}", start) from None

    if n and int(values.max()) > maxval:
        raise PgmParseError(f"Sample exceeds maxval {maxval}", pos)
    return Image2D(width, height, values, 8 if maxval <= 255 else 16)


def load_pgm(path: str) -> Image2D:
    with open(path, "rb") as fh:
        return parse_pgm(fh.read())


def save_pgm(img: Image2D, path: str, ascii: bool = False) -> None:
    if img.bit_depth > 16:
        raise ImageDomainError(f"PGM holds at most 16 bits, image has {img.bit_depth}; use save_raw.")
    maxval = 255 if img.bit_depth <= 8 else 65535
    if ascii:
        rows = img.to_array()
        body = "\n".join(" ".join(str(int(v)) for v in row) for row in rows)
        payload = f"P2\n{img.width} {img.height}\n{maxval}\n{body}\n".encode("ascii")
    else:
        dtype = np.uint8 if maxval == 255 else ">u2"
        payload = f"P5\n{img.width} {img.height}\n{maxval}\n".encode("ascii") + img.values.astype(dtype).tobytes()
    with open(path, "wb") as fh:
        fh.write(payload)


def load_raw(path: str) -> Image2D:
    """Little-endian u32 dump: width, height, bit_depth, then width*height samples."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12:
        raise PgmParseError(f"Truncated raw header: {len(data)} of 12 bytes", len(data))
    width, height, bit_depth = (int(v) for v in np.frombuffer(data[:12], dtype="<u4"))
    need = width * height * 4
    payload = data[12:12 + need]
    if len(payload) < need:
        raise PgmParseError(f"Truncated payload: expected {need} bytes, found {len(payload)}", 12 + len(payload))
    try:
        return Image2D(width, height, np.frombuffer(payload, dtype="<u4"), bit_depth)
    except ImageDomainError as exc:
        raise PgmParseError(str(exc), 0) from exc


def save_raw(img: Image2D, path: str) -> None:
    header = np.array([img.width, img.height, img.bit_depth], dtype="<u4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header + img.values.astype("<u4").tobytes())


def load_image(path: str) -> Image2D:
    ext = os.path.splitext(path)[1].lower()
    return load_raw(path) if ext in (".raw", ".u32") else load_pgm(path)


def save_image(img: Image2D, path: str) -> None:
    ext = os.path.splitext(path)[1].lower()
    if ext in (".raw", ".u32"):
        save_raw(img, path)
    else:
        save_pgm(img, path)


# --- Benchmark transforms ----------------------------------------------------

def resize_by_tiling(img: Image2D, target_w: int, target_h: int) -> Image2D:
    """out(r, c) = in(r mod height, c mod width). Cropping is the case target <= source."""
    if target_w < 1 or target_h < 1:
        raise ImageDomainError(f"Target size must be positive, got {target_w}x{target_h}.")
    rows = np.arange(target_h) % img.height
    cols = np.arange(target_w) % img.width
    out = img.to_array()[np.ix_(rows, cols)]
    return Image2D(target_w, target_h, out.reshape(-1), img.bit_depth)


def requantize(img: Image2D, target_bits: int, seed: int = 0) -> Image2D:
    """
    Up-quantization shifts left and fills the new low bits with seeded uniform noise;
    down-quantization shifts right.
    """
    if not 1 <= target_bits <= MAX_BIT_DEPTH:
        raise ImageDomainError(f"target_bits must lie in [1, {MAX_BIT_DEPTH}], got {target_bits}.")
    delta = target_bits - img.bit_depth
    values = img.values.astype(np.uint64)
    if delta > 0:
        rng = np.random.default_rng(seed)
        low = rng.integers(0, 1 << delta, size=values.size, dtype=np.uint64)
        out = (values << np.uint64(delta)) | low
    elif delta < 0:
        out = values >> np.uint64(-delta)
    else:
        out = values
    return Image2D(img.width, img.height, out, target_bits)


def random_image(width: int, height: int, bits: int, seed: int) -> Image2D:
    rng = np.random.default_rng(seed)
    values = rng.integers(0, 1 << bits, size=width * height, dtype=np.uint64)
    return Image2D(width, height, values, bits)


def synthetic_image(width: int, height: int, seed: int, sigma: float = 2.5) -> Image2D:
    """Smoothed noise rescaled to 8 bits; stands in for a natural image in benchmarks."""
    rng = np.random.default_rng(seed)
    smooth = ndimage.gaussian_filter(rng.standard_normal((height, width)), sigma=sigma)
    span = float(np.ptp(smooth))
    if span == 0.0:
        return Image2D(width, height, np.zeros(width * height, dtype=np.uint8), 8)
    scaled = np.rint((smooth - smooth.min()) / span * 255.0).astype(np.uint8)
    return Image2D(width, height, scaled.reshape(-1), 8)
