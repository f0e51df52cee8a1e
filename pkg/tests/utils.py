import os

import numpy as np

from scripts.image_core import Connectivity, Image2D, random_image, requantize, save_pgm, synthetic_image

FUZZ_DEPTHS = (1, 2, 4, 8, 12, 16, 20, 32)
FUZZ_SEED = 20130915


def image(rows, bit_depth=8):
    return Image2D.from_array(np.asarray(rows), bit_depth=bit_depth)


# Hand-traced samples
LINE_132 = [[1, 3, 2]]
SQUARE_1243 = [[1, 2], [4, 3]]


def fuzz_corpus(count=200, max_side=64, seed=FUZZ_SEED):
    """
    Seeded random images: sizes 1x1 to max_side x max_side, every depth of
    FUZZ_DEPTHS and both connectivities. Every third image is smoothed noise
    requantized to the target depth so that flat zones and plateaus show up.
    Yields (label, image, connectivity).
    """
    rng = np.random.default_rng(seed)
    for i in range(count):
        w = int(rng.integers(1, max_side + 1))
        h = int(rng.integers(1, max_side + 1))
        if i % 7 == 0:
            w = min(w, 4)
            h = min(h, 4)
        bits = FUZZ_DEPTHS[i % len(FUZZ_DEPTHS)]
        conn = Connectivity.C4 if (i // len(FUZZ_DEPTHS)) % 2 == 0 else Connectivity.C8
        if i % 3 == 0:
            img = requantize(synthetic_image(w, h, seed + i, sigma=1.5), bits, seed + i)
        else:
            img = random_image(w, h, bits, seed + i)
        yield f"#{i} {w}x{h} {bits}b C{int(conn)}", img, conn


def write_pgm(path, rows, bit_depth=8, ascii=False):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    save_pgm(image(rows, bit_depth), path, ascii=ascii)
    return path
