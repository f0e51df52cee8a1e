import argparse
import logging
import os
import sys

SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
ROOT_DIR = os.path.dirname(SCRIPT_DIR)
if ROOT_DIR not in sys.path:
    sys.path.insert(0, ROOT_DIR)

from scripts.attributes import ATTRIBUTES, compute_attribute, direct_filter
from scripts.bench import DEFAULT_SWEEPS_FILE, BenchConfig, directional_report, recommend, run_bench
from scripts.builders import ALGORITHM_IDS, build_tree
from scripts.consistency import check_tree, run_consistency_checks
from scripts.constants import (
    DEFAULT_CONNECTIVITY,
    DEFAULT_PARALLEL_BASE,
    DEFAULT_WORKERS,
    ORACLE_MAX_PIXELS,
    SORT_SWITCH_BITS,
)
from scripts.image_core import Connectivity, Image2D, load_image, random_image, save_image
from scripts.logging_utils import format_table, phase_rows, setup_logging
from scripts.timing import PhaseTimer
from scripts.tree_repr import dump_tree, load_tree_dump, tree_stats


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError(f"size must be positive, got {text!r}")
    return w, h


def _csv_list(cast):
    def parse(text: str) -> list:
        try:
            return [cast(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list {text!r}") from None
    return parse


def _add_image_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("image", nargs="?", help="Input image (.pgm, or .raw/.u32 for up to 32 bits)")
    p.add_argument("--random", type=_parse_size, metavar="WxH", help="Use a seeded random image instead of a file")
    p.add_argument("--bits", type=int, default=8, help="Bit depth of --random images (default: 8)")
    p.add_argument("--seed", type=int, default=0, help="Seed of --random images (default: 0)")
    p.add_argument("-c", "--connectivity", type=int, choices=(4, 8), default=DEFAULT_CONNECTIVITY)


def _add_algorithm_args(p: argparse.ArgumentParser, default: str = "uf_levelcomp") -> None:
    p.add_argument("-a", "--algorithm", choices=ALGORITHM_IDS, default=default,
                   help=f"Builder id (default: {default})")
    p.add_argument("--bands", type=int, help="Split into N row bands (map-reduce)")
    p.add_argument("--workers", type=int, default=DEFAULT_WORKERS,
                   help=f"Worker threads for map-reduce (default: {DEFAULT_WORKERS}, env MAXTREE_WORKERS)")
    p.add_argument("--base", choices=ALGORITHM_IDS[:-1], default=DEFAULT_PARALLEL_BASE,
                   help="Band builder of the 'parallel' algorithm")


def _read_image(parser: argparse.ArgumentParser, args) -> Image2D:
    if args.random is not None:
        return random_image(*args.random, args.bits, args.seed)
    if not args.image:
        parser.error("an image path or --random WxH is required")
    return load_image(args.image)


def cmd_build(args, parser) -> int:
    logger = logging.getLogger("maxtree")
    img = _read_image(parser, args)
    timer = PhaseTimer()
    tree = build_tree(img, args.algorithm, args.connectivity, bands=args.bands,
                      workers=args.workers, base=args.base, timer=timer)
    stats = tree_stats(img, tree)

    if args.output:
        with open(args.output, "w") as fh:
            dump_tree(img, tree, fh)
        logger.info("Tree dump written to %s", args.output)
        out = sys.stdout
    else:
        dump_tree(img, tree, sys.stdout)
        out = sys.stderr

    rows = [
        ["image", str(img)],
        ["algorithm", args.algorithm + (f" ({args.bands} bands)" if args.bands else "")],
        ["nodes", stats.nodes],
        ["leaves", stats.leaves],
        ["depth", stats.depth],
    ] + phase_rows(timer.phases)
    print(format_table(["Field", "Value"], rows), file=out)
    return 0


def cmd_filter(args, parser) -> int:
    logger = logging.getLogger("maxtree")
    if args.area is not None:
        attr_name, threshold = "area", args.area
    else:
        attr_name, threshold = "height", args.height
    if threshold < 1:
        parser.error(f"--{attr_name} threshold must be >= 1, got {threshold}")
    img = _read_image(parser, args)
    tree = build_tree(img, args.algorithm, args.connectivity, bands=args.bands,
                      workers=args.workers, base=args.base)
    attr = compute_attribute(tree, img, ATTRIBUTES[attr_name])
    out = direct_filter(tree, img, attr, threshold)
    save_image(out, args.output)
    logger.info("%s opening (>= %d) written to %s", attr_name, threshold, args.output)
    return 0


def cmd_bench(args, parser) -> int:
    logger = logging.getLogger("maxtree")
    overrides = dict(
        algorithms=args.algorithms,
        image=args.image,
        megapixels=args.megapixels,
        bits=args.bits,
        bands=args.bands,
        workers=args.workers,
        repetitions=args.repetitions,
        seed=args.seed,
        memory=True if args.memory else None,
        phases=False if args.no_phases else None,
        connectivity=args.connectivity,
    )
    try:
        if args.preset:
            config = BenchConfig.from_preset(args.preset, args.config, **overrides)
        else:
            config = BenchConfig().with_overrides(**overrides)
    except (KeyError, ValueError, TypeError) as exc:
        parser.error(str(exc))

    df = run_bench(config)
    df.to_csv(sys.stdout, index=False)

    if args.checks:
        report = directional_report(df)
        if report.empty:
            logger.warning("No cell ran both builders of a directional check")
        else:
            rows = [[r.check, r.n, r.bits, f"{r.candidate_ms:.1f}", f"{r.baseline_ms:.1f}",
                     f"{r.ratio:.2f}", f"{r.max_ratio:.2f}", r.status] for r in report.itertuples()]
            print(format_table(["Check", "Pixels", "Bits", "Candidate ms", "Baseline ms", "Ratio", "Bar", "Status"],
                               rows), file=sys.stderr)

    if args.export:
        import matplotlib
        matplotlib.use("Agg")  # non-interactive; must precede pyplot
        from scripts.charts import export_charts
        paths = export_charts(df, args.export, switch_bits=SORT_SWITCH_BITS)
        logger.info("Exported %d chart(s) to %s", len(paths), args.export)
    return 0


def cmd_validate(args, parser) -> int:
    logger = logging.getLogger("maxtree")
    img = _read_image(parser, args)
    conn = Connectivity.parse(args.connectivity)

    if args.tree:
        with open(args.tree) as fh:
            tree = load_tree_dump(fh)
        failures = check_tree(img, tree, os.path.basename(args.tree))
        if not failures:
            # beyond the oracle limit a sequential build is the reference
            reference = [] if img.n <= ORACLE_MAX_PIXELS else ["uf"]
            failures = run_consistency_checks(img, conn, algorithms=reference, extra_trees={args.tree: tree})
    else:
        failures = run_consistency_checks(
            img, conn, algorithms=args.algorithms, bands=args.bands_list, workers=args.workers,
        )

    if failures:
        first = failures[0]
        logger.error("First divergence: %s on %s at pixel %s: %s",
                     first["check"], first["algorithm"], first["pixel"], first["detail"])
        rows = [[f["check"], f["algorithm"], f["pixel"], f["detail"]] for f in failures[:20]]
        print(format_table(["Check", "Tree", "Pixel", "Detail"], rows, {2}))
        return 1
    logger.info("All trees valid and equivalent on %s", img)
    return 0


def cmd_recommend(args, parser) -> int:
    try:
        rec = recommend(args.bits, args.parallel, args.memory_constrained)
    except ValueError as exc:
        parser.error(str(exc))
    rows = [
        ["algorithm", rec.algorithm],
        ["parallel", "yes" if rec.parallel else "no"],
        ["rationale", rec.rationale],
    ]
    print(format_table(["Field", "Value"], rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Build, filter, cross-validate and benchmark max-trees",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Build a tree and dump it
  python scripts/run_maxtree.py build samples/lena.pgm --algorithm salembier -o tree.txt

  # Area opening
  python scripts/run_maxtree.py filter samples/lena.pgm --area 50 -o opened.pgm

  # Cross-check every builder on a random 64x64 image
  python scripts/run_maxtree.py validate --random 64x64 --bits 12 --seed 7

  # Quantization sweep as CSV
  python scripts/run_maxtree.py bench --preset quantization_sweep > quant.csv

  # Directional timing ratios at 4 MP (table on stderr)
  python scripts/run_maxtree.py bench --preset directional --checks > directional.csv

  # Which builder for 20-bit data on a multicore box?
  python scripts/run_maxtree.py recommend --bits 20 --parallel
        """,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="Build a max-tree and write the tree dump")
    _add_image_args(p)
    _add_algorithm_args(p)
    p.add_argument("-o", "--output", help="Tree dump path (default: stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("filter", help="Direct filtering (area opening by default)")
    _add_image_args(p)
    _add_algorithm_args(p)
    crit = p.add_mutually_exclusive_group(required=True)
    crit.add_argument("--area", type=int, help="Keep components with at least this many pixels")
    crit.add_argument("--height", type=int, help="Keep components at least this high above their base")
    p.add_argument("-o", "--output", required=True, help="Output image path")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("bench", help="Run a benchmark sweep; CSV on stdout")
    p.add_argument("--preset", help="Preset name from the sweeps file")
    p.add_argument("--config", default=DEFAULT_SWEEPS_FILE, help="Sweeps YAML file")
    p.add_argument("--image", help="Base image (default: synthetic 512x512)")
    p.add_argument("--algorithms", type=_csv_list(str), help="Comma-separated builder ids")
    p.add_argument("--megapixels", type=_csv_list(float))
    p.add_argument("--bits", type=_csv_list(int))
    p.add_argument("--bands", type=_csv_list(int))
    p.add_argument("--workers", type=_csv_list(int))
    p.add_argument("--repetitions", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-c", "--connectivity", type=int, choices=(4, 8))
    p.add_argument("--memory", action="store_true", help="Also record the allocation high-water mark")
    p.add_argument("--no-phases", action="store_true", help="Only report total time")
    p.add_argument("--export", metavar="DIR", help="Also write PNG charts to DIR")
    p.add_argument("--checks", action="store_true",
                   help="Print directional timing ratios to stderr (see the directional preset)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate", help="Validate and cross-check builders (or a tree dump)")
    _add_image_args(p)
    p.add_argument("--algorithms", type=_csv_list(str), help="Comma-separated builder ids (default: all)")
    p.add_argument("--bands", dest="bands_list", type=_csv_list(int), default=[2, 3],
                   help="Band counts tried for 'parallel' (default: 2,3)")
    p.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    p.add_argument("--tree", help="Check this tree dump instead of building")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("recommend", help="Suggest a builder")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--memory-constrained", action="store_true")
    p.set_defaults(func=cmd_recommend)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(logging.DEBUG if args.verbose else logging.INFO, stream=sys.stderr)

    if getattr(args, "algorithms", None) and args.command == "validate":
        unknown = [a for a in args.algorithms if a not in ALGORITHM_IDS]
        if unknown:
            parser.error(f"unknown algorithm(s) {unknown}; choose from {', '.join(ALGORITHM_IDS)}")

    try:
        return args.func(args, parser)
    except KeyboardInterrupt:
        print("\nInterrupted by user.", file=sys.stderr)
        return 1
    except Exception as exc:
        logging.getLogger("maxtree").exception("%s failed: %s", args.command, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
