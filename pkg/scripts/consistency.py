from __future__ import annotations

import logging
from collections.abc import Iterable

from scripts.builders import ALGORITHM_IDS, build_tree
from scripts.constants import ORACLE_MAX_PIXELS, SORT_SWITCH_BITS
from scripts.image_core import Connectivity, Image2D
from scripts.oracle import brute_maxtree
from scripts.tree_repr import MaxTree, NormalizedTree, normalize, validate

_log = logging.getLogger("maxtree")


def check_tree(img: Image2D, tree: MaxTree, label: str) -> list[dict]:
    """Validation failures of a single tree, one entry per violation."""
    report = validate(img, tree)
    return [
        {"check": f"validate:{v['check']}", "algorithm": label, "pixel": v["pixel"], "detail": v["detail"]}
        for v in report.violations
    ]


def run_consistency_checks(
    img: Image2D,
    conn: Connectivity = Connectivity.C4,
    algorithms: Iterable[str] | None = None,
    bands: Iterable[int] = (2,),
    workers: int | None = None,
    use_oracle: bool | None = None,
    extra_trees: dict[str, MaxTree] | None = None,
) -> list[dict]:
    """
    Build with every requested algorithm, validate each tree and compare their
    normalized forms with each other and with the oracle. Returns failures.
    """
    algorithms = list(algorithms) if algorithms is not None else list(ALGORITHM_IDS)
    if use_oracle is None:
        use_oracle = img.n <= ORACLE_MAX_PIXELS

    trees: dict[str, MaxTree] = {}
    failures: list[dict] = []
    for algo in algorithms:
        if algo == "salembier" and img.bit_depth >= SORT_SWITCH_BITS:
            _log.debug("salembier skipped at %d bits", img.bit_depth)
            continue
        runs = [(f"parallel[{b}]", b) for b in bands] if algo == "parallel" else [(algo, None)]
        for label, band_count in runs:
            try:
                trees[label] = build_tree(img, algo, conn, bands=band_count, workers=workers)
            except Exception as exc:
                failures.append({"check": "build", "algorithm": label, "pixel": -1, "detail": f"error: {exc}"})
    built = list(trees)
    trees.update(extra_trees or {})

    normalized: dict[str, NormalizedTree] = {}
    for label, tree in trees.items():
        tree_failures = check_tree(img, tree, label)
        failures.extend(tree_failures)
        if not tree_failures:
            normalized[label] = normalize(img, tree)

    reference_label, reference = None, None
    if use_oracle:
        reference_label, reference = "oracle", brute_maxtree(img, conn)
    elif normalized:
        # external trees are never their own reference
        built_ok = [label for label in built if label in normalized]
        if not built_ok and extra_trees:
            _log.warning("No built tree to compare %d external tree(s) against", len(extra_trees))
        reference_label = built_ok[0] if built_ok else next(iter(normalized))
        reference = normalized[reference_label]

    for label, tree in normalized.items():
        if label == reference_label:
            continue
        diff = reference.first_difference(tree)
        if diff is not None:
            failures.append({
                "check": f"equal_to_{reference_label}",
                "algorithm": label,
                "pixel": -1,
                "detail": diff,
            })

    if failures:
        _log.error("%d consistency failure(s) on %s", len(failures), img)
    return failures
