from __future__ import annotations

import os

import pandas as pd
import matplotlib
import matplotlib.pyplot as plt
import matplotlib.ticker as mticker

_ALGO_COLORS = {
    "uf":           "#7F7F7F",
    "uf_rank":      "#1F5AA6",
    "uf_levelcomp": "#2CA58D",
    "salembier":    "#E4572E",
    "nonrec":       "#F3A712",
    "parallel":     "#8E44AD",
}

_PHASE_COLORS = {
    "sort":       "#4C78A8",
    "build":      "#F58518",
    "merge":      "#54A24B",
    "canonize+S": "#B279A2",
}

_RC: dict = {
    # background / spines
    "figure.facecolor":     "#FFFFFF",
    "axes.facecolor":       "#FAFAFA",
    "axes.spines.top":      False,
    "axes.spines.right":    False,
    "axes.edgecolor":       "#555555",
    # grid
    "axes.grid":            True,
    "axes.grid.axis":       "y",
    "grid.alpha":           0.35,
    "grid.linewidth":       0.6,
    "grid.color":           "#BBBBBB",
    # typography
    "font.family":          "sans-serif",
    "font.size":            10,
    "axes.titlesize":       12,
    "axes.titleweight":     "semibold",
    "legend.fontsize":      9,
    "legend.frameon":       False,
    # lines / export
    "lines.linewidth":      1.8,
    "lines.markersize":     5,
    "figure.dpi":           110,
    "savefig.dpi":          200,
    "savefig.bbox":         "tight",
}

matplotlib.rcParams.update(_RC)


def _save(fig: plt.Figure, path: str | None) -> plt.Figure:
    if path:
        fig.savefig(path)
    return fig


def _totals(df: pd.DataFrame) -> pd.DataFrame:
    return df[df["phase"] == "total"]


def size_sweep_chart(df: pd.DataFrame, path: str | None = None) -> plt.Figure | None:
    """Total time versus image size, one line per algorithm and bit depth."""
    totals = _totals(df)
    if totals["n"].nunique() < 2:
        return None
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for (algo, bits), d in totals.groupby(["algo", "bits"]):
        d = d.groupby("n", as_index=False)["ms"].min().sort_values("n")
        ax.plot(d["n"] / 1e6, d["ms"], marker="o",
                color=_ALGO_COLORS.get(algo), label=f"{algo} ({bits} bits)")
    ax.set_xlabel("Image size (megapixels)")
    ax.set_ylabel("Wall time (ms)")
    ax.set_title("Build time vs. image size")
    ax.legend(loc="upper left")
    fig.tight_layout()
    return _save(fig, path)


def quantization_chart(df: pd.DataFrame, path: str | None = None,
                       switch_bits: int | None = None) -> plt.Figure | None:
    """Total time versus bit depth at the largest benchmarked size."""
    totals = _totals(df)
    if totals["bits"].nunique() < 2:
        return None
    totals = totals[totals["n"] == totals["n"].max()]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for algo, d in totals.groupby("algo"):
        d = d.groupby("bits", as_index=False)["ms"].min().sort_values("bits")
        ax.plot(d["bits"], d["ms"], marker="o", color=_ALGO_COLORS.get(algo), label=algo)
    if switch_bits is not None:
        ax.axvline(switch_bits, color="#888888", linestyle="--", linewidth=1)
    ax.xaxis.set_major_locator(mticker.MaxNLocator(integer=True))
    ax.set_xlabel("Quantization (bits)")
    ax.set_ylabel("Wall time (ms)")
    ax.set_title(f"Build time vs. quantization  (n = {int(totals['n'].max()):,})")
    ax.legend(loc="upper left")
    fig.tight_layout()
    return _save(fig, path)


def phase_breakdown_chart(df: pd.DataFrame, path: str | None = None) -> plt.Figure | None:
    """Stacked per-phase time of every configuration at its largest size."""
    phases = df[df["phase"] != "total"]
    if phases.empty:
        return None
    largest = phases[phases["n"] == phases["n"].max()]
    largest = largest.assign(
        label=largest["algo"] + " " + largest["bits"].astype(str) + "b"
        + largest["bands"].map(lambda b: f" x{b}" if b > 1 else "")
    )
    table = largest.pivot_table(index="label", columns="phase", values="ms", aggfunc="min").fillna(0.0)
    ordered = [p for p in _PHASE_COLORS if p in table.columns]

    fig, ax = plt.subplots(figsize=(max(6, len(table) * 0.7), 4.5))
    bottom = pd.Series(0.0, index=table.index)
    for phase in ordered:
        ax.bar(table.index, table[phase], bottom=bottom, color=_PHASE_COLORS[phase], label=phase)
        bottom = bottom + table[phase]
    ax.set_ylabel("Wall time (ms)")
    ax.set_title("Time spent in each phase")
    ax.tick_params(axis="x", rotation=35)
    ax.legend(loc="upper left")
    fig.tight_layout()
    return _save(fig, path)


def export_charts(df: pd.DataFrame, out_dir: str, switch_bits: int | None = None) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, fn, kwargs in (
        ("size_sweep.png", size_sweep_chart, {}),
        ("quantization.png", quantization_chart, {"switch_bits": switch_bits}),
        ("phases.png", phase_breakdown_chart, {}),
    ):
        path = os.path.join(out_dir, name)
        fig = fn(df, path, **kwargs)
        if fig is not None:
            plt.close(fig)
            written.append(path)
    return written
