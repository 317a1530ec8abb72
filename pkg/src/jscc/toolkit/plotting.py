"""Plotting utilities for the figure jobs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

#: Fixed salt so that SVG element ids do not change between runs.
SVG_HASHSALT = "jscc-latency"

MARKERS = ("o", "s", "^", "v", "D", "x", "+")


def line_plot(
    table: pd.DataFrame,
    x: str,
    y: str,
    hue: str,
    filename: str | Path,
    xlabel: str | None = None,
    ylabel: str | None = None,
    yerr: str | None = None,
) -> Path:
    """Draw one line per ``hue`` value and save it as a deterministic SVG.

    Parameters
    ----------
    table: pd.DataFrame
        Long format data.
    x, y, hue: str
        Column names of the abscissa, ordinate and line label.
    filename: str or Path
        Output SVG file.
    yerr: str, optional
        Column of symmetric error bars.
    """
    with plt.rc_context({"svg.hashsalt": SVG_HASHSALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for i, (label, group) in enumerate(table.groupby(hue, sort=False)):
            group = group.sort_values(x)
            ax.errorbar(
                group[x],
                group[y],
                yerr=group[yerr] if yerr else None,
                marker=MARKERS[i % len(MARKERS)],
                capsize=2,
                label=str(label),
            )
        ax.set_xlabel(xlabel or x)
        ax.set_ylabel(ylabel or y)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        filename = Path(filename)
        fig.savefig(filename, format="svg", metadata={"Date": None})
        plt.close(fig)
    return filename
