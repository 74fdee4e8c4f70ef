"""Vertex-height counting curves per tree and per group."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..trees import MergeTree

DEFAULT_GRID_SIZE = 256


@dataclass(frozen=True)
class HeightCurve:
    grid: np.ndarray
    counts: np.ndarray  # (n_trees, n_grid), vertices strictly above each threshold
    groups: tuple
    mean: np.ndarray  # (n_groups, n_grid)
    sd: np.ndarray

    def to_csv(self, path: str | Path) -> None:
        Path(path).write_text(format_curves_csv(self))


def format_curves_csv(c: HeightCurve) -> str:
    head = ["h"] + [f"mean_{g},sd_{g}" for g in c.groups]
    lines = [",".join(head)]
    for k, h in enumerate(c.grid):
        cells = [repr(float(h))]
        for gi in range(len(c.groups)):
            cells.append(f"{float(c.mean[gi, k])!r},{float(c.sd[gi, k])!r}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def height_curves(trees: Sequence[MergeTree], labels: Sequence | None = None, grid=None) -> HeightCurve:
    """Count vertices with height strictly above each grid threshold.

    The default grid has 256 evenly spaced thresholds on ``[0, max height]``.
    Group means and population standard deviations are pointwise.
    """
    if not trees:
        raise ValueError("no trees")
    labels = list(labels) if labels is not None else [0] * len(trees)
    if len(labels) != len(trees):
        raise ValueError("one label per tree is required")
    if grid is None:
        top = max(max(t.heights) for t in trees)
        grid = np.linspace(0.0, top, DEFAULT_GRID_SIZE)
    grid = np.asarray(grid, dtype=float)
    counts = np.zeros((len(trees), len(grid)), dtype=np.int64)
    for i, t in enumerate(trees):
        h = np.sort(np.asarray(t.heights))
        counts[i] = len(h) - np.searchsorted(h, grid, side="right")
    groups = tuple(sorted(set(labels), key=str))
    lab = np.asarray(labels, dtype=object)
    mean = np.zeros((len(groups), len(grid)))
    sd = np.zeros((len(groups), len(grid)))
    for gi, g in enumerate(groups):
        rows = counts[lab == g]
        if len(rows) == 0:
            raise ValueError(f"group {g!r} is empty")
        mean[gi] = rows.mean(axis=0)
        sd[gi] = rows.std(axis=0)
    return HeightCurve(grid, counts, groups, mean, sd)
