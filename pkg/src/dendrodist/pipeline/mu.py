"""Data-driven choice of the Beta measure on the pruning threshold."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import gaussian_kde

from ..trees import MergeTree

DEFAULT_CONCENTRATION = 17.5
FALLBACK = (2.5, 15.0)


class NoAntimodeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MuSuggestion:
    alpha: float
    beta: float
    antimode: float | None
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    fallback: bool


def internal_heights(trees: Sequence[MergeTree]) -> np.ndarray:
    """Heights of non-leaf vertices, divided by the population maximum."""
    top = max(max(t.heights) for t in trees)
    vals = [t.heights[v] for t in trees for v in range(t.n_vertices) if t.children[v]]
    return np.asarray(vals, dtype=float) / (top if top > 0 else 1.0)


def first_interior_minimum(density: np.ndarray) -> int | None:
    """Index of the first strict local minimum that is followed by a rise."""
    d = density
    for i in range(1, len(d) - 1):
        if d[i] < d[i - 1]:
            j = i + 1
            while j < len(d) and d[j] == d[i]:
                j += 1
            if j < len(d) and d[j] > d[i]:
                return i
    return None


def suggest_mu(
    trees: Sequence[MergeTree], concentration: float = DEFAULT_CONCENTRATION, grid_size: int = 512
) -> MuSuggestion:
    """Beta parameters whose mean sits at the first antimode of the rescaled
    internal-vertex height density (Gaussian kernel, Scott bandwidth), with
    ``alpha + beta = concentration``. Falls back to (2.5, 15) with a warning
    when the density has no interior minimum."""
    if len(trees) < 2:
        raise ValueError("need at least two trees")
    h = internal_heights(trees)
    grid = np.linspace(0.0, 1.0, grid_size)
    if len(h) < 2 or np.ptp(h) == 0:
        density = np.zeros_like(grid)
        bw = 0.0
        idx = None
    else:
        kde = gaussian_kde(h)
        density = kde(grid)
        bw = float(np.sqrt(kde.covariance[0, 0]))
        idx = first_interior_minimum(density)
    if idx is None:
        warnings.warn("height density has no interior minimum; using Beta(2.5, 15)", NoAntimodeWarning, stacklevel=2)
        return MuSuggestion(*FALLBACK, None, grid, density, bw, True)
    x = float(grid[idx])
    return MuSuggestion(x * concentration, (1 - x) * concentration, x, grid, density, bw, False)
