"""Pairwise tree-distance matrices."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..editdist import DEFAULT_BUDGET_LEAVES, PruningMeasure, rescale
from ..editdist.distance import _canonical_distance, edit_distance, pruned_distance
from ..errors import BudgetExceededError
from ..trees import MergeTree, canonicalize

METRICS = ("edit", "pruned")


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray
    ids: tuple[str, ...]

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("distance matrix must be square")
        if len(self.ids) != v.shape[0]:
            raise ValueError("one id per row is required")
        if not np.isfinite(v).all():
            raise ValueError("distance matrix has non-finite entries")
        if np.abs(v - v.T).max(initial=0.0) > 1e-12:
            raise ValueError("distance matrix is not symmetric")
        if (np.diag(v) != 0).any():
            raise ValueError("distance matrix diagonal must be zero")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))

    @property
    def size(self) -> int:
        return len(self.ids)

    def to_csv(self, path: str | Path) -> None:
        Path(path).write_text(format_matrix_csv(self))

    @classmethod
    def read_csv(cls, path: str | Path) -> "DistanceMatrix":
        lines = Path(path).read_text().strip().splitlines()
        ids = lines[0].split(",")[1:]
        rows = [line.split(",") for line in lines[1:]]
        if [r[0] for r in rows] != ids:
            raise ValueError("row ids do not match header ids")
        return cls(np.array([[float(x) for x in r[1:]] for r in rows]), tuple(ids))


def format_matrix_csv(m: DistanceMatrix) -> str:
    out = ["id," + ",".join(m.ids)]
    for i, row in zip(m.ids, m.values):
        out.append(i + "," + ",".join(repr(float(x)) for x in row))
    return "\n".join(out) + "\n"


# worker state, set once per process
_STATE: dict = {}


def _init_worker(trees, metric, mu, budget):
    _STATE.update(trees=trees, metric=metric, mu=mu, budget=budget)


def _pair_value(i: int, j: int) -> float:
    trees, metric, mu, budget = _STATE["trees"], _STATE["metric"], _STATE["mu"], _STATE["budget"]
    if metric == "edit":
        return edit_distance(trees[i], trees[j], budget)
    return pruned_distance(trees[i], trees[j], mu, budget)


def _run_chunk(pairs: list[tuple[int, int]]) -> list[float | tuple]:
    out = []
    for i, j in pairs:
        try:
            out.append(_pair_value(i, j))
        except BudgetExceededError as e:
            out.append(("budget", i, j, str(e)))
    return out


def _chunks(pairs: list[tuple[int, int]], n_chunks: int) -> list[list[tuple[int, int]]]:
    # round-robin keeps expensive rows spread over chunks
    n_chunks = max(1, min(n_chunks, len(pairs)))
    return [pairs[k::n_chunks] for k in range(n_chunks)]


def distance_matrix(
    trees: Sequence[MergeTree],
    metric: str = "pruned",
    mu: PruningMeasure | None = None,
    *,
    rescale_mode: str = "population",
    budget_leaves: int = DEFAULT_BUDGET_LEAVES,
    jobs: int = 1,
    ids: Sequence[str] | None = None,
) -> DistanceMatrix:
    """All pairwise distances between ``trees``.

    Heights are rescaled first (see :func:`dendrodist.editdist.rescale`).
    Each entry is a pure function of its pair, so the result is bitwise
    identical for any ``jobs``.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    if metric == "pruned" and mu is None:
        raise ValueError("the pruned metric needs a measure")
    n = len(trees)
    if n < 2:
        raise ValueError("need at least two trees")
    ids = tuple(str(i) for i in ids) if ids is not None else tuple(str(i) for i in range(n))
    canon = [canonicalize(t) for t in rescale(trees, rescale_mode)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if jobs <= 1:
        _init_worker(canon, metric, mu, budget_leaves)
        results = [_run_chunk(pairs)]
        chunks = [pairs]
    else:
        chunks = _chunks(pairs, jobs * 8)
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(canon, metric, mu, budget_leaves)) as ex:
            results = list(ex.map(_run_chunk, chunks))
    values = np.zeros((n, n))
    for chunk, res in zip(chunks, results):
        for (i, j), v in zip(chunk, res):
            if isinstance(v, tuple):
                raise BudgetExceededError(f"pair ({ids[i]}, {ids[j]}): {v[3]}", pair=(ids[i], ids[j]))
            values[i, j] = values[j, i] = v
    return DistanceMatrix(values, ids)


def edit_matrix_from_canonical(canon) -> np.ndarray:
    """Edit distances between already canonical trees, without rescaling."""
    n = len(canon)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = _canonical_distance(canon[i], canon[j])
    return out


def mean_block_ratio(m: DistanceMatrix, groups: Sequence, inner, other) -> float:
    """Mean distance inside group ``inner`` over mean distance between
    ``inner`` and ``other``."""
    g = np.asarray(groups)
    a, b = np.flatnonzero(g == inner), np.flatnonzero(g == other)
    within = m.values[np.ix_(a, a)][np.triu_indices(len(a), 1)].mean()
    cross = m.values[np.ix_(a, b)].mean()
    return float(within / cross) if cross > 0 else math.inf
