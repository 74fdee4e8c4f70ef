"""Clustering on precomputed distance matrices."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.cluster import DBSCAN
from sklearn.metrics import rand_score, silhouette_score

from ..hclust import DEFAULT_LINKAGE, Linkage, agglomerate
from .matrix import DistanceMatrix

SCORE_TIE = 1e-12


@dataclass(frozen=True)
class ClusterAssignment:
    ids: tuple[str, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))
        if len(self.ids) != len(self.labels):
            raise ValueError("one label per id is required")

    @property
    def n_clusters(self) -> int:
        return len({x for x in self.labels if x >= 0})

    def members(self, label: int) -> list[int]:
        return [i for i, x in enumerate(self.labels) if x == label]

    def to_csv(self, path: str | Path) -> None:
        Path(path).write_text(format_assignment_csv(self))


def format_assignment_csv(a: ClusterAssignment) -> str:
    return "id,label\n" + "".join(f"{i},{x}\n" for i, x in zip(a.ids, a.labels))


def _relabel_by_first_seen(raw: Sequence[int]) -> list[int]:
    seen: dict[int, int] = {}
    out = []
    for x in raw:
        if x < 0:
            out.append(-1)
            continue
        if x not in seen:
            seen[x] = len(seen)
        out.append(seen[x])
    return out


def hcluster_matrix(m: DistanceMatrix, linkage: Linkage | str = DEFAULT_LINKAGE, k: int = 2) -> ClusterAssignment:
    """Agglomerative clustering cut at exactly ``k`` clusters.

    Labels are numbered in order of first appearance along the item order.
    """
    n = m.size
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    merges = agglomerate(m.values, linkage)
    parent = list(range(2 * n - 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for step, mg in enumerate(merges[: n - k]):
        new = n + step
        parent[find(mg.left)] = new
        parent[find(mg.right)] = new
    return ClusterAssignment(m.ids, _relabel_by_first_seen([find(i) for i in range(n)]))


def silhouette(m: DistanceMatrix, a: ClusterAssignment) -> float:
    """Mean silhouette from precomputed distances (singletons score 0)."""
    labels = np.asarray(a.labels)
    if len(set(labels)) < 2 or len(set(labels)) >= m.size:
        return 0.0
    return float(silhouette_score(np.asarray(m.values), labels, metric="precomputed"))


@dataclass(frozen=True)
class Selection:
    k: int
    assignment: ClusterAssignment
    score: float
    scores: dict[int, float]


def silhouette_select(m: DistanceMatrix, linkage: Linkage | str = Linkage.WARD, k_range=(2, 5)) -> Selection:
    """Pick the cut in ``k_range`` with the largest mean silhouette; ties
    (within 1e-12) go to the smallest k."""
    if m.size < 6:
        raise ValueError(f"silhouette selection needs at least 6 items, got {m.size}")
    if not np.any(m.values):
        raise ValueError("degenerate all-zero distance matrix")
    lo, hi = k_range
    scores, cuts = {}, {}
    for k in range(lo, min(hi, m.size - 1) + 1):
        cuts[k] = hcluster_matrix(m, linkage, k)
        scores[k] = silhouette(m, cuts[k])
    top = max(scores.values())
    k = min(k for k, s in scores.items() if s >= top - SCORE_TIE)
    return Selection(k, cuts[k], scores[k], scores)


def dbscan_matrix(m: DistanceMatrix, eps: float, min_pts: int) -> ClusterAssignment:
    """Density clustering with neighbourhoods ``d <= eps``; noise is -1."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if min_pts < 1:
        raise ValueError("min_pts must be >= 1")
    raw = DBSCAN(eps=eps, min_samples=min_pts, metric="precomputed").fit(np.asarray(m.values)).labels_
    return ClusterAssignment(m.ids, _relabel_by_first_seen(raw.tolist()))


def rand_index(a: ClusterAssignment, b: ClusterAssignment) -> float:
    """Fraction of item pairs on which the two partitions agree."""
    if a.ids != b.ids:
        raise ValueError("assignments cover different items")
    if len(a.ids) < 2:
        return 1.0
    return float(rand_score(a.labels, b.labels))
