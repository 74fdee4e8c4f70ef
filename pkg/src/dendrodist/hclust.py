"""Agglomerative clustering of point clouds into dendrograms.

Cluster distances are updated with the Lance-Williams recurrence

    d(k, i+j) = a_i d(k, i) + a_j d(k, j) + b d(i, j) + g |d(k, i) - d(k, j)|

with coefficients (n_x is the size of cluster x)

    single    a_i = a_j = 1/2, b = 0, g = -1/2
    complete  a_i = a_j = 1/2, b = 0, g = +1/2
    average   a_i = n_i / (n_i + n_j), b = g = 0
    ward      on squared distances: a_i = (n_i + n_k) / N, a_j = (n_j + n_k) / N,
              b = -n_k / N, g = 0, N = n_i + n_j + n_k

Ward heights are reported as the square root of the squared update, the
usual convention for Euclidean input.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .trees import MergeTree


class Linkage(str, enum.Enum):
    SINGLE = "single"
    COMPLETE = "complete"
    AVERAGE = "average"
    WARD = "ward"


DEFAULT_LINKAGE = Linkage.AVERAGE


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    labels: tuple[str, ...] | None = None
    cloud_id: str | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array (n, p)")
        if pts.shape[0] < 1:
            raise ValueError("a point cloud needs at least one point")
        if np.isnan(pts).any():
            raise ValueError("point cloud contains NaN")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != pts.shape[0]:
                raise ValueError("one label per point is required")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def pairwise_metric(cloud: PointCloud) -> np.ndarray:
    """Euclidean distance matrix with an exactly zero diagonal."""
    x = cloud.points
    diff = x[:, None, :] - x[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(d, 0.0)
    return d


def linkage_distance(k1: Iterable[int], k2: Iterable[int], base: np.ndarray, linkage: Linkage | str) -> float:
    """Distance between two disjoint clusters of indices into ``base``.

    Ward uses its closed form for Euclidean input, which the Lance-Williams
    recurrence in :func:`agglomerate` reproduces merge by merge.
    """
    k1, k2 = list(k1), list(k2)
    if not k1 or not k2:
        raise ValueError("clusters must be nonempty")
    if set(k1) & set(k2):
        raise ValueError("clusters must be disjoint")
    linkage = Linkage(linkage)
    block = np.asarray(base)[np.ix_(k1, k2)]
    if linkage is Linkage.SINGLE:
        return float(block.min())
    if linkage is Linkage.COMPLETE:
        return float(block.max())
    if linkage is Linkage.AVERAGE:
        return float(block.sum() / (len(k1) * len(k2)))
    # Ward between two clusters equals sqrt(2 n1 n2 / (n1 + n2)) times the
    # centroid distance for Euclidean input; computed here from distances.
    sq = np.asarray(base, dtype=float) ** 2
    n1, n2 = len(k1), len(k2)
    within1 = sq[np.ix_(k1, k1)].sum() / (2 * n1 * n1)
    within2 = sq[np.ix_(k2, k2)].sum() / (2 * n2 * n2)
    cross = sq[np.ix_(k1, k2)].sum() / (n1 * n2)
    centroid_sq = cross - within1 - within2
    return float(np.sqrt(max(0.0, 2.0 * n1 * n2 / (n1 + n2) * centroid_sq)))


def _lance_williams(linkage: Linkage, dki: float, dkj: float, dij: float, ni: int, nj: int, nk: int) -> float:
    if linkage is Linkage.SINGLE:
        return dki if dki < dkj else dkj
    if linkage is Linkage.COMPLETE:
        return dki if dki > dkj else dkj
    if linkage is Linkage.AVERAGE:
        return (ni * dki + nj * dkj) / (ni + nj)
    n = ni + nj + nk
    sq = ((ni + nk) * dki * dki + (nj + nk) * dkj * dkj - nk * dij * dij) / n
    return float(np.sqrt(sq)) if sq > 0 else 0.0


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float
    size: int


def agglomerate(dist: np.ndarray, linkage: Linkage | str = DEFAULT_LINKAGE, sizes: Sequence[int] | None = None) -> list[Merge]:
    """Sequential agglomeration on a precomputed distance matrix.

    Clusters are numbered like scipy: inputs ``0..n-1``, the k-th merge
    creates ``n + k``. The closest pair is merged each step; ties go to the
    lexicographically smallest pair of cluster numbers.
    """
    linkage = Linkage(linkage)
    d = np.array(dist, dtype=float)
    n = d.shape[0]
    ids = list(range(n))
    size = list(sizes) if sizes is not None else [1] * n
    active = list(range(n))  # slots still in play
    merges: list[Merge] = []
    for step in range(n - 1):
        best = None
        for a_pos, a in enumerate(active):
            row = d[a]
            for b in active[a_pos + 1:]:
                key = (row[b],) + tuple(sorted((ids[a], ids[b])))
                if best is None or key < best[0]:
                    best = (key, a, b)
        _, a, b = best
        h = d[a, b]
        na, nb = size[a], size[b]
        for k in active:
            if k in (a, b):
                continue
            v = _lance_williams(linkage, d[k, a], d[k, b], h, na, nb, size[k])
            d[k, a] = d[a, k] = v
        lo, hi = sorted((ids[a], ids[b]))
        merges.append(Merge(lo, hi, float(h), na + nb))
        ids[a] = n + step
        size[a] = na + nb
        active.remove(b)
    return merges


def merges_to_tree(merges: Sequence[Merge], n: int, leaf_heights=None, labels=None) -> MergeTree:
    """Dendrogram from a merge list, contracting zero-length edges.

    Tied successive merges would create edges of zero weight; such edges are
    contracted so the father absorbs the children. A merge below a child
    (possible only through rounding) is lifted to the child height with a
    warning.
    """
    heights = [0.0] * n if leaf_heights is None else [float(h) for h in leaf_heights]
    children: dict[int, list[int]] = {}
    for k, m in enumerate(merges):
        v = n + k
        h = m.height
        top = max(heights[m.left], heights[m.right])
        if h < top:
            warnings.warn(f"non-monotone merge at step {k} lifted from {h} to {top}", RuntimeWarning)
            h = top
        kids = []
        for c in (m.left, m.right):
            if c >= n and heights[c] == h:
                kids.extend(children.pop(c))
            else:
                kids.append(c)
        children[v] = kids
        heights.append(h)
    root = n + len(merges) - 1 if merges else 0
    keep = sorted(set(range(n)) | set(children))
    index = {v: i for i, v in enumerate(keep)}
    edges = tuple((index[c], index[v]) for v in keep for c in children.get(v, []))
    vlabels = None
    if labels is not None:
        vlabels = tuple(labels[v] if v < n else None for v in keep)
    return MergeTree(tuple(heights[v] for v in keep), edges, index[root], vlabels)


def build_dendrogram(cloud: PointCloud, linkage: Linkage | str = DEFAULT_LINKAGE) -> MergeTree:
    """Dendrogram of ``cloud``: leaves at height 0, internal vertices at the
    linkage distance of the clusters they merge.

    Coincident points are merged into one leaf before agglomeration so that
    every edge has positive weight; such a leaf carries the joined labels.
    """
    linkage = Linkage(linkage)
    x = cloud.points
    # group coincident points
    groups: list[list[int]] = []
    seen: dict[bytes, int] = {}
    for i in range(cloud.n):
        key = np.ascontiguousarray(x[i]).tobytes()
        if key in seen:
            groups[seen[key]].append(i)
        else:
            seen[key] = len(groups)
            groups.append([i])
    reps = np.array([x[g[0]] for g in groups])
    sizes = [len(g) for g in groups]
    dist = pairwise_metric(PointCloud(reps))
    # coincident copies still count towards average and ward cluster sizes
    sizes_used = [1] * len(groups) if linkage in (Linkage.SINGLE, Linkage.COMPLETE) else sizes
    if linkage is Linkage.WARD:
        s = np.asarray(sizes, dtype=float)
        dist = dist * np.sqrt(2.0 * np.outer(s, s) / np.add.outer(s, s))
    labels = None
    if cloud.labels is not None:
        labels = ["+".join(cloud.labels[i] for i in g) for g in groups]
    merges = agglomerate(dist, linkage, sizes_used)
    return merges_to_tree(merges, len(groups), labels=labels)


def hausdorff(c1: PointCloud, c2: PointCloud) -> float:
    if c1.dim != c2.dim:
        raise ValueError("clouds have different dimensions")
    diff = c1.points[:, None, :] - c2.points[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
