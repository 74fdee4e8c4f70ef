"""Seeded random merge trees for tests and experiments."""

from __future__ import annotations

import numpy as np

from .trees import MergeTree


def _assemble(children: dict[int, list[int]], heights: dict[int, float], root: int) -> MergeTree:
    ids = sorted(heights)
    index = {v: i for i, v in enumerate(ids)}
    edges = [(index[c], index[v]) for v in ids for c in children.get(v, [])]
    return MergeTree(tuple(heights[v] for v in ids), tuple(edges), index[root])


def random_dendrogram(rng: np.random.Generator, n_leaves: int) -> MergeTree:
    """Binary dendrogram with random merge order and increasing heights."""
    heights = {i: 0.0 for i in range(n_leaves)}
    children: dict[int, list[int]] = {}
    active = list(range(n_leaves))
    h, nxt = 0.0, n_leaves
    while len(active) > 1:
        i, j = sorted(rng.choice(len(active), size=2, replace=False), reverse=True)
        a, b = active.pop(i), active.pop(j)
        h += float(rng.uniform(0.05, 1.0))
        children[nxt] = [b, a]
        heights[nxt] = h
        active.append(nxt)
        nxt += 1
    return _assemble(children, heights, active[0])


def random_merge_tree(
    rng: np.random.Generator,
    max_leaves: int,
    *,
    min_leaves: int = 1,
    heterochronous: bool = True,
    unary_root_prob: float = 0.3,
    max_arity: int = 3,
) -> MergeTree:
    """Merge tree with possibly non-binary vertices and leaves above zero.

    With probability ``unary_root_prob`` an extra root with a single child is
    placed on top, which canonical forms keep.
    """
    n_leaves = int(rng.integers(min_leaves, max_leaves + 1))
    heights: dict[int, float] = {}
    for i in range(n_leaves):
        lifted = heterochronous and rng.random() < 0.5
        heights[i] = float(rng.uniform(0.0, 0.5)) if lifted else 0.0
    children: dict[int, list[int]] = {}
    active = list(range(n_leaves))
    nxt = n_leaves
    while len(active) > 1:
        k = 2
        if len(active) >= 3 and max_arity >= 3 and rng.random() < 0.25:
            k = int(rng.integers(3, min(max_arity, len(active)) + 1))
        pick = sorted((int(x) for x in rng.choice(len(active), size=k, replace=False)), reverse=True)
        kids = [active.pop(i) for i in pick]
        children[nxt] = kids
        heights[nxt] = max(heights[c] for c in kids) + float(rng.uniform(0.05, 1.0))
        active.append(nxt)
        nxt += 1
    root = active[0]
    if rng.random() < unary_root_prob:
        children[nxt] = [root]
        heights[nxt] = heights[root] + float(rng.uniform(0.05, 1.0))
        root = nxt
    return _assemble(children, heights, root)


def insert_order2(t: MergeTree, rng: np.random.Generator, count: int = 1) -> MergeTree:
    """Split ``count`` random edges by inserting a vertex of order 2.

    The weight of each split edge is preserved as the sum of the two halves.
    """
    heights = list(t.heights)
    edges = list(t.edges)
    labels = None if t.labels is None else list(t.labels)
    for _ in range(count):
        if not edges:
            break
        k = int(rng.integers(len(edges)))
        c, f = edges[k]
        lo, hi = heights[c], heights[f]
        mid = lo + (hi - lo) * float(rng.uniform(0.1, 0.9))
        if not lo < mid < hi:
            continue
        v = len(heights)
        heights.append(mid)
        if labels is not None:
            labels.append(None)
        edges[k] = (c, v)
        edges.append((v, f))
    return MergeTree(tuple(heights), tuple(edges), t.root, None if labels is None else tuple(labels))
