"""The pruning operator and its breakpoints in the threshold."""

from __future__ import annotations

import math
from functools import lru_cache

from ..trees import CanonicalForm, MergeTree, canonicalize


def _prune_canonical(c: CanonicalForm, eps: float) -> CanonicalForm:
    h = c.heights
    root = c.root
    parent = list(c.parents)
    kids = [set(ch) for ch in c.children]
    alive = [True] * c.n_vertices
    while True:
        groups: dict[int, list[int]] = {}
        for v in range(c.n_vertices):
            if alive[v] and v != root and not kids[v]:
                p = parent[v]
                if h[p] - h[v] <= eps:
                    groups.setdefault(p, []).append(v)
        if not groups:
            break
        for p, cands in groups.items():
            if len(cands) > 1:
                keep = max(cands, key=lambda v: (h[p] - h[v], -v))
                doomed = [v for v in cands if v != keep]
            else:
                doomed = cands
            for v in doomed:
                kids[p].discard(v)
                alive[v] = False
        for p in groups:
            if p != root and len(kids[p]) == 1:
                (child,) = kids[p]
                g = parent[p]
                kids[g].discard(p)
                kids[g].add(child)
                parent[child] = g
                alive[p] = False
    if all(alive):
        return c
    ids = [v for v in range(c.n_vertices) if alive[v]]
    index = {v: i for i, v in enumerate(ids)}
    edges = tuple((index[v], index[parent[v]]) for v in ids if v != root)
    labels = None if c.labels is None else tuple(c.labels[v] for v in ids)
    return canonicalize(MergeTree(tuple(h[v] for v in ids), edges, index[root], labels))


def prune(t: MergeTree, eps: float) -> CanonicalForm:
    """Remove leaves whose father edge weighs at most ``eps``, recursively.

    In each round every leaf with weight ``<= eps`` is a candidate. Among
    candidates sharing a father only the heaviest survives (lowest id on
    ties); a lone candidate is removed. Fathers left with a single child are
    ghosted, except the root. Rounds repeat until no candidate remains.
    """
    if not eps >= 0.0:
        raise ValueError(f"pruning threshold must be non-negative, got {eps}")
    return _prune_canonical(canonicalize(t), float(eps))


def critical_values(t: MergeTree) -> list[float]:
    """Thresholds at which pruning of ``t`` may change.

    Surviving leaves are always original leaves and their fathers original
    ancestors, so every weight ever compared to the threshold is a height
    difference between a leaf and one of its ancestors.
    """
    c = canonicalize(t)
    h, par = c.heights, c.parents
    out = set()
    for leaf in c.leaves:
        v = par[leaf]
        while v >= 0:
            out.add(h[v] - h[leaf])
            v = par[v]
    return sorted(out)


@lru_cache(maxsize=4096)
def _sequence(c: CanonicalForm) -> tuple[tuple[float, CanonicalForm], ...]:
    seq = [(0.0, c)]
    for eps in critical_values(c):
        p = _prune_canonical(c, eps)
        if p != seq[-1][1]:
            seq.append((eps, p))
    return tuple(seq)


def pruning_sequence(t: MergeTree) -> tuple[tuple[float, CanonicalForm], ...]:
    """Pairs ``(start, tree)``: the pruned tree is ``tree`` from ``start`` up
    to the next start (or forever for the last pair)."""
    return _sequence(canonicalize(t))


def breakpoints(t1: MergeTree, t2: MergeTree) -> list[float]:
    """Increasing thresholds ``0 = e0 < e1 < ...`` such that both pruned trees
    are constant on every ``[e_k, e_k+1)``."""
    starts = {s for s, _ in pruning_sequence(t1)} | {s for s, _ in pruning_sequence(t2)}
    return sorted(starts)


def prune_at(seq, eps: float) -> CanonicalForm:
    """Look up the pruned tree for ``eps`` in a pruning sequence."""
    lo, hi = 0, len(seq) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if seq[mid][0] <= eps:
            lo = mid
        else:
            hi = mid - 1
    return seq[lo][1]


def full_prune_threshold(t: MergeTree) -> float:
    """Smallest threshold at which the tree is pruned to a single vertex."""
    seq = pruning_sequence(t)
    return seq[-1][0] if seq[-1][1].n_vertices == 1 else math.inf
