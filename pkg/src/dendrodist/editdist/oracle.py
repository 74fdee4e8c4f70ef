"""Brute-force edit distance for very small trees.

Enumerates every choice of edges to keep in each tree. Deleted edges are
contracted at a cost equal to their weight, kept edges are ghosted into
chains, and the two reduced trees are matched by trying every child
permutation. Independent of the search in ``_search``.
"""

from __future__ import annotations

import itertools
import math

from ..errors import BudgetExceededError
from ..trees import MergeTree, canonicalize

ORACLE_MAX_LEAVES = 5


def _reduce(parent, weight, root, kept):
    """Children lists of the tree left after contracting non-kept edges."""
    keep = set(kept) | {root}
    kids = {v: [] for v in keep}
    for v in keep:
        if v == root:
            continue
        p = parent[v]
        while p not in keep:
            p = parent[p]
        kids[p].append(v)

    reduced = {}

    def chain_end(v):
        w = weight[v]
        while len(kids[v]) == 1:
            v = kids[v][0]
            w += weight[v]
        return v, w

    stack = [root]
    while stack:
        v = stack.pop()
        reduced[v] = [chain_end(c) for c in kids[v]]
        stack.extend(b for b, _ in reduced[v])
    return reduced


def _match_cost(r1, u1, r2, u2) -> float:
    k1, k2 = r1[u1], r2[u2]
    if len(k1) != len(k2):
        return math.inf
    best = math.inf
    for perm in itertools.permutations(range(len(k2))):
        s = 0.0
        for (a, wa), j in zip(k1, perm):
            b, wb = k2[j]
            s += abs(wa - wb)
            if s >= best:
                break
            s += _match_cost(r1, a, r2, b)
            if s >= best:
                break
        if s < best:
            best = s
    return best


def _all_reductions(t: MergeTree):
    parent = t.parents
    weight = [t.weight(v) for v in range(t.n_vertices)]
    others = [v for v in range(t.n_vertices) if v != t.root]
    out = []
    for r in range(len(others) + 1):
        for kept in itertools.combinations(others, r):
            deleted = sum(weight[v] for v in others if v not in kept)
            out.append((deleted, _reduce(parent, weight, t.root, kept)))
    out.sort(key=lambda x: x[0])
    return out


def edit_distance_oracle(t1: MergeTree, t2: MergeTree, max_leaves: int = ORACLE_MAX_LEAVES) -> float:
    """Exact edit distance by exhaustive enumeration (at most 5 leaves each)."""
    c1, c2 = canonicalize(t1), canonicalize(t2)
    for i, c in enumerate((c1, c2)):
        if c.n_leaves > max_leaves:
            raise BudgetExceededError(f"oracle supports at most {max_leaves} leaves, tree {i + 1} has {c.n_leaves}")
    red2 = _all_reductions(c2)
    best = math.inf
    for d1, r1 in _all_reductions(c1):
        if d1 >= best:
            break
        for d2, r2 in red2:
            if d1 + d2 >= best:
                break
            val = d1 + d2 + _match_cost(r1, c1.root, r2, c2.root)
            if val < best:
                best = val
    return best
