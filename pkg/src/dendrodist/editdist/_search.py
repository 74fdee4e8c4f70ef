"""Exact edit distance between canonical merge trees.

Formulation
-----------
Vertices are in post-order, so the subtree of ``v`` is the id range
``first[v]..v``. For a vertex ``v`` let ``below[v]`` be the weight strictly
under ``v`` and ``total[v] = w(v) + below[v]`` the weight of its father edge
plus everything under it.

An optimal edit path keeps some edges of each tree, ghosts the kept parts
into chains, and matches the chains so that ancestry is preserved. Writing

    cost(x, y) = below[x] + below[y] - best(children(x), children(y))

for the cheapest way to turn the forest under ``x`` into the forest under
``y``, ``best(A, B)`` is the largest total *gain* of a set of matched
subtree pairs ``(s, s')`` with ``s`` ranging over an antichain of the forest
``A`` and ``s'`` over an antichain of ``B``. Matching ``s`` to ``s'`` keeps a
chain from the father of ``s`` down to some ``c`` under ``s`` (and likewise
``c'``), deletes whatever hangs off the chains, and recurses at the chain
bottoms:

    top(s, s') = min over c, c' of  |len(c) - len'(c')| + side(c) + side'(c')
                                    + cost(c, c')
    gain(s, s') = total[s] + total[s'] - top(s, s')

The distance is ``cost(root, root')``.

``best(A, B)`` is a maximum-weight antichain matching, solved by branch and
bound with forests encoded as bitmasks of their roots. The upper bound is the
smaller of two relaxations that drop the antichain constraint on one side,
each evaluated by a tree recursion over precomputed subtree maxima. The memo
is fail-soft: entries store either an exact value or an upper bound valid for
the threshold that produced it.
"""

from __future__ import annotations

import math
from functools import lru_cache

from ..trees import CanonicalForm


class Prepared:
    """Flat arrays of a canonical tree used by the search."""

    __slots__ = ("n", "parent", "height", "children", "child_mask", "first", "below", "total")

    def __init__(self, t: CanonicalForm):
        n = t.n_vertices
        self.n = n
        self.parent = list(t.parents)
        self.height = list(t.heights)
        self.children = [list(c) for c in t.children]
        self.child_mask = [sum(1 << c for c in kids) for kids in self.children]
        sizes = t.sizes
        self.first = [v - sizes[v] + 1 for v in range(n)]
        below = [0.0] * n
        total = [0.0] * n
        for v in range(n):
            s = 0.0
            for c in self.children[v]:
                s += total[c]
            below[v] = s
            p = self.parent[v]
            total[v] = s + (self.height[p] - self.height[v] if p >= 0 else 0.0)
        self.below = below
        self.total = total


@lru_cache(maxsize=8192)
def prepare(t: CanonicalForm) -> Prepared:
    return Prepared(t)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _remove_path(parent, child_mask, forest: int, v: int) -> int:
    """Forest left after matching ``v``: drop the path from its forest root."""
    out = forest
    while not (forest >> v) & 1:
        p = parent[v]
        out |= child_mask[p] & ~(1 << v)
        v = p
    return out & ~(1 << v)


def _one_sided(t: Prepared, table, roots: list[int], others: list[int]) -> float:
    """Relaxed matching value with the antichain constraint kept on one side.

    ``table[v][b]`` is the largest gain of ``v`` against any vertex under
    ``b`` in the other tree.
    """
    h = {}
    tot = 0.0
    children = t.children
    for a in roots:
        for v in range(t.first[a], a + 1):
            row = table[v]
            m = 0.0
            for b in others:
                x = row[b]
                if x > m:
                    m = x
            s = 0.0
            for c in children[v]:
                s += h[c]
            h[v] = m if m > s else s
        tot += h[a]
    return tot


def distance(t1: Prepared, t2: Prepared, stats: dict | None = None) -> float:
    n1, n2 = t1.n, t2.n
    cost = [[0.0] * n2 for _ in range(n1)]
    gain = [[0.0] * n2 for _ in range(n1)]
    up1 = [[0.0] * n2 for _ in range(n1)]  # up1[v][b]: max gain[v][s'] over s' under b
    up2 = [[0.0] * n1 for _ in range(n2)]  # up2[s'][a]: max gain[v][s'] over v under a
    first1, first2 = t1.first, t2.first
    total1 = t1.total
    par2, mask2 = t2.parent, t2.child_mask
    memo: dict[tuple[int, int], tuple[float, bool]] = {}
    states = 0

    def best(A: int, B: int, floor: float) -> float:
        # Exact value if it exceeds ``floor``, otherwise some value <= floor
        # that is an upper bound of the exact one.
        nonlocal states
        if not A or not B:
            return 0.0
        key = (A, B)
        hit = memo.get(key)
        if hit is not None:
            val, exact = hit
            if exact or val <= floor:
                return val
        states += 1
        al, bl = _bits(A), _bits(B)
        bound = _one_sided(t1, up1, al, bl)
        if bound > floor:
            other = _one_sided(t2, up2, bl, al)
            if other < bound:
                bound = other
        if bound <= floor:
            memo[key] = (bound, False)
            return bound
        a = max(al, key=total1.__getitem__)
        rest = A & ~(1 << a)
        options = [(0.0, rest | t1.child_mask[a], B)]
        row = gain[a]
        for b in bl:
            for s in range(first2[b], b + 1):
                g = row[s]
                if g > 0.0:
                    options.append((g, rest, _remove_path(par2, mask2, B, s)))
        options.sort(key=lambda o: -o[0])
        found = -math.inf
        for g, A2, B2 in options:
            thr = floor if floor > found else found
            val = g + best(A2, B2, thr - g)
            if val > found:
                found = val
        memo[key] = (found, found > floor)
        return found

    def incumbent(al: list[int], bl: list[int]) -> float:
        # greedy disjoint matching of top-level pairs
        pairs = sorted(((gain[a][b], a, b) for a in al for b in bl), reverse=True)
        used_a, used_b, val = set(), set(), 0.0
        for g, a, b in pairs:
            if g <= 0.0:
                break
            if a not in used_a and b not in used_b:
                used_a.add(a)
                used_b.add(b)
                val += g
        return val

    h1, h2 = t1.height, t2.height
    below1, below2 = t1.below, t2.below
    for x in range(n1):
        A = t1.child_mask[x]
        cost_x = cost[x]
        for y in range(n2):
            B = mask2[y]
            if A and B:
                al, bl = _bits(A), _bits(B)
                lo = incumbent(al, bl)
                val = best(A, B, lo)
                matched = val if val > lo else lo
            else:
                matched = 0.0
            c = below1[x] + below2[y] - matched
            cost_x[y] = c if c > 0.0 else 0.0
            p1, p2 = t1.parent[x], par2[y]
            if p1 < 0 or p2 < 0:
                continue
            # best chain bottoms for matching the father edge of x with that of y
            fp1, fp2 = h1[p1], h2[p2]
            top = math.inf
            for c1 in range(first1[x], x + 1):
                len1 = fp1 - h1[c1]
                side1 = below1[x] - below1[c1] - (h1[x] - h1[c1])
                row = cost[c1]
                for c2 in range(first2[y], y + 1):
                    val = (
                        abs(len1 - (fp2 - h2[c2]))
                        + side1
                        + (below2[y] - below2[c2] - (h2[y] - h2[c2]))
                        + row[c2]
                    )
                    if val < top:
                        top = val
            g = total1[x] + t2.total[y] - top
            gain[x][y] = g
            m = g
            for c2 in t2.children[y]:
                if up1[x][c2] > m:
                    m = up1[x][c2]
            up1[x][y] = m
            m = g
            for c1 in t1.children[x]:
                if up2[y][c1] > m:
                    m = up2[y][c1]
            up2[y][x] = m
    if stats is not None:
        stats["states"] = stats.get("states", 0) + states
    return cost[n1 - 1][n2 - 1]
