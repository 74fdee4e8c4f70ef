"""Edit distance, pruned edit distance and height rescaling."""

from __future__ import annotations

import math
from typing import Sequence

from ..errors import BudgetExceededError
from ..trees import CanonicalForm, MergeTree, canonicalize, scale_heights, signature, total_weight
from . import _search
from .measures import PruningMeasure
from .pruning import prune, pruning_sequence

DEFAULT_BUDGET_LEAVES = 25
RESCALE_MODES = ("population", "per-tree", "none")


def _check_budget(c: CanonicalForm, budget_leaves: int, which: int) -> None:
    if c.n_leaves > budget_leaves:
        raise BudgetExceededError(
            f"tree {which} has {c.n_leaves} leaves, above the search budget of {budget_leaves}"
        )


def _canonical_distance(c1: CanonicalForm, c2: CanonicalForm) -> float:
    if c1 == c2:
        return 0.0
    if c1.n_vertices == 1:
        return total_weight(c2)
    if c2.n_vertices == 1:
        return total_weight(c1)
    s1, s2 = signature(c1, "weights"), signature(c2, "weights")
    if s1 == s2:
        return 0.0
    # fixed argument order makes the float sums, hence the result, exactly symmetric
    if (c2.n_vertices, s2) < (c1.n_vertices, s1):
        c1, c2 = c2, c1
    return _search.distance(_search.prepare(c1), _search.prepare(c2))


def edit_distance(t1: MergeTree, t2: MergeTree, budget_leaves: int = DEFAULT_BUDGET_LEAVES) -> float:
    """Exact minimal cost of shrink, delete and insert edits turning the
    weighted shape of ``t1`` into that of ``t2``; ghosting is free.

    Raises :class:`BudgetExceededError` when either tree has more than
    ``budget_leaves`` leaves.
    """
    c1, c2 = canonicalize(t1), canonicalize(t2)
    _check_budget(c1, budget_leaves, 1)
    _check_budget(c2, budget_leaves, 2)
    return _canonical_distance(c1, c2)


def pruned_distance(
    t1: MergeTree, t2: MergeTree, mu: PruningMeasure, budget_leaves: int = DEFAULT_BUDGET_LEAVES
) -> float:
    """Integral of the edit distance between pruned trees against ``mu``.

    Pruned trees only change at finitely many thresholds, so the integral is
    an exact finite sum of distances times interval masses.
    """
    c1, c2 = canonicalize(t1), canonicalize(t2)
    _check_budget(c1, budget_leaves, 1)
    _check_budget(c2, budget_leaves, 2)
    seq1, seq2 = pruning_sequence(c1), pruning_sequence(c2)
    starts = sorted({s for s, _ in seq1} | {s for s, _ in seq2})
    terms = []
    i1 = i2 = 0
    for k, lo in enumerate(starts):
        while i1 + 1 < len(seq1) and seq1[i1 + 1][0] <= lo:
            i1 += 1
        while i2 + 1 < len(seq2) and seq2[i2 + 1][0] <= lo:
            i2 += 1
        hi = starts[k + 1] if k + 1 < len(starts) else math.inf
        m = mu.mass(lo, hi)
        if m > 0.0:
            d = _canonical_distance(seq1[i1][1], seq2[i2][1])
            if d:
                terms.append(d * m)
    return math.fsum(terms)


def quadrature_distance(
    t1: MergeTree, t2: MergeTree, mu: PruningMeasure, n_points: int, budget_leaves: int = DEFAULT_BUDGET_LEAVES
) -> float:
    """Approximation of :func:`pruned_distance` on an ``n_points``
    discretization of ``mu``, pruning directly at each point."""
    c1, c2 = canonicalize(t1), canonicalize(t2)
    _check_budget(c1, budget_leaves, 1)
    _check_budget(c2, budget_leaves, 2)
    points, masses = mu.discretize(n_points)
    cache: dict[tuple[CanonicalForm, CanonicalForm], float] = {}
    terms = []
    for eps, m in zip(points, masses):
        p1, p2 = prune(c1, float(eps)), prune(c2, float(eps))
        key = (p1, p2)
        if key not in cache:
            cache[key] = _canonical_distance(p1, p2)
        terms.append(cache[key] * float(m))
    return math.fsum(terms)


def rescale(trees: Sequence[MergeTree], mode: str = "population") -> list[MergeTree]:
    """Divide heights so the population (or each tree) tops out at 1."""
    if mode not in RESCALE_MODES:
        raise ValueError(f"rescale mode must be one of {RESCALE_MODES}, got {mode!r}")
    if mode == "none":
        return list(trees)
    if mode == "population":
        top = max(max(t.heights) for t in trees)
        return [scale_heights(t, top) if top > 0 else t for t in trees]
    return [scale_heights(t, max(t.heights)) if max(t.heights) > 0 else t for t in trees]
