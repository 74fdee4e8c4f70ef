import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dendrodist.errors import InvalidTreeError, TreeParseError
from dendrodist.generators import insert_order2, random_dendrogram, random_merge_tree
from dendrodist.trees import (
    CanonicalForm,
    MergeTree,
    canonicalize,
    isomorphic,
    leaf_chain_weights,
    parse,
    serialize,
    to_newick,
    total_weight,
    validate,
)

seeds = st.integers(0, 2**32 - 1)


def tree_from_seed(seed, max_leaves=8):
    return random_merge_tree(np.random.default_rng(seed), max_leaves)


def cherry(h=1.0):
    return MergeTree((0.0, 0.0, h), ((0, 2), (1, 2)), 2)


# ---------------------------------------------------------------- validate


def test_single_vertex_is_valid():
    assert validate(MergeTree.single_vertex()).ok


def test_minimal_dendrogram_is_valid():
    t = cherry()
    assert validate(t).ok
    assert t.is_dendrogram


def test_zero_weight_edge_reported():
    t = MergeTree((0.0, 0.0, 0.0), ((0, 2), (1, 2)), 2)
    kinds = [v.kind for v in validate(t).violations]
    assert kinds == ["non-positive weight", "non-positive weight"]


def test_every_violation_reported():
    # 0->1->0 cycle, 2 with two fathers, 3 higher than its father
    t = MergeTree((0.0, 1.0, 0.5, 3.0, 2.0), ((0, 1), (1, 0), (2, 4), (2, 3), (3, 4)), 4)
    kinds = {v.kind for v in validate(t).violations}
    assert {"cycle", "multiple fathers", "non-monotone heights"} <= kinds


def test_disconnected_vertex_reported():
    t = MergeTree((0.0, 0.0, 1.0), ((0, 2),), 2)
    report = validate(t)
    assert [v.kind for v in report.violations] == ["disconnected"]
    assert report.violations[0].ids == (1,)


def test_min_weight_is_configurable():
    t = cherry(0.5)
    assert validate(t, min_weight=0.4).ok
    assert not validate(t, min_weight=0.5).ok


# ---------------------------------------------------------------- canonical forms


def test_canonicalize_without_order2_keeps_tree():
    t = cherry(2.0)
    c = canonicalize(t)
    assert isinstance(c, CanonicalForm)
    assert isomorphic(c, t)


def test_chain_collapses_to_summed_edge():
    # root at 3, a at 2 (order 2), leaf b at 0: weights 1 then 2
    t = MergeTree((3.0, 2.0, 0.0), ((1, 0), (2, 1)), 0)
    c = canonicalize(t)
    assert c.n_vertices == 2
    assert c.weight(0) == 3.0


def test_root_of_order_one_is_kept():
    t = MergeTree((0.0, 0.0, 1.0, 2.5), ((0, 2), (1, 2), (2, 3)), 3)
    c = canonicalize(t)
    assert c.n_vertices == 4
    assert len(c.children[c.root]) == 1


def test_injected_splits_are_removed():
    rng = np.random.default_rng(7)
    t = random_dendrogram(rng, 5)
    t_plus = insert_order2(t, rng, 3)
    assert t_plus.n_vertices == t.n_vertices + 3
    assert canonicalize(t_plus) == canonicalize(t)


def test_canonical_layout_is_postorder():
    c = canonicalize(tree_from_seed(3, 10))
    assert c.root == c.n_vertices - 1
    for v in range(c.n_vertices):
        lo = v - c.sizes[v] + 1
        for child in c.children[v]:
            assert lo <= child < v


def test_canonicalize_rejects_invalid():
    with pytest.raises(InvalidTreeError):
        canonicalize(MergeTree((0.0, 0.0), ((0, 1),), 1))


@given(seeds)
def test_canonicalize_idempotent(seed):
    t = insert_order2(tree_from_seed(seed), np.random.default_rng(seed), 2)
    c = canonicalize(t)
    assert canonicalize(MergeTree(c.heights, c.edges, c.root)) == c


@given(seeds)
def test_no_order2_vertices_remain(seed):
    t = insert_order2(tree_from_seed(seed), np.random.default_rng(seed), 3)
    c = canonicalize(t)
    assert all(len(c.children[v]) != 1 for v in range(c.n_vertices) if v != c.root)


# ---------------------------------------------------------------- weights


def test_total_weight_examples():
    assert total_weight(MergeTree.single_vertex()) == 0.0
    assert total_weight(cherry(1.7)) == 3.4


@given(seeds, st.integers(0, 5))
def test_total_weight_preserved_exactly(seed, k):
    t = insert_order2(tree_from_seed(seed), np.random.default_rng(seed + 1), k)
    assert total_weight(canonicalize(t)) == total_weight(t)


@given(seeds)
def test_total_weight_matches_edge_sum(seed):
    t = tree_from_seed(seed)
    direct = math.fsum(t.weight(v) for v in range(t.n_vertices))
    assert total_weight(t) == pytest.approx(direct, abs=1e-12)


@given(seeds, st.integers(2, 15))
def test_dendrogram_isochrony(seed, n):
    t = random_dendrogram(np.random.default_rng(seed), n)
    chains = leaf_chain_weights(t)
    assert max(chains) - min(chains) <= 1e-9
    # the same quantity by summing weights edge by edge
    sums = []
    for leaf in t.leaves:
        s, v = 0.0, leaf
        while t.parents[v] >= 0:
            s += t.weight(v)
            v = t.parents[v]
        sums.append(s)
    assert max(sums) - min(sums) <= 1e-9


# ---------------------------------------------------------------- isomorphism


def test_isomorphism_ignores_child_order_and_ids():
    a = MergeTree((0.0, 0.0, 0.0, 1.0, 2.0), ((0, 3), (1, 3), (3, 4), (2, 4)), 4)
    b = MergeTree((2.0, 0.0, 1.0, 0.0, 0.0), ((1, 0), (2, 0), (3, 2), (4, 2)), 0)
    assert isomorphic(a, b)
    assert not isomorphic(a, cherry(2.0))


def test_isomorphism_is_an_equivalence():
    rng = np.random.default_rng(0)
    trees = []
    for _ in range(100):
        trees.append(random_merge_tree(rng, 3, heterochronous=False, unary_root_prob=0.0))
    # add relabelled copies so that some pairs are isomorphic
    for t in list(trees[:30]):
        perm = rng.permutation(t.n_vertices)
        inv = {int(old): i for i, old in enumerate(perm)}
        heights = tuple(t.heights[int(old)] for old in perm)
        edges = tuple((inv[c], inv[f]) for c, f in t.edges)
        trees.append(MergeTree(heights, edges, inv[t.root]))
    rel = [[isomorphic(a, b) for b in trees] for a in trees]
    n = len(trees)
    for i in range(n):
        assert rel[i][i]
        for j in range(n):
            assert rel[i][j] == rel[j][i]
    for i in range(n):
        for j in range(n):
            if rel[i][j]:
                assert rel[j] == rel[i]
    assert sum(map(sum, rel)) > n


# ---------------------------------------------------------------- text formats


def test_roundtrip_single_vertex():
    t = MergeTree.single_vertex(0.25)
    assert isomorphic(parse(serialize(t)), t)


def test_roundtrip_twenty_leaves():
    t = random_dendrogram(np.random.default_rng(20), 20)
    back = parse(serialize(t))
    assert isomorphic(back, t)
    assert back == t


@given(seeds)
def test_roundtrip_random(seed):
    t = tree_from_seed(seed)
    assert isomorphic(parse(serialize(t)), t)


def test_parse_sparse_ids_and_labels():
    text = '{"vertices": [{"id": 10, "height": 0, "label": "a"}, {"id": 7, "height": 2.5}], "edges": [[10, 7]], "root": 7}'
    t = parse(text)
    assert t.heights == (0.0, 2.5)
    assert t.root == 1
    assert t.labels == ("a", None)


def test_parse_missing_father_points_at_edge():
    text = serialize(cherry()).replace("[1, 2]", "[1, 9]")
    with pytest.raises(TreeParseError) as err:
        parse(text)
    assert "missing vertex 9" in str(err.value)
    line = text.splitlines()[err.value.line - 1]
    assert line[err.value.column - 1:].startswith("[1, 9]")


def test_parse_syntax_error_has_location():
    with pytest.raises(TreeParseError) as err:
        parse('{\n  "root": 0,\n  "vertices": [}\n')
    assert (err.value.line, err.value.column) == (3, 16)


def test_newick_export():
    t = MergeTree((0.0, 0.0, 1.0, 0.0, 3.0), ((0, 2), (1, 2), (2, 4), (3, 4)), 4, ("a", "b", None, "c", None))
    assert to_newick(t) == "((a:1.0,b:1.0):2.0,c:3.0);"
    assert to_newick(MergeTree.single_vertex()) == "v0;"
