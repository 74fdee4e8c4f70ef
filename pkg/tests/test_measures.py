import math

import numpy as np
import pytest
from hypothesis import example, given, strategies as st
from scipy import integrate, stats

from dendrodist.errors import InvalidMeasureError
from dendrodist.editdist import (
    beta_measure,
    critical_values,
    edit_distance,
    measure_from_options,
    point_mass_at_zero,
    point_masses,
    prune,
    pruned_distance,
    quadrature_distance,
    rescale,
    uniform_grid,
)
from dendrodist.generators import random_merge_tree
from dendrodist.trees import MergeTree

seeds = st.integers(0, 2**32 - 1)


def edge(w):
    return MergeTree((0.0, w), ((0, 1),), 1)


def rescaled_pair(seed, max_leaves=7):
    rng = np.random.default_rng(seed)
    return tuple(rescale([random_merge_tree(rng, max_leaves), random_merge_tree(rng, max_leaves)]))


# ---------------------------------------------------------------- measures


def test_beta_mode_and_mean():
    mu = beta_measure(2.5, 15)
    assert mu.mode == pytest.approx(1.5 / 15.5)
    assert mu.mean == pytest.approx(2.5 / 17.5)


def test_beta_one_one_is_uniform():
    mu = beta_measure(1, 1)
    for m in (0.1, 0.5, 0.9):
        assert mu.cdf(m) == pytest.approx(m)


@pytest.mark.parametrize("ab", [(2, 8), (2.5, 15), (0.5, 0.5)])
def test_beta_interval_mass_matches_numerical_integration(ab):
    mu = beta_measure(*ab)
    for lo, hi in [(0.0, 0.1), (0.2, 0.7), (0.9, 1.0), (0.55, 0.6)]:
        want, _ = integrate.quad(lambda x: stats.beta.pdf(x, *ab), lo, hi)
        assert mu.mass(lo, hi) == pytest.approx(want, abs=1e-8)
    assert mu.mass(0.0, math.inf) == pytest.approx(1.0)
    assert mu.mass(0.4, 0.4) == 0.0


def test_bad_parameters_rejected():
    for ab in [(0, 1), (-1, 2), (1, math.inf)]:
        with pytest.raises(InvalidMeasureError):
            beta_measure(*ab)
    with pytest.raises(InvalidMeasureError):
        point_masses([(1.5, 1.0)])
    with pytest.raises(InvalidMeasureError):
        point_masses([(0.5, 0.0)])
    with pytest.raises(InvalidMeasureError):
        uniform_grid(0)
    with pytest.raises(InvalidMeasureError):
        measure_from_options("gamma")


def test_uniform_grid_atoms():
    mu = uniform_grid(4)
    assert mu.atoms() == ((0.0, 0.25), (0.25, 0.25), (0.5, 0.25), (0.75, 0.25))
    assert mu.total_mass == 1.0
    assert mu.mass(0.0, 0.5) == 0.5
    assert mu.positive_near_zero


def test_positive_near_zero():
    assert beta_measure(2, 8).positive_near_zero
    assert not point_masses([(0.1, 1.0)]).positive_near_zero


def test_discretization_has_unit_mass():
    pts, ms = beta_measure(2, 8).discretize(100)
    assert math.fsum(ms) == pytest.approx(1.0)
    assert np.all(np.diff(pts) > 0)
    with pytest.raises(ValueError):
        beta_measure(2, 8).discretize(0)


# ---------------------------------------------------------------- pruned distance


def test_point_mass_at_zero_gives_edit_distance_on_edges():
    assert pruned_distance(edge(0.2), edge(0.6), point_mass_at_zero()) == pytest.approx(0.4)


@given(seeds)
def test_point_mass_at_zero_gives_edit_distance(seed):
    a, b = rescaled_pair(seed)
    assert pruned_distance(a, b, point_mass_at_zero()) == pytest.approx(edit_distance(a, b), abs=1e-12)


def test_edges_closed_form():
    # both edges survive below 0.2, then only the longer one until 0.6
    mu = beta_measure(2, 8)
    want = 0.4 * mu.mass(0.0, 0.2) + 0.6 * mu.mass(0.2, 0.6)
    assert pruned_distance(edge(0.2), edge(0.6), mu) == pytest.approx(want, rel=1e-12)


@given(seeds, st.floats(0.0, 1.0))
def test_single_atom_is_distance_of_pruned_trees(seed, p):
    a, b = rescaled_pair(seed)
    d = pruned_distance(a, b, point_masses([(p, 1.0)]))
    assert d == pytest.approx(edit_distance(prune(a, p), prune(b, p)), abs=1e-12)


@given(seeds)
def test_atoms_combine_linearly(seed):
    a, b = rescaled_pair(seed)
    mu = point_masses([(0.0, 0.5), (0.3, 0.25), (0.8, 0.25)])
    want = sum(m * edit_distance(prune(a, p), prune(b, p)) for p, m in mu.atoms())
    assert pruned_distance(a, b, mu) == pytest.approx(want, abs=1e-12)


@given(seeds)
def test_pruned_distance_never_exceeds_edit_distance_bound(seed):
    # the integrand is bounded by the unpruned total weights
    from dendrodist.trees import total_weight

    a, b = rescaled_pair(seed)
    assert pruned_distance(a, b, beta_measure(2, 8)) <= total_weight(a) + total_weight(b) + 1e-12


def monte_carlo(a, b, mu, n, seed):
    """Sample thresholds, prune directly, average the edit distances.

    Pruned trees only change at critical values, so samples are bucketed by
    the interval they fall in and one representative per bucket is pruned.
    """
    eps = mu.sample(np.random.default_rng(seed), n)
    cuts = np.array(sorted(set(critical_values(a)) | set(critical_values(b))))
    bucket = np.searchsorted(cuts, eps, side="right")
    vals = np.empty(n)
    for k in np.unique(bucket):
        sel = bucket == k
        e = float(eps[sel][0])
        vals[sel] = edit_distance(prune(a, e), prune(b, e))
    return vals.mean(), vals.std(ddof=1) / math.sqrt(n)


def test_edges_against_monte_carlo():
    mu = beta_measure(2, 8)
    est, se = monte_carlo(edge(0.2), edge(0.6), mu, 100_000, 0)
    assert abs(pruned_distance(edge(0.2), edge(0.6), mu) - est) <= 3 * se


@pytest.mark.parametrize("seed", range(5))
def test_random_pairs_against_monte_carlo(seed):
    a, b = rescaled_pair(seed)
    mu = beta_measure(2, 8)
    est, se = monte_carlo(a, b, mu, 20_000, seed)
    assert abs(pruned_distance(a, b, mu) - est) <= 3 * se + 1e-12


@given(seeds)
@example(16777216)
def test_pruned_metric_axioms(seed):
    rng = np.random.default_rng(seed)
    a, b, c = rescale([random_merge_tree(rng, 6) for _ in range(3)])
    mu = beta_measure(2.5, 15)
    dab, dbc, dac = pruned_distance(a, b, mu), pruned_distance(b, c, mu), pruned_distance(a, c, mu)
    assert pruned_distance(a, a, mu) == 0.0
    assert dab == pruned_distance(b, a, mu)
    assert dac <= dab + dbc + 1e-9


# ---------------------------------------------------------------- quadrature


def test_one_point_at_zero_is_edit_distance():
    a, b = rescaled_pair(4)
    assert quadrature_distance(a, b, point_mass_at_zero(), 1) == pytest.approx(edit_distance(a, b), abs=1e-12)


def test_quadrature_exact_on_discrete_measures():
    a, b = rescaled_pair(5)
    mu = uniform_grid(16)
    assert quadrature_distance(a, b, mu, 16) == pytest.approx(pruned_distance(a, b, mu), abs=1e-12)


def test_quadrature_converges():
    a, b = rescaled_pair(6)
    mu = beta_measure(2, 8)
    exact = pruned_distance(a, b, mu)
    assert abs(quadrature_distance(a, b, mu, 2048) - exact) < 2e-3 * max(1.0, exact)


def test_robust_to_parameter_perturbation():
    a, b = rescaled_pair(7)
    d1 = pruned_distance(a, b, beta_measure(2.5, 15))
    d2 = pruned_distance(a, b, beta_measure(2.500001, 15))
    assert d2 == pytest.approx(d1, rel=1e-3)
