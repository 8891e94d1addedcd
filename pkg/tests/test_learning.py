import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptivecrowd._random import make_rng
from adaptivecrowd.exceptions import InvariantViolation
from adaptivecrowd.learning import degroot, degroot_two_stage, solo_beliefs
from adaptivecrowd.network import build_matrix, init_random

RING = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])


def nested_average_oracle(weights, signals):
    """Each agent averages its neighbours' own neighbourhood averages.

    Works from raw integer weights with explicit loops; no matrix products.
    """
    n = len(signals)
    first = []
    for i in range(n):
        total = sum(weights[i][j] for j in range(n))
        first.append(sum(weights[i][j] * signals[j] for j in range(n)) / total)
    out = []
    for i in range(n):
        total = sum(weights[i][j] for j in range(n))
        out.append(sum(weights[i][j] * first[j] for j in range(n)) / total)
    return out


def test_identity_matrix():
    s = np.array([0.1, 0.7, 0.3])
    np.testing.assert_array_equal(degroot_two_stage(np.eye(3), s), s)


def test_complete_uniform_consensus():
    s = np.array([0.1, 0.7, 0.3, 0.9])
    p = degroot_two_stage(np.full((4, 4), 0.25), s)
    np.testing.assert_allclose(p, s.mean(), rtol=0, atol=1e-15)


def test_ring_hand_values():
    s = np.array([0.0, 0.6, 0.9])
    np.testing.assert_allclose(degroot(RING, s, stages=1), [0.3, 0.75, 0.45], atol=1e-15)
    np.testing.assert_allclose(degroot_two_stage(RING, s), [0.525, 0.6, 0.375], atol=1e-15)
    w = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    np.testing.assert_allclose(nested_average_oracle(w, s), [0.525, 0.6, 0.375], atol=1e-15)


def test_shape_mismatch():
    with pytest.raises(InvariantViolation):
        degroot_two_stage(np.eye(3), np.zeros(2))


def test_solo_identity():
    s = np.array([0.2, 0.8])
    out = solo_beliefs(s)
    np.testing.assert_array_equal(out, s)
    assert out is not s
    assert solo_beliefs([]).size == 0


def _random_case(seed, max_n=6):
    rng = make_rng(seed)
    n = int(rng.integers(2, max_n + 1))
    kappa = int(rng.integers(1, n))
    g = init_random(n, kappa, rng, self_weight=int(rng.integers(1, 3)))
    # stack some shares so multi-share edges are covered
    for i in range(n):
        row = g.shares[i]
        j = int(rng.choice(np.nonzero(row)[0]))
        row[:] = 0
        row[j] = kappa
        if rng.random() < 0.5 and n > 2:
            others = [k for k in range(n) if k not in (i, j)]
            if kappa > 1:
                row[j] -= 1
                row[int(rng.choice(others))] += 1
    return g.check(), rng.random(n)


@given(st.integers(0, 2**32))
@settings(max_examples=300)
def test_matches_oracle(seed):
    g, s = _random_case(seed)
    w = g.shares.astype(float)
    np.fill_diagonal(w, g.self_weight)
    np.testing.assert_allclose(degroot_two_stage(build_matrix(g), s),
                               nested_average_oracle(w.tolist(), s.tolist()),
                               rtol=0, atol=1e-12)


@given(st.integers(0, 2**32))
def test_convex_hull(seed):
    g, s = _random_case(seed, max_n=15)
    p = degroot_two_stage(build_matrix(g), s)
    assert np.all(p >= s.min()) and np.all(p <= s.max())


@given(st.integers(0, 2**32), st.floats(0, 1))
def test_consensus_fixed_point(seed, c):
    g, s = _random_case(seed, max_n=15)
    p = degroot_two_stage(build_matrix(g), np.full_like(s, c))
    assert np.all(p == c)


@given(st.integers(0, 2**32))
def test_squared_matrix_row_stochastic(seed):
    g, _ = _random_case(seed, max_n=15)
    M = build_matrix(g)
    np.testing.assert_allclose((M @ M).sum(axis=1), 1.0, rtol=0, atol=1e-12)
