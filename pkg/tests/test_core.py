import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from anisotune.core import RngStream, clamp_window, eig2_sym, gaussian_vector, window_norm

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def square(d):
    return arrays(np.float64, (d, d), elements=finite)


@pytest.mark.parametrize(
    "L, expected",
    [(np.eye(4), 2.0), (np.diag([3.0, 4.0]), 5.0), (np.zeros((3, 3)), 0.0)],
)
def test_window_norm_examples(L, expected):
    assert window_norm(L) == expected


@given(square(3), finite)
def test_window_norm_is_absolutely_homogeneous(L, c):
    assert np.isclose(window_norm(c * L), abs(c) * window_norm(L), rtol=1e-12, atol=1e-300)


def test_clamp_examples():
    L = np.eye(2)
    assert np.array_equal(clamp_window(L, 0.0, 2.0), L)
    np.testing.assert_allclose(clamp_window(3 * np.eye(2), 0.0, 2.0), 2 * np.eye(2), rtol=1e-15)
    np.testing.assert_allclose(clamp_window([[0.1]], 0.5, 2.0), [[0.5]], rtol=1e-15)


def test_clamp_zero_window():
    with pytest.raises(ValueError):
        clamp_window(np.zeros((2, 2)), 0.1, 2.0)
    assert np.array_equal(clamp_window(np.zeros((2, 2)), 0.0, 2.0), np.zeros((2, 2)))


def test_clamp_rejects_bad_bounds():
    with pytest.raises(ValueError):
        clamp_window(np.eye(2), 1.0, 0.5)


@settings(max_examples=300)
@given(st.integers(1, 5).flatmap(square), st.floats(0.01, 1.0), st.floats(1.0, 5.0))
def test_clamp_idempotent_and_in_band(L, w_min, w_max):
    if window_norm(L) == 0.0:
        return
    once = clamp_window(L, w_min, w_max)
    assert np.array_equal(clamp_window(once, w_min, w_max), once)
    root_d = np.sqrt(L.shape[0])
    size = window_norm(once)
    ulp = 4 * np.finfo(float).eps * size
    assert w_min * root_d - ulp <= size <= w_max * root_d + ulp
    # direction is preserved
    np.testing.assert_allclose(once / size, L / window_norm(L), rtol=1e-12, atol=1e-15)


def test_gaussian_vector_deterministic():
    a = gaussian_vector(RngStream(7).child("x", 3), 5)
    b = gaussian_vector(RngStream(7).child("x", 3), 5)
    assert np.array_equal(a, b)
    c = gaussian_vector(RngStream(7).child("x", 4), 5)
    assert not np.array_equal(a, c)


def test_gaussian_vector_needs_positive_dim():
    with pytest.raises(ValueError):
        gaussian_vector(RngStream(0), 0)


def test_gaussian_moments():
    draws = RngStream(11).normal(size=(1_000_000, 3))
    assert np.all(np.abs(draws.mean(axis=0)) < 0.005)
    np.testing.assert_allclose(np.cov(draws.T), np.eye(3), atol=0.01)


def test_gaussian_chi_squared_fit():
    draws = RngStream(12).normal(size=100_000)
    edges = stats.norm.ppf(np.linspace(0, 1, 41))
    counts, _ = np.histogram(draws, edges)
    _, p = stats.chisquare(counts)
    assert p > 1e-3


def test_position_counts_draws():
    r = RngStream(1)
    r.normal(size=(4, 3))
    r.uniform()
    assert r.position == 13


def test_child_streams_reproducible_and_distinct():
    master = RngStream(2024)
    a = master.child("run", 1).child("step", 5).normal(size=8)
    b = RngStream(2024).child("run", 1, "step", 5).normal(size=8)
    assert np.array_equal(a, b)
    others = [master.child("run", 1, "step", k).normal(size=1000) for k in range(4)]
    corr = np.corrcoef(others)
    assert np.all(np.abs(corr[np.triu_indices(4, 1)]) < 0.15)


def test_child_order_does_not_matter():
    master = RngStream(5)
    forward = [master.child(i).normal() for i in range(10)]
    backward = [master.child(i).normal() for i in reversed(range(10))][::-1]
    assert forward == backward


def test_eig2_sym():
    A = np.array([[2.0, 1.0], [1.0, 3.0]])
    np.testing.assert_allclose(sorted(eig2_sym(A)), np.linalg.eigvalsh(A), rtol=1e-14)
