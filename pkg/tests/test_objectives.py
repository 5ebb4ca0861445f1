import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anisotune.core import RngStream
from anisotune.objectives import (
    NoiseModel,
    NoisyObjective,
    anisotropic_gaussian,
    asymmetric_quadratic,
    gaussian_objective,
    make_objective,
    modified_rosenbrock,
    symmetric_quadratic,
)


@pytest.mark.parametrize("d", [2, 3, 8])
def test_rosenbrock_optimum(d):
    assert modified_rosenbrock(np.ones(d), 0.37) == 1.0


def test_rosenbrock_values():
    assert math.isclose(modified_rosenbrock([0.0, 0.0], 0.5), math.exp(-0.5), rel_tol=1e-15)
    assert math.isclose(modified_rosenbrock([1.0, 0.0], 0.5), math.exp(-50.0), rel_tol=1e-14)


def test_rosenbrock_needs_two_dims():
    with pytest.raises(ValueError):
        modified_rosenbrock([1.0], 0.5)


def test_rosenbrock_unique_max_by_grid_refinement():
    lo, hi = np.array([-2.0, -2.0]), np.array([3.0, 3.0])
    for _ in range(6):
        g = np.stack(np.meshgrid(np.linspace(lo[0], hi[0], 201), np.linspace(lo[1], hi[1], 201)), -1)
        vals = modified_rosenbrock(g, 0.5)
        i = np.unravel_index(np.argmax(vals), vals.shape)
        best = g[i]
        span = (hi - lo) / 10
        lo, hi = best - span, best + span
    np.testing.assert_allclose(best, [1.0, 1.0], atol=1e-4)
    assert vals.max() <= 1.0


def test_quadratics():
    assert asymmetric_quadratic([0.0, 0.0]) == 1.0
    assert math.isclose(asymmetric_quadratic([1.0]), -0.9)
    assert math.isclose(asymmetric_quadratic([-1.0]), 0.9)
    assert symmetric_quadratic(np.zeros(3)) == 1.0
    assert symmetric_quadratic(np.ones(5)) == 0.0
    assert symmetric_quadratic([1.0, 0.0]) == 0.5


def test_anisotropic_gaussian():
    assert anisotropic_gaussian([0.0, 0.0]) == 1.0
    assert math.isclose(anisotropic_gaussian([0.1, 0.0]), math.exp(-1), rel_tol=1e-14)
    assert math.isclose(anisotropic_gaussian([0.0, 1.0]), math.exp(-1), rel_tol=1e-14)
    with pytest.raises(ValueError):
        anisotropic_gaussian([0.0, 0.0, 0.0])


def test_gaussian_objective():
    M = np.array([[2.0, 0.3], [0.1, 1.0]])
    c = np.array([0.5, -1.0])
    assert math.isclose(gaussian_objective(c, M, c), 1 / (2 * math.pi), rel_tol=1e-15)
    x = np.random.default_rng(0).normal(size=(5, 2))
    np.testing.assert_allclose(gaussian_objective(x, np.zeros((2, 2)), c), 1 / (2 * math.pi))
    assert math.isclose(
        gaussian_objective([1.0], [[1.0]], [0.0]), math.exp(-0.5) / math.sqrt(2 * math.pi), rel_tol=1e-15
    )


def test_vectorised_shapes():
    X = np.random.default_rng(1).normal(size=(4, 7, 3))
    assert modified_rosenbrock(X, 0.5).shape == (4, 7)
    assert asymmetric_quadratic(X).shape == (4, 7)


def test_bernoulli_degenerate_probabilities():
    one = NoisyObjective(lambda x: np.ones(x.shape[:-1]), 2, NoiseModel.bernoulli())
    zero = NoisyObjective(lambda x: np.zeros(x.shape[:-1]), 2, NoiseModel.bernoulli())
    rng = RngStream(3)
    assert np.all(one.observe_batch(np.zeros((500, 2)), rng.child(1)) == 1.0)
    assert np.all(zero.observe_batch(np.zeros((500, 2)), rng.child(2)) == 0.0)


def test_bernoulli_is_binary_with_right_rate():
    obj = make_objective("sym-quad", 2, NoiseModel.bernoulli())
    y = obj.observe_batch(np.full((100_000, 2), 0.5), RngStream(4))
    assert set(np.unique(y)) <= {0.0, 1.0}
    assert abs(y.mean() - 0.75) < 4 * math.sqrt(0.75 * 0.25 / 1e5)


def test_bernoulli_out_of_range_is_an_error():
    obj = make_objective("asym-quad", 1, NoiseModel.bernoulli())
    with pytest.raises(ValueError):
        obj.observe([1.0], RngStream(0))


def test_additive_gaussian_mean():
    obj = make_objective("sym-quad", 3, NoiseModel.gaussian(0.1))
    x = np.array([0.2, -0.1, 0.3])
    y = obj.observe_batch(np.tile(x, (100_000, 1)), RngStream(5))
    assert abs(y.mean() - symmetric_quadratic(x)) < 0.001
    assert abs(y.std() - 0.1) < 0.002


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=2))
def test_noiseless_observe_equals_truth(x):
    obj = make_objective("mod-rosenbrock", 2)
    assert obj.observe(x, RngStream(0)) == float(modified_rosenbrock(x, 0.5))


def test_call_count_is_the_ledger():
    obj = make_objective("sym-quad", 2, NoiseModel.gaussian(0.5))
    rng = RngStream(9)
    obj.observe([0.0, 0.0], rng)
    obj.observe_batch(np.zeros((17, 2)), rng)
    obj.fitness([0.0, 0.0])
    assert obj.call_count == 18


def test_dimension_mismatch():
    obj = make_objective("sym-quad", 3)
    with pytest.raises(ValueError):
        obj.observe([0.0, 0.0], RngStream(0))


def test_unknown_objective_and_noise():
    with pytest.raises(ValueError):
        make_objective("rastrigin", 2)
    with pytest.raises(ValueError):
        NoiseModel("cauchy")
