import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from anisotune.core import RngStream
from anisotune.objectives import NoiseModel, NoisyObjective, make_objective
from anisotune.smoothing import (
    anisotropic_moments,
    estimate_anisotropic,
    estimate_isotropic,
    smoothed_value_oracle,
)


def cubic(x):
    x = np.asarray(x, dtype=float)
    return 1.0 - 0.3 * x[..., 0] ** 2 + 0.2 * x[..., 0] * x[..., 1] - x[..., 1] ** 2 + 0.1 * x[..., 0] ** 3


L_TEST = np.array([[0.3, 0.05], [-0.1, 0.2]])
X_TEST = np.array([0.2, -0.4])


def oracle_gradients(f, x, L, eps=1e-5):
    """Central differences of the quadrature value in x and in each entry of L."""
    d = x.shape[0]
    gx = np.empty(d)
    for i in range(d):
        e = np.zeros(d)
        e[i] = eps
        gx[i] = (smoothed_value_oracle(f, x + e, L) - smoothed_value_oracle(f, x - e, L)) / (2 * eps)
    gL = np.empty((d, d))
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d))
            E[i, j] = eps
            gL[i, j] = (smoothed_value_oracle(f, x, L + E) - smoothed_value_oracle(f, x, L - E)) / (2 * eps)
    return gx, gL


def test_quadrature_oracle_closed_form():
    # E[1 - |x + Lv|^2] = 1 - |x|^2 - tr(L L^T)
    f = lambda z: 1.0 - np.sum(np.asarray(z) ** 2, axis=-1)  # noqa: E731
    expected = 1.0 - X_TEST @ X_TEST - np.trace(L_TEST @ L_TEST.T)
    assert np.isclose(smoothed_value_oracle(f, X_TEST, L_TEST), expected, rtol=1e-12)


def test_quadrature_oracle_limits():
    with pytest.raises(ValueError):
        smoothed_value_oracle(cubic, np.zeros(5), np.eye(5))
    with pytest.raises(ValueError):
        smoothed_value_oracle(cubic, X_TEST, L_TEST, order=6)


def test_estimators_match_quadrature_oracle():
    obj = NoisyObjective(cubic, 2, NoiseModel.gaussian(0.1))
    B = 400_000
    est = estimate_anisotropic(obj, X_TEST, L_TEST, B, RngStream(21))
    gx_ref, gL_ref = oracle_gradients(cubic, X_TEST, L_TEST)
    # standard errors from the per-sample terms
    v, y = est.v, est.y
    se_x = np.std(v * y[:, None], axis=0) / np.sqrt(B)
    outer = v[:, :, None] * v[:, None, :] - np.eye(2)
    se_L = np.std(outer * y[:, None, None], axis=0) / np.sqrt(B)
    Linv_T = np.linalg.inv(L_TEST).T
    # the raw moments equal L^T times the true gradients
    assert np.all(np.abs(est.gx - L_TEST.T @ gx_ref) < 4 * se_x)
    assert np.all(np.abs(est.gL - L_TEST.T @ gL_ref) < 4 * se_L)
    np.testing.assert_allclose(est.grad_x(L_TEST), Linv_T @ est.gx, rtol=1e-12)
    np.testing.assert_allclose(est.grad_L(L_TEST), Linv_T @ est.gL, rtol=1e-12)


def test_isotropic_estimator_matches_oracle():
    obj = NoisyObjective(cubic, 2)
    w, B, eps = 0.25, 400_000, 1e-5
    est = estimate_isotropic(obj, X_TEST, w, B, RngStream(22))
    I = np.eye(2)
    gx_ref, _ = oracle_gradients(cubic, X_TEST, w * I)
    gw_ref = (smoothed_value_oracle(cubic, X_TEST, (w + eps) * I) - smoothed_value_oracle(cubic, X_TEST, (w - eps) * I)) / (
        2 * eps
    )
    np.testing.assert_allclose(est.hx, gx_ref, atol=0.01)
    assert abs(est.hw - gw_ref) < 0.02


def test_charges_exactly_B_calls():
    obj = make_objective("sym-quad", 3)
    estimate_anisotropic(obj, np.zeros(3), np.eye(3), 37, RngStream(0))
    estimate_isotropic(obj, np.zeros(3), 0.5, 5, RngStream(0))
    assert obj.call_count == 42


def test_estimator_argument_checks():
    obj = make_objective("sym-quad", 2)
    with pytest.raises(ValueError):
        estimate_anisotropic(obj, np.zeros(2), np.eye(2), 0, RngStream(0))
    with pytest.raises(ValueError):
        estimate_anisotropic(obj, np.zeros(2), np.eye(3), 4, RngStream(0))
    with pytest.raises(ValueError):
        estimate_isotropic(obj, np.zeros(2), 0.0, 4, RngStream(0))


def test_estimates_are_reproducible():
    obj = make_objective("mod-rosenbrock", 2, NoiseModel.bernoulli())
    a = estimate_anisotropic(obj, np.zeros(2), np.eye(2), 50, RngStream(8, (1, 2)))
    b = estimate_anisotropic(obj, np.zeros(2), np.eye(2), 50, RngStream(8, (1, 2)))
    assert np.array_equal(a.gx, b.gx) and np.array_equal(a.gL, b.gL)


@given(
    st.integers(1, 40).flatmap(
        lambda b: st.tuples(
            arrays(np.float64, (b, 3), elements=st.floats(-5, 5)),
            arrays(np.float64, (b,), elements=st.floats(-5, 5)),
        )
    )
)
def test_constant_shift_only_moves_the_identity_part(vy):
    v, y = vy
    gx, gL = anisotropic_moments(v, y)
    gx2, gL2 = anisotropic_moments(v, y + 1.0)
    B = len(y)
    np.testing.assert_allclose(gx2 - gx, v.mean(axis=0), atol=1e-9)
    np.testing.assert_allclose(gL2 - gL, v.T @ v / B - np.eye(3), atol=1e-9)
    np.testing.assert_allclose(gL, gL.T, atol=1e-9)
