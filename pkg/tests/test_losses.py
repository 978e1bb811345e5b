import math

import numpy as np
import pytest

from delayed_oco import (
    Box,
    LinearLoss,
    QuadraticTrackingLoss,
    SignLinearLoss,
    check_gradient_bound,
    make_surrogate,
    quadratic_drift_scale,
)


def finite_difference(loss, x, h=1e-6):
    fd = np.empty(len(x))
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = h
        fd[i] = (loss.value(x + e) - loss.value(x - e)) / (2 * h)
    return fd


def test_linear_value_orthogonal():
    f = LinearLoss(np.array([1.0, -1.0]))
    assert f.value([0.5, 0.5]) == 0.0


def test_quadratic_value():
    f = QuadraticTrackingLoss(np.zeros(2), 2.0)
    assert f.value([1.0, 1.0]) == pytest.approx(2.0)


def test_signlinear_value_cancellation():
    f = SignLinearLoss(np.array([1.0, -1.0]), 2.0)
    assert f.value([1.0, 1.0]) == pytest.approx(0.0)


def test_linear_gradient_constant():
    f = LinearLoss(np.array([1.0, -1.0]))
    assert np.array_equal(f.gradient([5.0, 5.0]), [1.0, -1.0])
    assert np.array_equal(f.gradient([0.0, 0.0]), [1.0, -1.0])


def test_quadratic_gradient():
    f = QuadraticTrackingLoss(np.array([1.0, 0.0]), 1.0)
    assert np.allclose(f.gradient([0.0, 0.0]), [-1.0, 0.0])


def test_signlinear_gradient():
    f = SignLinearLoss(np.array([1.0, 1.0]), math.sqrt(2.0))
    assert np.allclose(f.gradient([0.0, 0.0]), [1.0, 1.0])


@pytest.mark.parametrize("make", [
    lambda rng: LinearLoss(rng.normal(size=3)),
    lambda rng: QuadraticTrackingLoss(rng.uniform(-0.5, 0.5, 3), rng.uniform(0.1, 2.0)),
    lambda rng: SignLinearLoss(rng.choice([-1.0, 1.0], 3), rng.uniform(0.5, 3.0)),
])
def test_gradients_match_finite_differences(make):
    # central differences at 100 random interior points, relative error <= 1e-6
    rng = np.random.default_rng(3)
    for _ in range(100):
        f = make(rng)
        x = rng.uniform(-0.9, 0.9, size=3)
        g = f.gradient(x)
        fd = finite_difference(f, x)
        assert np.linalg.norm(fd - g) <= 1e-6 * max(1.0, np.linalg.norm(g))


def test_surrogate_zero_at_anchor():
    s = make_surrogate([1.0, 0.0], [0.5, 0.0])
    assert s.value([0.5, 0.0]) == 0.0


def test_surrogate_inner_product():
    assert make_surrogate([1.0, 0.0], [0.0, 0.0]).value([1.0, 1.0]) == pytest.approx(1.0)
    assert make_surrogate([2.0, -1.0], [1.0, 1.0]).value([0.0, 0.0]) == pytest.approx(-1.0)


def test_surrogate_gradient_bitwise_everywhere():
    rng = np.random.default_rng(4)
    s = make_surrogate(rng.normal(size=4), rng.normal(size=4))
    for _ in range(20):
        assert np.array_equal(s.gradient(rng.normal(size=4)), s.grad)


def test_surrogate_bounded_by_GD():
    # anchors and arguments inside the set: |value| <= G*D
    rng = np.random.default_rng(5)
    box = Box.from_diameter(3, 2.0)
    G = 1.5
    for _ in range(300):
        g = rng.normal(size=3)
        norm = np.linalg.norm(g)
        if norm > G:
            g *= G / norm
        s = make_surrogate(g, box.random_point(rng))
        assert abs(s.value(box.random_point(rng))) <= G * box.diameter + 1e-9


def test_check_gradient_bound_linear():
    box = Box(2, 1.0)
    g = np.array([0.6, 0.8])  # norm 1
    assert check_gradient_bound(LinearLoss(g), box, 1.0)
    assert not check_gradient_bound(SignLinearLoss(np.array([1.0, -1.0]), 1.5), box, 1.0)


def test_check_gradient_bound_quadratic_scaled():
    box = Box.from_diameter(2, 2.0)
    f = QuadraticTrackingLoss(np.zeros(2), scale=1.0 / box.diameter)
    # centered target: sup ||grad|| = s * D/2 = G/2
    assert check_gradient_bound(f, box, 1.0)
    assert not check_gradient_bound(QuadraticTrackingLoss(np.zeros(2), 10.0), box, 1.0)


def test_quadratic_drift_scale_guarantees_bound():
    rng = np.random.default_rng(6)
    box = Box.from_diameter(3, 2.0)
    targets = [box.random_point(rng) for _ in range(50)]
    scale = quadratic_drift_scale(1.0, box, max(np.linalg.norm(t) for t in targets))
    for t in targets:
        assert check_gradient_bound(QuadraticTrackingLoss(t, scale), box, 1.0)


def test_signs_validated():
    with pytest.raises(ValueError):
        SignLinearLoss(np.array([1.0, 0.5]), 1.0)


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        LinearLoss(np.array([1.0, 2.0])).value([1.0])
