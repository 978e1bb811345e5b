"""Convex loss families and the linearized surrogate used by expert aggregation.

Three evaluable/differentiable families are provided:

* ``LinearLoss``       f(x) = <g, x>
* ``QuadraticTrackingLoss``  f(x) = (scale/2) * ||x - target||^2
* ``SignLinearLoss``   f(x) = (gain/sqrt(n)) * <signs, x>,  signs in {-1,+1}^n

plus ``SurrogateLoss``, the linearization <g_t, x - x_t> anchored at the
decision where the gradient g_t was queried.  Surrogates are stored as
(gradient, anchor) pairs rather than closures so feedback traces stay
serializable and replayable.

Every loss carries the round index ``t`` it belongs to, so delayed delivery
can be audited against the schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Box, as_decision


class Loss:
    """Base class: a convex loss with an evaluable value and gradient."""

    t: int

    def value(self, x) -> float:
        raise NotImplementedError

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        """Values at each row of the (m, n) array X (used by grid searches)."""
        return np.apply_along_axis(self.value, 1, np.asarray(X, dtype=np.float64))

    def gradient(self, x) -> np.ndarray:
        raise NotImplementedError

    def grad_sup(self, box: Box) -> float:
        """Analytic supremum of ||grad f(x)||_2 over ``box``."""
        raise NotImplementedError


@dataclass(frozen=True)
class LinearLoss(Loss):
    """f(x) = <g, x>; the gradient is the constant vector g."""

    g: np.ndarray
    t: int = 0

    def __post_init__(self):
        object.__setattr__(self, "g", as_decision(self.g))

    def value(self, x) -> float:
        return float(np.dot(self.g, as_decision(x, self.g.shape[0])))

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.g

    def gradient(self, x) -> np.ndarray:
        as_decision(x, self.g.shape[0])
        return self.g.copy()

    def grad_sup(self, box: Box) -> float:
        return float(np.linalg.norm(self.g))


@dataclass(frozen=True)
class QuadraticTrackingLoss(Loss):
    """f(x) = (scale/2) * ||x - target||_2^2, minimized at the target point."""

    target: np.ndarray
    scale: float
    t: int = 0

    def __post_init__(self):
        object.__setattr__(self, "target", as_decision(self.target))
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError("scale must be a positive finite real")

    def value(self, x) -> float:
        d = as_decision(x, self.target.shape[0]) - self.target
        return 0.5 * self.scale * float(np.dot(d, d))

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        d = np.asarray(X, dtype=np.float64) - self.target
        return 0.5 * self.scale * np.einsum("ij,ij->i", d, d)

    def gradient(self, x) -> np.ndarray:
        return self.scale * (as_decision(x, self.target.shape[0]) - self.target)

    def grad_sup(self, box: Box) -> float:
        # sup ||scale*(x - target)|| over the box is attained at a corner.
        corner = box.half_width * np.ones(box.dim)
        worst = np.maximum(np.abs(corner - self.target), np.abs(-corner - self.target))
        return self.scale * float(np.linalg.norm(worst))


@dataclass(frozen=True)
class SignLinearLoss(Loss):
    """f(x) = (gain/sqrt(n)) * <signs, x> with signs in {-1,+1}^n.

    Its gradient norm equals ``gain`` exactly, making ``gain`` the tight
    gradient bound for the adversarial instances built from this family.
    """

    signs: np.ndarray
    gain: float
    t: int = 0

    def __post_init__(self):
        s = np.asarray(self.signs, dtype=np.float64)
        if s.ndim != 1 or not np.all(np.abs(s) == 1.0):
            raise ValueError("signs must be a 1-d vector with entries in {-1,+1}")
        if not (math.isfinite(self.gain) and self.gain > 0):
            raise ValueError("gain must be a positive finite real")
        object.__setattr__(self, "signs", s)

    @property
    def g(self) -> np.ndarray:
        return (self.gain / math.sqrt(self.signs.shape[0])) * self.signs

    def value(self, x) -> float:
        return float(np.dot(self.g, as_decision(x, self.signs.shape[0])))

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.g

    def gradient(self, x) -> np.ndarray:
        as_decision(x, self.signs.shape[0])
        return self.g

    def grad_sup(self, box: Box) -> float:
        return float(self.gain)


@dataclass(frozen=True)
class SurrogateLoss:
    """Linearization <grad, x - anchor> of a loss at the point it was queried.

    Properties that the aggregation analysis relies on:
      * value(anchor) == 0
      * gradient is constant and equals ``grad`` everywhere
      * |value(x)| <= G*D whenever anchor and x lie in a diameter-D set
    """

    grad: np.ndarray
    anchor: np.ndarray
    t: int = 0

    def __post_init__(self):
        object.__setattr__(self, "grad", as_decision(self.grad))
        object.__setattr__(self, "anchor", as_decision(self.anchor, self.grad.shape[0]))

    def value(self, x) -> float:
        x = as_decision(x, self.grad.shape[0])
        return float(np.dot(self.grad, x - self.anchor))

    def gradient(self, x) -> np.ndarray:
        as_decision(x, self.grad.shape[0])
        return self.grad.copy()


def make_surrogate(grad, anchor, t: int = 0) -> SurrogateLoss:
    return SurrogateLoss(np.asarray(grad, dtype=np.float64),
                         np.asarray(anchor, dtype=np.float64), t)


def check_gradient_bound(loss: Loss, box: Box, bound: float) -> bool:
    """True iff the analytic sup of ||grad|| over the box is <= bound."""
    return loss.grad_sup(box) <= bound


def quadratic_drift_scale(bound: float, box: Box, max_target_norm: float) -> float:
    """Curvature for tracking losses that keeps gradients below ``bound``.

    With scale = bound / (2*h*sqrt(n) + max_t ||target_t||), the gradient
    norm sup over the box is at most bound for every target in the sweep,
    with no runtime clipping.
    """
    denom = 2.0 * box.half_width * math.sqrt(box.dim) + max_target_norm
    return bound / denom
