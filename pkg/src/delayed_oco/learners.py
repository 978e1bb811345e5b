"""Online learners for delayed gradient feedback.

All learners share one protocol so the harness can drive them identically:

    play(t)            -> decision vector for round t (never mutates math state)
    ingest(t, items)   -> consume the FeedbackItems that arrived at round t

Five algorithms are provided:

* ``OnlineGradientDescent``  - the non-delayed projected-gradient baseline.
* ``DelayedOGD``             - one projected step per delivered gradient, in
  ascending timestamp order; under unit delays it reduces bitwise to OGD.
* ``MildOGD``                - a pool of DelayedOGD experts with geometrically
  spaced learning rates, combined by a delay-aware Hedge over linearized
  surrogate losses. Experts reuse the meta decision's gradient, so the whole
  ensemble costs exactly one gradient query per round.
* ``DogdDoublingTrick`` / ``MildOgdDoublingTrick`` - restart-based variants
  that track the backlog statistic online and need no horizon quantities.

Rate helpers (``corollary_lr``, ``mild_lr_grid``, ``hedge_alpha``,
``init_weights``, ``dogd_dt_lr``, ``mild_dt_params``) compute the
formula-derived parameters each algorithm's guarantee asks for.
"""

from __future__ import annotations

import math

import numpy as np

from .delay import FeedbackItem
from .geometry import Box


class OnlineLearner:
    """Uniform protocol: play a decision, then ingest whatever feedback arrived."""

    def play(self, t: int) -> np.ndarray:
        raise NotImplementedError

    def ingest(self, t: int, items: list[FeedbackItem]) -> None:
        raise NotImplementedError


def ogd_step(box: Box, x: np.ndarray, eta: float, grad: np.ndarray) -> np.ndarray:
    """One projected gradient step: project(x - eta * grad)."""
    return box.project(x - eta * grad)


class OnlineGradientDescent(OnlineLearner):
    """Projected online gradient descent, the non-delayed baseline.

    Applies one projected step per delivered gradient as it comes in; with
    unit delays that is exactly one step per round on the current loss.
    """

    def __init__(self, box: Box, eta: float):
        if eta <= 0:
            raise ValueError("learning rate must be positive")
        self.box = box
        self.eta = eta
        self.x = box.origin()

    def play(self, t: int) -> np.ndarray:
        return self.x.copy()

    def ingest(self, t: int, items: list[FeedbackItem]) -> None:
        for item in items:
            self.x = ogd_step(self.box, self.x, self.eta, item.gradient)


class DelayedOGD(OnlineLearner):
    """Delayed projected gradient descent.

    Keeps a single iterate y and performs one projected step per delivered
    gradient, traversing each round's arrivals in ascending timestamp order
    (the ascending order is load-bearing: it is what makes the consumption
    order equal the query order whenever delays preserve arrival order).
    ``tau`` counts generated decisions; ``c_log[i]`` is the timestamp of the
    (i+1)-th consumed gradient.
    """

    def __init__(self, box: Box, eta: float):
        if eta <= 0:
            raise ValueError("learning rate must be positive")
        self.box = box
        self.eta = eta
        self.y = box.origin()
        self.tau = 1
        self.c_log: list[int] = []

    def play(self, t: int) -> np.ndarray:
        return self.y.copy()

    def ingest(self, t: int, items: list[FeedbackItem]) -> None:
        last = None
        for item in items:
            if last is not None and item.timestamp <= last:
                raise ValueError("feedback items must be sorted ascending by timestamp")
            last = item.timestamp
            self.y = ogd_step(self.box, self.y, self.eta, item.gradient)
            self.tau += 1
            self.c_log.append(item.timestamp)


# ---------------------------------------------------------------------------
# Formula-derived parameters.
# ---------------------------------------------------------------------------

def corollary_lr(D: float, G: float, sum_m: float) -> float:
    """eta = D / (G * sqrt(sum_m)), the rate whose regret is (2D+P)G*sqrt(S)+C."""
    if min(D, G, sum_m) <= 0:
        raise ValueError("D, G and sum_m must be positive")
    return D / (G * math.sqrt(sum_m))


def expert_count(T: int) -> int:
    """N = ceil(log2(T+1)/2) + 1 expert rates cover every path length in [0, TD]."""
    return math.ceil(0.5 * math.log2(T + 1)) + 1


def mild_lr_grid(D: float, G: float, beta: float, T: int) -> np.ndarray:
    """Ascending expert rates eta_i = 2^(i-1) * D / (G*sqrt(beta)), i = 1..N."""
    if min(D, G, beta) <= 0 or T < 1:
        raise ValueError("D, G, beta must be positive and T >= 1")
    base = D / (G * math.sqrt(beta))
    return base * np.exp2(np.arange(expert_count(T)))


def hedge_alpha(D: float, G: float, beta: float) -> float:
    """Weight-update temperature alpha = 1 / (G * D * sqrt(beta))."""
    if min(D, G, beta) <= 0:
        raise ValueError("D, G and beta must be positive")
    return 1.0 / (G * D * math.sqrt(beta))


def init_weights(N: int) -> np.ndarray:
    """Prior weights w_i = (N+1) / (i*(i+1)*N) over rates sorted ascending.

    The sum telescopes to exactly 1; smaller rates get larger prior mass.
    """
    if N < 1:
        raise ValueError("need at least one expert")
    i = np.arange(1, N + 1, dtype=np.float64)
    return (N + 1) / (i * (i + 1) * N)


def dogd_dt_lr(D: float, G: float, v: int) -> float:
    """Epoch-v restart rate eta_v = D / (G * 2^(v/2))."""
    if v < 1:
        raise ValueError("epoch index starts at 1")
    return D / (G * 2.0 ** (v / 2.0))


def mild_dt_params(D: float, G: float, T: int, v: int) -> tuple[float, np.ndarray]:
    """Epoch-v aggregation parameters for the restarting expert pool.

    Returns (alpha_v, rate grid), where alpha_v = 1/(G*D*2^(v/2)) and the
    grid holds the constants eta_i = D*2^(i-1)/G scaled by 2^(-v/2), i.e.
    the epoch estimate 2^v replaces the backlog sum in the fixed-horizon
    formulas.
    """
    if v < 1:
        raise ValueError("epoch index starts at 1")
    consts = (D / G) * np.exp2(np.arange(expert_count(T)))
    return 1.0 / (G * D * 2.0 ** (v / 2.0)), consts / 2.0 ** (v / 2.0)


# ---------------------------------------------------------------------------
# Expert aggregation.
# ---------------------------------------------------------------------------

def meta_play(weights: np.ndarray, decisions: np.ndarray) -> np.ndarray:
    """Weighted combination sum_i w_i * x_i; stays feasible by convexity."""
    weights = np.asarray(weights, dtype=np.float64)
    decisions = np.asarray(decisions, dtype=np.float64)
    if weights.shape[0] != decisions.shape[0]:
        raise ValueError("one decision per expert weight is required")
    return weights @ decisions


def delayed_hedge_update(log_weights: np.ndarray, alpha: float,
                         arrived_loss_sums: np.ndarray) -> np.ndarray:
    """Exponential-weights update on whatever expert losses arrived this round.

    Works in log space (subtract the max before normalizing) because the
    ratio form overflows once alpha * cumulative-loss grows large; the
    mathematics is identical.  An all-zero arrival leaves weights unchanged.
    """
    lw = log_weights - alpha * np.asarray(arrived_loss_sums, dtype=np.float64)
    lw -= lw.max()
    return lw - math.log(np.exp(lw).sum())


class MildOGD(OnlineLearner):
    """Delay-aware Hedge over a pool of DelayedOGD experts on surrogate losses.

    Round protocol (order matters):
      1. collect each expert's decision x_t^eta and play the weighted mix x_t;
      2. the harness queries the real gradient at x_t and enqueues it;
      3. on arrival of timestamp k, reweight experts by their surrogate loss
         <g_k, x_k^eta - x_k> and forward the same gradient to every expert,
         which steps on it like plain DelayedOGD.

    Experts therefore never query gradients of their own: one query per round
    serves the meta decision and the whole pool.  Each round's meta and expert
    decisions are retained until that round's feedback arrives (memory is
    bounded by the maximum backlog).
    """

    def __init__(self, box: Box, expert_rates, alpha: float):
        rates = np.sort(np.asarray(expert_rates, dtype=np.float64))
        if rates.size < 1 or np.any(rates <= 0):
            raise ValueError("expert rates must be positive")
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.box = box
        self.alpha = alpha
        self.expert_rates = rates
        self.experts = [DelayedOGD(box, float(eta)) for eta in rates]
        self.log_w = np.log(init_weights(rates.size))
        self._meta_plays: dict[int, np.ndarray] = {}
        self._expert_plays: dict[int, np.ndarray] = {}

    @property
    def weights(self) -> np.ndarray:
        # the update keeps log_w normalized; not re-normalizing here makes the
        # weight-sum invariant an actual check of the update arithmetic
        return np.exp(self.log_w)

    def play(self, t: int) -> np.ndarray:
        xs = np.stack([e.play(t) for e in self.experts])
        # clip guards the one-ulp rounding a float convex combination can incur
        x = self.box.project(meta_play(self.weights, xs))
        self._expert_plays[t] = xs
        self._meta_plays[t] = x
        return x.copy()

    def ingest(self, t: int, items: list[FeedbackItem]) -> None:
        if not items:
            return
        loss_sums = np.zeros(len(self.experts))
        for item in items:
            k = item.timestamp
            if k not in self._expert_plays:
                raise AssertionError(f"feedback for round {k} without a recorded play")
            loss_sums += (self._expert_plays[k] - self._meta_plays[k]) @ item.gradient
        self.log_w = delayed_hedge_update(self.log_w, self.alpha, loss_sums)
        for expert in self.experts:
            expert.ingest(t, items)
        for item in items:
            del self._expert_plays[item.timestamp], self._meta_plays[item.timestamp]

    @property
    def c_log(self) -> list[int]:
        return self.experts[0].c_log


# ---------------------------------------------------------------------------
# Doubling-trick variants.
# ---------------------------------------------------------------------------

class EpochController:
    """Online tracker of the restart condition shared by the doubling variants.

    Maintains B = sum_{j=s_v..t} (j+1-s_v - A_j), where A_j counts epoch-local
    arrivals strictly before round j; the summand is the epoch-local backlog
    counter, so B estimates the quantity the fixed-horizon rates need.  At the
    start of round t, if B would exceed the current budget 2^v, round t opens
    epoch v+1 instead (strict inequality: B == 2^v continues the epoch).
    Everything is integer arithmetic, hence exact.
    """

    def __init__(self):
        self.v = 1
        self.epoch_start = 1
        self.epoch_starts = [1]
        self._B = 0
        self._arrived = 0
        self._last_round = 0

    def begin_round(self, t: int) -> bool:
        """Advance to round t; True iff a new epoch starts at t."""
        if t != self._last_round + 1:
            raise ValueError("rounds must be visited consecutively, once each")
        self._last_round = t
        self._B += (t + 1 - self.epoch_start) - self._arrived
        if self._B > 2 ** self.v:
            self.v += 1
            self.epoch_start = t
            self.epoch_starts.append(t)
            self._arrived = 0
            self._B = 1
            return True
        return False

    def note_arrivals(self, count: int) -> None:
        """Record epoch-local arrivals delivered at the end of the current round."""
        self._arrived += count

    def in_epoch(self, timestamp: int) -> bool:
        return timestamp >= self.epoch_start

    @property
    def budget_used(self) -> int:
        return self._B


class _RestartingLearner(OnlineLearner):
    """Shared plumbing: epoch bookkeeping + stale-feedback dropping."""

    def __init__(self):
        self.ctrl = EpochController()
        self.dropped = 0
        self.inner: OnlineLearner = None  # set by subclass

    def _rebuild(self) -> None:
        raise NotImplementedError

    def play(self, t: int) -> np.ndarray:
        if self.ctrl.begin_round(t):
            self._rebuild()
        return self.inner.play(t)

    def ingest(self, t: int, items: list[FeedbackItem]) -> None:
        kept = [it for it in items if self.ctrl.in_epoch(it.timestamp)]
        self.dropped += len(items) - len(kept)
        self.ctrl.note_arrivals(len(kept))
        self.inner.ingest(t, kept)

    @property
    def epoch_starts(self) -> list[int]:
        return list(self.ctrl.epoch_starts)


class DogdDoublingTrick(_RestartingLearner):
    """DelayedOGD with restarts: epoch v runs a fresh instance at rate eta_v.

    Gradients queried before the current epoch are discarded on arrival
    (counted in ``dropped``), so each instance sees exactly the feedback the
    epoch-local backlog statistic accounts for.
    """

    def __init__(self, box: Box, D: float, G: float):
        super().__init__()
        self.box = box
        self.D = D
        self.G = G
        self._rebuild()

    def _rebuild(self) -> None:
        self.inner = DelayedOGD(self.box, dogd_dt_lr(self.D, self.G, self.ctrl.v))


class MildOgdDoublingTrick(_RestartingLearner):
    """Restarting expert pool: one controller drives meta and experts.

    On each restart the pool is rebuilt from scratch: prior weights are
    reinitialized, expert iterates return to the origin, and the epoch
    estimate 2^v replaces the backlog sum inside both the expert rates and
    the Hedge temperature.  Using a single shared controller (instead of one
    copy per algorithm) triggers on identical conditions and makes drift
    between meta and experts impossible.
    """

    def __init__(self, box: Box, D: float, G: float, T: int):
        super().__init__()
        self.box = box
        self.D = D
        self.G = G
        self.T = T
        self._rebuild()

    def _rebuild(self) -> None:
        alpha_v, rates = mild_dt_params(self.D, self.G, self.T, self.ctrl.v)
        self.inner = MildOGD(self.box, rates, alpha_v)

    @property
    def weights(self) -> np.ndarray:
        return self.inner.weights
