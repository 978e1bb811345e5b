"""Delay schedules, arrival sets, backlog accounting, and the feedback queue.

A schedule assigns every round t in [1, T] a delay d_t >= 1; the gradient
queried at round t becomes available at the end of round t + d_t - 1.  The
arrival set F_t collects the timestamps landing exactly at round t:

    F_t = {k in [T] | k + d_k - 1 = t},   t = 1, ..., T + d_max - 1.

Rounds past the horizon (t > T) form the flush window: nothing new is
queried there, but still-pending gradients keep arriving, which is what
lets consumption diagnostics cover all T timestamps.

The backlog counter

    m_t = t - sum_{i<t} |F_i|

equals one plus the number of gradients queried before round t that are
still undelivered at the end of round t-1, and satisfies
sum_t m_t <= S <= d_max * T where S is the sum of all delays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class DelaySchedule:
    """Materialized per-round delays with derived arrival structure.

    Delays are stored as a concrete integer array (not a generator) so that
    S, d_max, m_t and the arrival sets are all computable before a run,
    which formula-derived learning rates require.
    """

    delays: tuple

    def __post_init__(self):
        d = tuple(int(v) for v in self.delays)
        if len(d) == 0:
            raise ValueError("schedule must cover at least one round")
        if any(v < 1 for v in d):
            raise ValueError("all delays must be >= 1")
        object.__setattr__(self, "delays", d)

    @property
    def horizon(self) -> int:
        return len(self.delays)

    @property
    def total_delay(self) -> int:
        """S = sum of all delays."""
        return sum(self.delays)

    @property
    def max_delay(self) -> int:
        return max(self.delays)

    def arrival_round(self, t: int) -> int:
        """Round at whose end the gradient queried at round t is delivered."""
        return t + self.delays[t - 1] - 1

    def feedback_sets(self) -> list[list[int]]:
        """F_1 .. F_{T+d_max-1}, each sorted ascending.

        Every timestamp in [1, T] appears in exactly one set.
        """
        T = self.horizon
        sets: list[list[int]] = [[] for _ in range(T + self.max_delay - 1)]
        for k in range(1, T + 1):
            sets[self.arrival_round(k) - 1].append(k)
        return sets

    def is_in_order(self) -> bool:
        """True iff arrival rounds are nondecreasing in the query round.

        Ties are allowed: same-round arrivals are consumed in ascending
        timestamp order, which preserves the original order anyway.
        """
        arrivals = [self.arrival_round(t) for t in range(1, self.horizon + 1)]
        return all(a <= b for a, b in zip(arrivals, arrivals[1:]))

    def backlog(self) -> np.ndarray:
        """m_t = t - sum_{i<t} |F_i| for t in [1, T]."""
        T = self.horizon
        sizes = np.zeros(T + self.max_delay - 1, dtype=np.int64)
        for k in range(1, T + 1):
            sizes[self.arrival_round(k) - 1] += 1
        m = np.arange(1, T + 1, dtype=np.int64)
        m[1:] -= np.cumsum(sizes[: T - 1])
        return m

    @property
    def sum_backlog(self) -> int:
        return int(self.backlog().sum())

    def epoch_feedback_set(self, epoch_start: int, t: int) -> list[int]:
        """F_t restricted to timestamps >= epoch_start (stale feedback dropped)."""
        if epoch_start > t:
            raise ValueError("epoch_start must be <= t")
        return [k for k in range(epoch_start, min(t, self.horizon) + 1)
                if self.arrival_round(k) == t]

    def to_list(self) -> list[int]:
        return list(self.delays)


class FeedbackItem(NamedTuple):
    """A queried gradient in flight: timestamp, gradient, and query point."""

    timestamp: int
    gradient: np.ndarray
    anchor: np.ndarray


class FeedbackQueue:
    """Single-owner queue that delivers each queried gradient exactly once,
    at round timestamp + d_timestamp - 1, in ascending timestamp order."""

    def __init__(self, schedule: DelaySchedule):
        self.schedule = schedule
        self._pending: dict[int, list[FeedbackItem]] = {}
        self._n_pending = 0

    def push(self, t: int, gradient, anchor) -> None:
        if not 1 <= t <= self.schedule.horizon:
            raise ValueError(f"round {t} outside horizon [1, {self.schedule.horizon}]")
        item = FeedbackItem(t, np.asarray(gradient, dtype=np.float64),
                            np.asarray(anchor, dtype=np.float64))
        self._pending.setdefault(self.schedule.arrival_round(t), []).append(item)
        self._n_pending += 1

    def pop(self, r: int) -> list[FeedbackItem]:
        items = self._pending.pop(r, [])
        items.sort(key=lambda it: it.timestamp)
        self._n_pending -= len(items)
        return items

    def __len__(self) -> int:
        return self._n_pending


# ---------------------------------------------------------------------------
# Schedule generators.  All are deterministic given their seed.
# ---------------------------------------------------------------------------

def constant_schedule(T: int, d: int) -> DelaySchedule:
    return DelaySchedule((d,) * T)


def uniform_schedule(T: int, lo: int, hi: int, seed: int) -> DelaySchedule:
    if not 1 <= lo <= hi:
        raise ValueError("need 1 <= lo <= hi")
    rng = np.random.default_rng(seed)
    return DelaySchedule(tuple(rng.integers(lo, hi + 1, size=T)))


def block_schedule(T: int, d: int) -> DelaySchedule:
    """Delays that defer every gradient of a length-d block to the block's end.

    Round t in block z (blocks {(z-1)d+1, ..., min(zd, T)}) gets
    d_t = min(zd, T) - t + 1, so 1 <= d_t <= d and arrivals stay in order.
    This is the schedule the adversarial lower-bound instances use.
    """
    if d < 1:
        raise ValueError("block length must be >= 1")
    delays = []
    for t in range(1, T + 1):
        z = (t - 1) // d + 1
        delays.append(min(z * d, T) - t + 1)
    return DelaySchedule(tuple(delays))


def permuted_schedule(T: int, seed: int) -> DelaySchedule:
    """Out-of-order schedule from a random permutation of target arrival slots.

    Slot p_t earlier than the query round clamps to immediate arrival:
    d_t = max(p_t, t) - t + 1.
    """
    rng = np.random.default_rng(seed)
    slots = rng.permutation(T) + 1
    return DelaySchedule(tuple(int(max(p, t) - t + 1)
                               for t, p in enumerate(slots, start=1)))


def in_order_random_schedule(T: int, d_max: int, seed: int) -> DelaySchedule:
    """Random schedule with nondecreasing arrivals and delays <= d_max."""
    rng = np.random.default_rng(seed)
    delays = []
    prev_arrival = 1
    for t in range(1, T + 1):
        arrival = max(prev_arrival, t + int(rng.integers(1, d_max + 1)) - 1)
        arrival = min(arrival, t + d_max - 1)
        delays.append(arrival - t + 1)
        prev_arrival = arrival
    return DelaySchedule(tuple(delays))


def make_schedule(spec: dict, T: int, seed: int) -> DelaySchedule:
    """Build a schedule from a config-style spec.

    Supported kinds:
      {"kind": "constant", "value": k}
      {"kind": "uniform", "lo": a, "hi": b}
      {"kind": "blocks", "d": d}
      {"kind": "permuted"}
      {"kind": "in_order_random", "d_max": d}
      {"kind": "list", "values": [d_1, ..., d_T]}
    """
    kind = spec.get("kind")
    if kind == "constant":
        return constant_schedule(T, int(spec["value"]))
    if kind == "uniform":
        return uniform_schedule(T, int(spec["lo"]), int(spec["hi"]), seed)
    if kind == "blocks":
        return block_schedule(T, int(spec["d"]))
    if kind == "permuted":
        return permuted_schedule(T, seed)
    if kind == "in_order_random":
        return in_order_random_schedule(T, int(spec["d_max"]), seed)
    if kind == "list":
        values = spec["values"]
        if len(values) != T:
            raise ValueError(f"explicit delay list has length {len(values)}, expected {T}")
        return DelaySchedule(tuple(values))
    raise ValueError(f"unknown delay spec kind: {kind!r}")
