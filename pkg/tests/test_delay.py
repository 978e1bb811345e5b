import numpy as np
import pytest

from delayed_oco import (
    DelaySchedule,
    FeedbackQueue,
    block_schedule,
    constant_schedule,
    in_order_random_schedule,
    make_schedule,
    permuted_schedule,
    uniform_schedule,
)


def random_schedule(rng, T_max=200, d_max=20):
    T = int(rng.integers(1, T_max + 1))
    return DelaySchedule(tuple(int(v) for v in rng.integers(1, d_max + 1, size=T)))


# --- arrival sets ---------------------------------------------------------

def test_feedback_sets_example():
    sets = DelaySchedule((1, 2, 1)).feedback_sets()
    assert sets[0] == [1] and sets[1] == [] and sets[2] == [2, 3]


def test_feedback_sets_no_delay():
    sets = DelaySchedule((1, 1, 1)).feedback_sets()
    assert sets == [[1], [2], [3]]


def test_feedback_sets_out_of_order():
    sets = DelaySchedule((3, 1, 1)).feedback_sets()
    assert sets[0] == [] and sets[1] == [2] and sets[2] == [1, 3]


def test_partition_property():
    rng = np.random.default_rng(10)
    for _ in range(300):
        s = random_schedule(rng, T_max=80, d_max=12)
        flat = [k for F in s.feedback_sets() for k in F]
        assert sorted(flat) == list(range(1, s.horizon + 1))
        assert len(flat) == len(set(flat))


def test_in_order_delivery_is_identity():
    rng = np.random.default_rng(11)
    for seed in range(100):
        s = in_order_random_schedule(int(rng.integers(1, 100)), int(rng.integers(1, 10)), seed)
        assert s.is_in_order()
        assert [k for F in s.feedback_sets() for k in F] == list(range(1, s.horizon + 1))


# --- in-order predicate ---------------------------------------------------

def test_is_in_order_examples():
    assert DelaySchedule((1, 1, 1)).is_in_order()
    assert not DelaySchedule((3, 1, 1)).is_in_order()
    assert DelaySchedule((2, 2, 2)).is_in_order()


# --- backlog --------------------------------------------------------------

def test_backlog_examples():
    assert list(DelaySchedule((1, 2, 1)).backlog()) == [1, 1, 2]
    assert list(DelaySchedule((1, 1, 1)).backlog()) == [1, 1, 1]
    m = DelaySchedule((3, 3, 3)).backlog()
    assert list(m) == [1, 2, 3] and m.sum() == 6 <= 9


def test_backlog_counts_outstanding_gradients():
    # m_t - 1 equals the number of queried-but-undelivered gradients
    rng = np.random.default_rng(12)
    for _ in range(200):
        s = random_schedule(rng, T_max=60, d_max=10)
        m = s.backlog()
        for t in range(1, s.horizon + 1):
            live = sum(1 for k in range(1, t) if s.arrival_round(k) >= t)
            assert m[t - 1] - 1 == live


def test_backlog_sum_bounds():
    rng = np.random.default_rng(13)
    for _ in range(200):
        s = random_schedule(rng, T_max=60, d_max=10)
        assert 1 <= s.backlog().sum() <= s.total_delay <= s.max_delay * s.horizon


# --- epoch-restricted sets --------------------------------------------------

def test_epoch_feedback_set_drops_stale():
    s = DelaySchedule((3, 1, 1))
    assert s.epoch_feedback_set(2, 3) == [3]  # timestamp 1 excluded


def test_epoch_feedback_set_full_from_start():
    rng = np.random.default_rng(14)
    for _ in range(50):
        s = random_schedule(rng, T_max=40, d_max=6)
        sets = s.feedback_sets()
        for t in range(1, s.horizon + 1):
            assert s.epoch_feedback_set(1, t) == sets[t - 1]


def test_epoch_feedback_set_pending_item():
    assert DelaySchedule((2, 2)).epoch_feedback_set(2, 2) == []  # arrives at 3


# --- generators -------------------------------------------------------------

def test_block_schedule_example():
    assert block_schedule(10, 3).to_list() == [3, 2, 1, 3, 2, 1, 3, 2, 1, 1]


def test_block_schedule_unit_blocks():
    assert block_schedule(5, 1).to_list() == [1, 1, 1, 1, 1]


def test_block_schedule_properties():
    for T, d in [(10, 3), (17, 5), (4, 9), (100, 7)]:
        s = block_schedule(T, d)
        assert all(1 <= v <= d for v in s.delays)
        assert s.is_in_order()
        # every gradient lands exactly at its block's final round
        for t in range(1, T + 1):
            z = (t - 1) // d + 1
            assert s.arrival_round(t) == min(z * d, T)


def test_constant_schedule():
    assert constant_schedule(4, 1).to_list() == [1, 1, 1, 1]


def test_generators_deterministic():
    assert uniform_schedule(50, 1, 9, 123).delays == uniform_schedule(50, 1, 9, 123).delays
    assert permuted_schedule(50, 7).delays == permuted_schedule(50, 7).delays


def test_permuted_schedule_valid():
    for seed in range(20):
        s = permuted_schedule(30, seed)
        assert all(v >= 1 for v in s.delays)


def test_make_schedule_dispatch():
    assert make_schedule({"kind": "constant", "value": 2}, 3, 0).to_list() == [2, 2, 2]
    assert make_schedule({"kind": "blocks", "d": 3}, 10, 0).to_list() == \
        block_schedule(10, 3).to_list()
    assert make_schedule({"kind": "list", "values": [1, 3, 2]}, 3, 0).to_list() == [1, 3, 2]
    with pytest.raises(ValueError):
        make_schedule({"kind": "list", "values": [1, 2]}, 3, 0)
    with pytest.raises(ValueError):
        make_schedule({"kind": "nope"}, 3, 0)


def test_invalid_delays_rejected():
    with pytest.raises(ValueError):
        DelaySchedule((1, 0, 2))
    with pytest.raises(ValueError):
        DelaySchedule(())


# --- queue ------------------------------------------------------------------

def test_queue_delivers_each_item_once_sorted():
    rng = np.random.default_rng(15)
    s = random_schedule(rng, T_max=50, d_max=8)
    q = FeedbackQueue(s)
    for t in range(1, s.horizon + 1):
        q.push(t, np.array([float(t)]), np.array([0.0]))
    seen = []
    for r in range(1, s.horizon + s.max_delay):
        items = q.pop(r)
        stamps = [it.timestamp for it in items]
        assert stamps == sorted(stamps)
        assert all(s.arrival_round(k) == r for k in stamps)
        seen += stamps
    assert sorted(seen) == list(range(1, s.horizon + 1))
    assert len(q) == 0


def test_queue_rejects_out_of_horizon_push():
    q = FeedbackQueue(DelaySchedule((1, 1)))
    with pytest.raises(ValueError):
        q.push(3, np.array([0.0]), np.array([0.0]))
