import numpy as np
import pytest

from coreclust.geometry import InputError, PointSet, cost
from coreclust.io import gaussian_mixture
from coreclust.streaming import (
    StreamState,
    actual_total_weight,
    expected_total_weight,
    level_eps,
    stream_push,
    stream_query,
)


def feed(state, pts):
    for p in pts:
        stream_push(state, p)
    return state


class TestCounterLaw:
    def test_occupancy_matches_binary_representation(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(1024, 2))
        state = StreamState(k=1, eps_bar=0.4, seed=1, block_size=64)
        for i, p in enumerate(pts, start=1):
            stream_push(state, p)
            if i % 64 == 0:
                blocks = i // 64
                want = [lvl for lvl in range(blocks.bit_length())
                        if blocks >> lvl & 1]
                assert state.levels == want, f"after {blocks} blocks"

    def test_two_blocks_single_carry(self):
        rng = np.random.default_rng(1)
        state = feed(StreamState(k=1, eps_bar=0.4, seed=2, block_size=32),
                     rng.normal(size=(64, 2)))
        assert state.levels == [1]

    def test_space_bound(self):
        rng = np.random.default_rng(2)
        state = StreamState(k=2, eps_bar=0.4, seed=3, block_size=32)
        for i, p in enumerate(rng.normal(size=(700, 2)), start=1):
            stream_push(state, p)
            levels = max(state.levels, default=0)
            assert state.stored_points <= 32 * (levels + 2)


class TestQueries:
    def test_exact_before_first_carry(self):
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(20, 2))
        state = feed(StreamState(k=1, eps_bar=0.4, seed=4, block_size=64), pts)
        x = pts[:1]
        assert stream_query(state, x) == pytest.approx(
            cost(PointSet(pts), x), rel=1e-12)

    def test_identical_points_zero_forever(self):
        state = StreamState(k=1, eps_bar=0.4, seed=5, block_size=16)
        feed(state, np.zeros((200, 2)))
        assert stream_query(state, np.zeros((1, 2))) == 0.0

    def test_no_points_rejected(self):
        state = StreamState(k=1, eps_bar=0.4, seed=6, block_size=16)
        with pytest.raises(InputError):
            stream_query(state, np.zeros((1, 2)))


class TestLedger:
    def test_weight_ledger_exact(self):
        rng = np.random.default_rng(7)
        state = StreamState(k=2, eps_bar=0.3, seed=8, block_size=48)
        feed(state, rng.normal(size=(480, 2)))
        assert actual_total_weight(state) == pytest.approx(
            expected_total_weight(state), rel=1e-9)

    def test_eps_schedule(self):
        assert level_eps(0.3, 0) == pytest.approx(0.15)
        assert level_eps(0.3, 1) == pytest.approx(0.3 / 8)
        total = sum(level_eps(0.3, lvl) for lvl in range(200))
        assert total < 0.3  # convergent budget


class TestReplay:
    def test_same_stream_same_state(self):
        rng = np.random.default_rng(9)
        pts = rng.normal(size=(300, 2))
        a = feed(StreamState(k=2, eps_bar=0.4, seed=10, block_size=32), pts)
        b = feed(StreamState(k=2, eps_bar=0.4, seed=10, block_size=32), pts)
        assert a.checkpoint() == b.checkpoint()
        x = pts[:2]
        assert stream_query(a, x) == stream_query(b, x)

    def test_clone_isolates(self):
        rng = np.random.default_rng(10)
        pts = rng.normal(size=(96, 2))
        state = feed(StreamState(k=1, eps_bar=0.4, seed=11, block_size=32),
                     pts[:64])
        snap = state.clone()
        feed(state, pts[64:])
        assert snap.points_seen == 64
        assert state.points_seen == 96


class TestAccuracy:
    def test_stream_vs_batch_moderate_error(self):
        ok = 0
        for seed in range(6):
            pts = gaussian_mixture(1024, 2, 2, seed + 40)
            state = feed(StreamState(k=2, eps_bar=0.3, seed=seed,
                                     block_size=128), pts)
            P = PointSet(pts)
            rng = np.random.default_rng(seed)
            worst = 0.0
            for _ in range(30):
                x = pts[rng.choice(1024, 2, replace=False)]
                batch = cost(P, x)
                worst = max(worst, abs(stream_query(state, x) - batch) / batch)
            ok += worst <= 0.5
        assert ok >= 5
