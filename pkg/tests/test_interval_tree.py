import numpy as np
import pytest

from ddmatch.core import Interval1D, Kind, intersect_1d
from ddmatch.interval_tree import IntervalTree


def iv(low, high, id=1):
    return Interval1D(low, high, id)


def brute_overlaps(intervals, q):
    """Reference: linear scan with the strict predicate."""
    return [x for x in intervals if x.low < q.high and q.low < x.high]


def random_intervals(rng, count, span=100.0):
    out = []
    for i in range(count):
        lo = rng.uniform(0, span)
        out.append(iv(lo, lo + rng.uniform(1e-3, span / 4), i + 1))
    return out


class TestInsert:
    def test_insert_into_empty(self):
        t = IntervalTree()
        t.insert(iv(2, 5))
        root = t.root
        assert root is not None
        assert root.interval.low == 2 and root.interval.high == 5
        assert root.max_upper == 5 and root.min_lower == 2
        assert len(t) == 1

    def test_ascending_inserts_rotate(self):
        # [1,2], [3,4], [5,6] forces a single left rotation at the root
        t = IntervalTree()
        t.insert(iv(1, 2, 1))
        t.insert(iv(3, 4, 2))
        t.insert(iv(5, 6, 3))
        root = t.root
        assert root.interval.low == 3 and root.interval.high == 4
        assert root.max_upper == 6
        assert root.min_lower == 1
        assert root.left.interval.low == 1
        assert root.right.interval.low == 5
        ok, msg = t.validate()
        assert ok, msg

    def test_random_insert_sequence_stays_valid(self):
        rng = np.random.default_rng(12)
        t = IntervalTree()
        for x in random_intervals(rng, 1000):
            t.insert(x)
        ok, msg = t.validate()
        assert ok, msg
        assert len(t) == 1000
        assert t.height <= 1.44 * np.log2(1000 + 2)


class TestDelete:
    def test_insert_then_delete_leaves_empty(self):
        t = IntervalTree()
        x = iv(1, 3)
        t.insert(x)
        t.delete(x)
        assert len(t) == 0
        assert t.root is None

    def test_delete_root_of_three(self):
        t = IntervalTree()
        xs = [iv(1, 2, 1), iv(3, 4, 2), iv(5, 6, 3)]
        for x in xs:
            t.insert(x)
        t.delete(t.root.interval)
        assert len(t) == 2
        ok, msg = t.validate()
        assert ok, msg

    def test_delete_missing_raises(self):
        t = IntervalTree()
        t.insert(iv(1, 3, 1))
        with pytest.raises(KeyError):
            t.delete(iv(1, 3, 2))

    def test_delete_matches_full_key(self):
        # two intervals with same bounds, different ids
        t = IntervalTree()
        t.insert(iv(1, 3, 1))
        t.insert(iv(1, 3, 2))
        t.delete(iv(1, 3, 2))
        assert len(t) == 1
        assert t.root.interval.id == 1

    def test_random_interleaved_ops_stay_valid(self):
        rng = np.random.default_rng(99)
        t = IntervalTree()
        live = []
        next_id = 1
        for step in range(2000):
            if live and rng.random() < 0.45:
                victim = live.pop(int(rng.integers(len(live))))
                t.delete(victim)
            else:
                lo = float(rng.uniform(0, 50))
                x = iv(lo, lo + float(rng.uniform(0.01, 10)), next_id)
                next_id += 1
                t.insert(x)
                live.append(x)
            if step % 50 == 0:
                ok, msg = t.validate()
                assert ok, f"step {step}: {msg}"
        ok, msg = t.validate()
        assert ok, msg
        assert len(t) == len(live)


class TestQuery:
    def test_query_right_of_everything_visits_once(self):
        t = IntervalTree.build([iv(0, 2, 1), iv(3, 5, 2), iv(6, 8, 3)])
        hits = []
        visits = t.query(iv(100, 101, 9), hits.append)
        assert hits == []
        assert visits == 1

    def test_three_interval_example(self):
        stored = [iv(0, 2, 1), iv(5, 7, 2), iv(8, 9, 3)]
        t = IntervalTree.build(stored)
        q = iv(1, 6, 1)
        hits = []
        t.query(q, hits.append)
        assert [(h.low, h.high) for h in hits] == [(0, 2), (5, 7)]
        assert [(h.low, h.high) for h in hits] == [(x.low, x.high) for x in brute_overlaps(stored, q)]

    def test_touching_does_not_match(self):
        t = IntervalTree.build([iv(0, 1, 1)])
        hits = []
        t.query(iv(1, 2, 1), hits.append)
        assert hits == []

    def test_sink_order_is_key_order(self):
        rng = np.random.default_rng(4)
        stored = random_intervals(rng, 300)
        t = IntervalTree.build(stored)
        hits = []
        t.query(iv(0, 200, 1), hits.append)
        keys = [(h.low, h.high, h.id) for h in hits]
        assert keys == sorted(keys)
        assert len(hits) == 300

    def test_matches_brute_force_over_many_seeds(self):
        for seed in range(30):
            rng = np.random.default_rng(seed)
            stored = random_intervals(rng, int(rng.integers(1, 400)))
            t = IntervalTree.build(stored)
            for _ in range(20):
                lo = float(rng.uniform(-10, 110))
                q = iv(lo, lo + float(rng.uniform(0.01, 30)), 1)
                got = t.query_ids(q)
                want = sorted(x.id for x in brute_overlaps(stored, q))
                assert sorted(got) == want

    def test_visits_bounded_by_size(self):
        rng = np.random.default_rng(17)
        stored = random_intervals(rng, 500)
        t = IntervalTree.build(stored)
        for _ in range(50):
            lo = float(rng.uniform(-10, 110))
            q = iv(lo, lo + float(rng.uniform(0.01, 50)), 1)
            visits = t.query(q, lambda _: None)
            assert visits <= len(t)


class TestBuild:
    def test_empty(self):
        t = IntervalTree.build([])
        assert len(t) == 0 and t.root is None
        ok, _ = t.validate()
        assert ok

    def test_seven_intervals_height_bound(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            t = IntervalTree.build(random_intervals(rng, 7))
            assert len(t) == 7
            assert t.height <= 4
            ok, msg = t.validate()
            assert ok, msg

    def test_build_queries_match_brute_force(self):
        rng = np.random.default_rng(23)
        stored = random_intervals(rng, 800)
        t = IntervalTree.build(stored)
        for _ in range(40):
            lo = float(rng.uniform(0, 100))
            q = iv(lo, lo + 5, 1)
            assert sorted(t.query_ids(q)) == sorted(x.id for x in brute_overlaps(stored, q))


class TestValidate:
    def test_empty_is_valid(self):
        ok, msg = IntervalTree().validate()
        assert ok, msg

    def test_corrupted_maxupper_detected(self):
        t = IntervalTree.build([iv(0, 2, 1), iv(3, 5, 2), iv(6, 8, 3)])
        slot = t._root
        t._maxupper[slot] = -100.0
        ok, msg = t.validate()
        assert not ok
        assert "maxupper" in msg

    def test_corrupted_height_detected(self):
        t = IntervalTree.build([iv(0, 2, 1), iv(3, 5, 2), iv(6, 8, 3)])
        t._height[t._root] = 7
        ok, msg = t.validate()
        assert not ok
        assert "height" in msg or "balance" in msg

    def test_post_build_random_tree_valid(self):
        rng = np.random.default_rng(31)
        t = IntervalTree.build(random_intervals(rng, 1234))
        ok, msg = t.validate()
        assert ok, msg


class TestKindPreserved:
    def test_query_returns_kind(self):
        t = IntervalTree.build([Interval1D(0, 2, 1, Kind.UPDATE)])
        hits = []
        t.query(iv(1, 3), hits.append)
        assert hits[0].kind is Kind.UPDATE


class TestDump:
    def test_dump_mentions_aggregates(self):
        t = IntervalTree.build([iv(1, 2, 1), iv(3, 4, 2)])
        text = t.dump()
        assert "maxupper" in text and "minlower" in text
