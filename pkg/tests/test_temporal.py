import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topiclife.clustering import SemanticCluster
from topiclife.errors import ContractViolation
from topiclife.temporal import (
    active_intervals,
    pairwise_related,
    split_semantic_cluster,
    temporal_components,
)
from oracles import components_from_closure, transitive_closure_oracle


def series_map(**kwargs):
    return {k: np.asarray(v, dtype=np.int64) for k, v in kwargs.items()}


class TestPairwiseRelated:
    def test_shared_active_slot(self):
        assert pairwise_related(np.array([1, 1, 0, 0]), np.array([0, 1, 1, 0]))

    def test_distance_three_unrelated(self):
        assert not pairwise_related(np.array([1, 0, 0, 0, 0]), np.array([0, 0, 0, 1, 0]))

    def test_threshold_inclusive_at_two(self):
        assert pairwise_related(np.array([1, 0, 0, 0]), np.array([0, 0, 1, 0]))

    def test_meets_is_subsumed(self):
        assert pairwise_related(np.array([1, 0]), np.array([0, 1]), gap_threshold_slots=2)

    def test_empty_series_never_related(self):
        assert not pairwise_related(np.array([0, 0]), np.array([1, 1]))

    def test_length_mismatch(self):
        with pytest.raises(ContractViolation):
            pairwise_related(np.array([1]), np.array([1, 0]))


class TestActiveIntervals:
    def test_runs(self):
        assert active_intervals(np.array([0, 2, 1, 0, 0, 5])) == [(1, 2), (5, 5)]

    def test_all_zero(self):
        assert active_intervals(np.zeros(4, dtype=int)) == []


class TestTemporalComponents:
    def test_chain_transitivity(self):
        series = series_map(a=[1, 1, 0, 0, 0], b=[0, 1, 1, 0, 0], c=[0, 0, 0, 1, 1])
        # a-b overlap; b-c within gap 1; a-c distance 2 (also related here)
        comps = temporal_components({"a", "b", "c"}, series)
        assert comps == [{"a", "b", "c"}]

    def test_far_groups_split(self):
        series = series_map(a=[1, 0, 0, 0, 0, 0, 0, 0], b=[1, 1, 0, 0, 0, 0, 0, 0],
                            c=[0, 0, 0, 0, 0, 0, 1, 0], d=[0, 0, 0, 0, 0, 0, 0, 1])
        comps = temporal_components({"a", "b", "c", "d"}, series)
        assert comps == [{"a", "b"}, {"c", "d"}]

    def test_missing_series_raises(self):
        with pytest.raises(ContractViolation):
            temporal_components({"a"}, {}, 2)

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            slots = int(rng.integers(3, 20))
            gap = int(rng.integers(0, 4))
            names = [f"h{i}" for i in range(n)]
            series = {h: (rng.random(slots) < 0.25).astype(np.int64) for h in names}
            relation = np.zeros((n, n), dtype=bool)
            for i in range(n):
                for j in range(n):
                    if i != j:
                        relation[i, j] = pairwise_related(series[names[i]], series[names[j]], gap)
            expected = components_from_closure(names, transitive_closure_oracle(relation))
            got = temporal_components(set(names), series, gap)
            assert got == expected


class TestSplitSemanticCluster:
    def test_cohesive_cluster_not_split(self):
        series = series_map(a=[1, 1, 0], b=[0, 1, 1])
        cluster = SemanticCluster(0, {"a", "b"}, np.zeros(2))
        topics = split_semantic_cluster(cluster, series, k_label=5)
        assert len(topics) == 1
        assert topics[0].topic_id == "k5-s0-t0"
        assert topics[0].members == {"a", "b"}

    def test_disjoint_activity_splits(self):
        series = series_map(a=[1, 0, 0, 0, 0, 0, 0, 0], b=[0, 0, 0, 0, 0, 0, 0, 1])
        cluster = SemanticCluster(2, {"a", "b"}, np.zeros(2))
        topics = split_semantic_cluster(cluster, series)
        assert [t.members for t in topics] == [{"a"}, {"b"}]
        assert [t.topic_id for t in topics] == ["s2-t0", "s2-t1"]

    def test_seasonal_reuse_scenario(self):
        # same semantic cluster, two activity bursts 5 slots apart: two topics
        series = series_map(
            golf=[3, 2, 0, 0, 0, 0, 0, 0, 0, 0],
            tennis=[0, 0, 0, 0, 0, 0, 2, 4, 0, 0],
        )
        cluster = SemanticCluster(7, {"golf", "tennis"}, np.zeros(2))
        topics = split_semantic_cluster(cluster, series, gap_threshold_slots=2)
        assert len(topics) == 2

    def test_partition_and_separation(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            n = int(rng.integers(2, 10))
            names = {f"h{i}" for i in range(n)}
            series = {h: (rng.random(15) < 0.2).astype(np.int64) for h in names}
            cluster = SemanticCluster(0, names, np.zeros(2))
            topics = split_semantic_cluster(cluster, series)
            union = set()
            for t in topics:
                assert t.members and not (union & t.members)
                union |= t.members
            assert union == names
            for i, ta in enumerate(topics):
                for tb in topics[i + 1 :]:
                    for a in ta.members:
                        for b in tb.members:
                            assert not pairwise_related(series[a], series[b])

    @given(st.data())
    @settings(max_examples=40, deadline=None)
    def test_threshold_monotonicity(self, data):
        n = data.draw(st.integers(2, 7))
        slots = data.draw(st.integers(3, 15))
        rows = data.draw(
            st.lists(
                st.lists(st.integers(0, 2), min_size=slots, max_size=slots),
                min_size=n,
                max_size=n,
            )
        )
        series = {f"h{i}": np.asarray(rows[i], dtype=np.int64) for i in range(n)}
        names = set(series)
        counts = [
            len(temporal_components(names, series, gap)) for gap in range(0, 6)
        ]
        assert counts == sorted(counts, reverse=True)
