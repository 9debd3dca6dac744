from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from topiclife.community import Partition
from topiclife.corpus import Slotting
from topiclife.errors import ContractViolation
from topiclife.temporal import TopicCluster
from topiclife.timeline import (
    OVERALL,
    UsageTimeline,
    build_timeline,
    community_scope,
    lifecycle_report,
)
from test_corpus import make_tweet

UTC = timezone.utc
EPOCH = datetime(2009, 6, 11, tzinfo=UTC)


def tweet_at(slot, text, author):
    return make_tweet(text, author=author, ts=EPOCH + timedelta(days=slot, hours=1))


def timeline_from_counts(counts, topics, n_slots, scopes=None):
    scopes = scopes or {OVERALL}
    return UsageTimeline(dict(counts), topics, n_slots, scopes | {OVERALL})


class TestBuildTimeline:
    slotting = Slotting(EPOCH)

    def fixture(self):
        # u1,u2 in community 0; u3 in community 1; u4 unassigned
        tweets = [
            tweet_at(2, "#x a", "u1"),
            tweet_at(2, "#x b", "u1"),
            tweet_at(2, "#x c", "u1"),
            tweet_at(2, "#x d", "u3"),
            tweet_at(3, "#y e", "u4"),
        ]
        partition = Partition({"u1": 0, "u2": 0, "u3": 1})
        topics = [TopicCluster("t0", {"x", "y"}, 0)]
        return build_timeline(tweets, partition, topics, self.slotting, 4)

    def test_community_and_overall_counts(self):
        tl = self.fixture()
        assert tl.usage(community_scope(0), 2, "x") == 3
        assert tl.usage(community_scope(1), 2, "x") == 1
        assert tl.usage(OVERALL, 2, "x") == 4

    def test_unassigned_user_counts_overall_only(self):
        tl = self.fixture()
        assert tl.usage(OVERALL, 3, "y") == 1
        assert tl.usage(community_scope(0), 3, "y") == 0
        assert tl.usage(community_scope(1), 3, "y") == 0

    def test_zero_records_omitted(self):
        tl = self.fixture()
        assert all(count > 0 for count in tl.counts.values())

    def test_conservation(self):
        tl = self.fixture()
        comm_scopes = [s for s in tl.scopes if s != OVERALL]
        for (scope, slot, tag), count in list(tl.counts.items()):
            if scope != OVERALL:
                continue
            community_sum = sum(tl.usage(c, slot, tag) for c in comm_scopes)
            assert count >= community_sum

    def test_conservation_equality_when_all_assigned(self):
        tweets = [tweet_at(0, "#x a", "u1"), tweet_at(0, "#x b", "u3")]
        partition = Partition({"u1": 0, "u3": 1})
        topics = [TopicCluster("t0", {"x"}, 0)]
        tl = build_timeline(tweets, partition, topics, self.slotting, 1)
        assert tl.usage(OVERALL, 0, "x") == tl.usage(community_scope(0), 0, "x") + tl.usage(
            community_scope(1), 0, "x"
        )

    def test_size_floor_excludes_small_communities(self):
        tweets = [tweet_at(0, "#x a", "u1")]
        partition = Partition({"u1": 0, "u2": 1})
        topics = [TopicCluster("t0", {"x"}, 0)]
        tl = build_timeline(tweets, partition, topics, self.slotting, 1, community_size_floor=2)
        assert tl.scopes == {OVERALL}
        assert tl.usage(OVERALL, 0, "x") == 1

    def test_untracked_hashtags_ignored(self):
        tweets = [tweet_at(0, "#zzz a", "u1")]
        tl = build_timeline(tweets, None, [TopicCluster("t0", {"x"}, 0)], self.slotting, 1)
        assert tl.counts == {}


class TestIntensityAndDominance:
    topics = {"t0": {"a", "b"}}

    def test_intensity_sum(self):
        tl = timeline_from_counts({(OVERALL, 0, "a"): 2, (OVERALL, 0, "b"): 3}, self.topics, 1)
        assert tl.topic_intensity("t0", OVERALL, 0) == 5

    def test_intensity_zero_when_unused(self):
        tl = timeline_from_counts({}, self.topics, 2)
        assert tl.topic_intensity("t0", OVERALL, 1) == 0

    def test_intensity_matches_hand_table(self):
        counts = {
            (OVERALL, 0, "a"): 1,
            (OVERALL, 1, "a"): 2,
            (OVERALL, 1, "b"): 1,
            (OVERALL, 3, "b"): 4,
        }
        tl = timeline_from_counts(counts, self.topics, 4)
        assert [tl.topic_intensity("t0", OVERALL, s) for s in range(4)] == [1, 3, 0, 4]

    def test_unknown_topic_rejected(self):
        tl = timeline_from_counts({}, self.topics, 1)
        with pytest.raises(ContractViolation):
            tl.topic_intensity("nope", OVERALL, 0)

    def test_dominant_strict_argmax(self):
        tl = timeline_from_counts({(OVERALL, 0, "a"): 5, (OVERALL, 0, "b"): 3}, self.topics, 1)
        assert tl.dominant_hashtag("t0", OVERALL, 0) == "a"

    def test_dominant_lexicographic_tie(self):
        tl = timeline_from_counts({(OVERALL, 0, "a"): 4, (OVERALL, 0, "b"): 4}, self.topics, 1)
        assert tl.dominant_hashtag("t0", OVERALL, 0) == "a"

    def test_dominant_none_when_unused(self):
        tl = timeline_from_counts({}, self.topics, 1)
        assert tl.dominant_hashtag("t0", OVERALL, 0) is None

    def test_dominance_bound(self):
        counts = {(OVERALL, 0, "a"): 2, (OVERALL, 0, "b"): 7}
        tl = timeline_from_counts(counts, self.topics, 1)
        dom = tl.dominant_hashtag("t0", OVERALL, 0)
        for h in self.topics["t0"]:
            assert tl.usage(OVERALL, 0, dom) >= tl.usage(OVERALL, 0, h)


class TestMorphs:
    topics = {"t0": {"a", "b"}}

    def series(self, dominants_counts):
        counts = {}
        for slot, per_tag in enumerate(dominants_counts):
            for tag, c in per_tag.items():
                counts[(OVERALL, slot, tag)] = c
        return timeline_from_counts(counts, self.topics, len(dominants_counts))

    def test_single_morph(self):
        tl = self.series([{"a": 2}, {"a": 2}, {"b": 2}, {"b": 2}])
        events = tl.detect_morphs("t0", OVERALL)
        assert len(events) == 1
        e = events[0]
        assert (e.slot_from, e.slot_to, e.dominant_from, e.dominant_to) == (1, 2, "a", "b")

    def test_gap_breaks_chain(self):
        tl = self.series([{"a": 2}, {}, {"b": 2}])
        assert tl.detect_morphs("t0", OVERALL) == []

    def test_across_gaps_switch(self):
        tl = self.series([{"a": 2}, {}, {"b": 2}])
        events = tl.detect_morphs("t0", OVERALL, across_gaps=True)
        assert len(events) == 1
        assert (events[0].slot_from, events[0].slot_to) == (0, 2)

    def test_constant_dominant_no_events(self):
        tl = self.series([{"a": 2}, {"a": 1, "b": 0}, {"a": 3}])
        assert tl.detect_morphs("t0", OVERALL) == []

    def test_morph_consistency(self):
        tl = self.series([{"a": 2}, {"b": 3}, {"a": 4}, {"b": 9}])
        for e in tl.detect_morphs("t0", OVERALL):
            assert tl.dominant_hashtag("t0", e.scope, e.slot_from) == e.dominant_from
            assert tl.dominant_hashtag("t0", e.scope, e.slot_to) == e.dominant_to


class TestDeath:
    topics = {"t0": {"a"}}

    def make(self, intensities):
        counts = {
            (OVERALL, slot, "a"): v for slot, v in enumerate(intensities) if v
        }
        return timeline_from_counts(counts, self.topics, len(intensities))

    def test_dead(self):
        fate = self.make([3, 1, 0, 0]).detect_death("t0", OVERALL)
        assert fate.status == "dead" and fate.death_slot == 2

    def test_alive_with_transient_zeros(self):
        fate = self.make([0, 2, 0, 4]).detect_death("t0", OVERALL)
        assert fate.status == "alive" and fate.death_slot is None

    def test_never_active(self):
        fate = self.make([0, 0, 0, 0]).detect_death("t0", OVERALL)
        assert fate.status == "never-active"

    def test_death_finality(self):
        tl = self.make([1, 2, 0, 0, 0])
        fate = tl.detect_death("t0", OVERALL)
        series = tl.intensity_series("t0", OVERALL)
        assert all(series[s] == 0 for s in range(fate.death_slot, len(series)))


class TestLifecycleReport:
    def test_cross_community_contrast(self):
        topics = {"t0": {"a"}}
        counts = {
            (community_scope(0), 0, "a"): 2,
            (community_scope(1), 0, "a"): 2,
            (community_scope(1), 3, "a"): 1,
            (OVERALL, 0, "a"): 4,
            (OVERALL, 3, "a"): 1,
        }
        tl = UsageTimeline(counts, topics, 4, {OVERALL, community_scope(0), community_scope(1)})
        report = lifecycle_report(tl)
        assert report["cross_community_contrasts"] == [
            {"topic_id": "t0", "dead_in": ["community:0"], "alive_in": ["community:1"]}
        ]

    def test_empty_timeline(self):
        tl = UsageTimeline({}, {}, 0, {OVERALL})
        report = lifecycle_report(tl)
        assert report["topics"] == {} and report["cross_community_contrasts"] == []
