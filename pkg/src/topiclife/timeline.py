"""Usage timelines and topic lifecycle analysis.

Hashtag usage is aggregated per (scope, timeslot, hashtag), where a scope is
the whole corpus ("overall") or one community.  On top of that sit the
lifecycle primitives: topic intensity (sum over member hashtags), dominant
hashtag (argmax, lexicographic ties), morph events (dominant change between
consecutive live slots) and topic death (intensity zero through window end).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from topiclife.community import Partition
from topiclife.corpus import Slotting, Tweet
from topiclife.errors import ContractViolation
from topiclife.temporal import TopicCluster

OVERALL = "overall"


def community_scope(community_id: int) -> str:
    return f"community:{community_id}"


@dataclass(frozen=True)
class MorphEvent:
    scope: str
    topic_id: str
    slot_from: int
    slot_to: int
    dominant_from: str
    dominant_to: str


@dataclass(frozen=True)
class TopicFate:
    """Lifecycle outcome of a topic within one scope."""

    scope: str
    topic_id: str
    status: str  # "dead" | "alive" | "never-active"
    death_slot: int | None = None


class UsageTimeline:
    """Per-(scope, slot, hashtag) usage counts plus the topic membership map."""

    def __init__(
        self,
        counts: dict[tuple[str, int, str], int],
        topics: dict[str, set[str]],
        n_slots: int,
        scopes: set[str],
    ) -> None:
        self.counts = counts
        self.topics = topics
        self.n_slots = n_slots
        self.scopes = scopes
        self.topic_of = {h: tid for tid, members in topics.items() for h in members}

    def usage(self, scope: str, slot: int, hashtag: str) -> int:
        return self.counts.get((scope, slot, hashtag), 0)

    def _members(self, topic_id: str) -> set[str]:
        members = self.topics.get(topic_id)
        if members is None:
            raise ContractViolation(f"unknown topic {topic_id!r}")
        return members

    def topic_intensity(self, topic_id: str, scope: str, slot: int) -> int:
        return sum(self.usage(scope, slot, h) for h in self._members(topic_id))

    def intensity_series(self, topic_id: str, scope: str) -> np.ndarray:
        members = self._members(topic_id)
        series = np.zeros(self.n_slots, dtype=np.int64)
        for slot in range(self.n_slots):
            series[slot] = sum(self.usage(scope, slot, h) for h in members)
        return series

    def dominant_hashtag(self, topic_id: str, scope: str, slot: int) -> str | None:
        """Most-used member hashtag, lexicographic on ties; None when unused."""
        best: str | None = None
        best_count = 0
        for h in sorted(self._members(topic_id)):
            c = self.usage(scope, slot, h)
            if c > best_count:
                best, best_count = h, c
        return best

    def dominant_series(self, topic_id: str, scope: str) -> list[str | None]:
        return [self.dominant_hashtag(topic_id, scope, s) for s in range(self.n_slots)]

    def detect_morphs(self, topic_id: str, scope: str, across_gaps: bool = False) -> list[MorphEvent]:
        """Morph events: dominant hashtag changes between live slots.

        By default the comparison chain breaks at zero-usage slots (a revival
        is a re-birth, not a morph); across_gaps=True compares the dominants
        of the nearest live slots instead.
        """
        dominants = self.dominant_series(topic_id, scope)
        events: list[MorphEvent] = []
        prev_slot: int | None = None
        for slot, dom in enumerate(dominants):
            if dom is None:
                if not across_gaps:
                    prev_slot = None
                continue
            if prev_slot is not None:
                prev = dominants[prev_slot]
                if prev is not None and prev != dom and (across_gaps or prev_slot == slot - 1):
                    events.append(MorphEvent(scope, topic_id, prev_slot, slot, prev, dom))
            prev_slot = slot
        return events

    def detect_death(self, topic_id: str, scope: str) -> TopicFate:
        """Dead when intensity is zero from some slot through the window end."""
        series = self.intensity_series(topic_id, scope)
        live = np.flatnonzero(series)
        if live.size == 0:
            return TopicFate(scope, topic_id, "never-active")
        last_live = int(live[-1])
        if last_live == self.n_slots - 1:
            return TopicFate(scope, topic_id, "alive")
        return TopicFate(scope, topic_id, "dead", death_slot=last_live + 1)


def build_timeline(
    tweets: Iterable[Tweet],
    partition: Partition | None,
    topics: Iterable[TopicCluster],
    slotting: Slotting,
    n_slots: int,
    community_size_floor: int = 1,
) -> UsageTimeline:
    """Aggregate retained-hashtag usage into overall and community timelines.

    Only hashtags belonging to a topic are counted.  Every incidence counts
    toward the overall scope; incidences by members of a reported community
    (size >= community_size_floor) also count toward that community's scope.
    Users outside the graph contribute to the overall scope only.
    """
    topic_map = {t.topic_id: set(t.members) for t in topics}
    tracked = {h for members in topic_map.values() for h in members}
    reported: set[int] = set()
    assignment: Mapping[str, int] = {}
    if partition is not None:
        assignment = partition.assignment
        reported = {cid for cid, size in partition.sizes().items() if size >= community_size_floor}

    counts: dict[tuple[str, int, str], int] = {}
    scopes = {OVERALL} | {community_scope(cid) for cid in sorted(reported)}
    for tweet in tweets:
        hits = [h for h in tweet.hashtags if h in tracked]
        if not hits:
            continue
        slot = slotting.index_of(tweet.timestamp)
        if not (0 <= slot < n_slots):
            continue
        cid = assignment.get(tweet.author)
        for h in hits:
            key = (OVERALL, slot, h)
            counts[key] = counts.get(key, 0) + 1
            if cid is not None and cid in reported:
                ckey = (community_scope(cid), slot, h)
                counts[ckey] = counts.get(ckey, 0) + 1
    return UsageTimeline(counts, topic_map, n_slots, scopes)


def lifecycle_report(timeline: UsageTimeline, across_gaps: bool = False) -> dict:
    """Per-(topic, scope) intensity/dominant series, morphs and fates, plus the
    cross-community dead-here-alive-there contrasts."""
    topics_out: dict[str, dict] = {}
    fates: dict[tuple[str, str], TopicFate] = {}
    for topic_id in sorted(timeline.topics):
        per_scope: dict[str, dict] = {}
        for scope in sorted(timeline.scopes):
            fate = timeline.detect_death(topic_id, scope)
            fates[(topic_id, scope)] = fate
            per_scope[scope] = {
                "intensity": timeline.intensity_series(topic_id, scope).tolist(),
                "dominant": timeline.dominant_series(topic_id, scope),
                "morphs": [vars(e) for e in timeline.detect_morphs(topic_id, scope, across_gaps)],
                "status": fate.status,
                "death_slot": fate.death_slot,
            }
        topics_out[topic_id] = {"members": sorted(timeline.topics[topic_id]), "scopes": per_scope}

    contrasts = []
    community_scopes = sorted(s for s in timeline.scopes if s != OVERALL)
    for topic_id in sorted(timeline.topics):
        dead = [s for s in community_scopes if fates[(topic_id, s)].status == "dead"]
        alive = [s for s in community_scopes if fates[(topic_id, s)].status == "alive"]
        if dead and alive:
            contrasts.append({"topic_id": topic_id, "dead_in": dead, "alive_in": alive})
    return {"topics": topics_out, "cross_community_contrasts": contrasts}
