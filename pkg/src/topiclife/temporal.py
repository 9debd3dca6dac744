"""Temporal relatedness of hashtags and splitting of semantic clusters.

Two hashtags are pairwise related when their active timeslots overlap or the
nearest active slots are within a gap threshold (default 2 slots).  Temporal
relatedness is the transitive closure of that relation; each semantic cluster
splits into one topic cluster per connected component.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from topiclife.clustering import SemanticCluster
from topiclife.corpus import Slotting, Tweet
from topiclife.errors import ContractViolation


@dataclass
class TopicCluster:
    """A semantically and temporally coherent group of hashtags (a topic)."""

    topic_id: str
    members: set[str]
    source_semantic_cluster: int


def build_usage_series(
    hashtag: str,
    tweets: Iterable[Tweet],
    slotting: Slotting,
    n_slots: int,
) -> np.ndarray:
    """Per-slot incidence counts for one hashtag (repeats within a tweet count)."""
    counts = np.zeros(n_slots, dtype=np.int64)
    for tweet in tweets:
        uses = tweet.hashtags.count(hashtag)
        if uses:
            slot = slotting.index_of(tweet.timestamp)
            if 0 <= slot < n_slots:
                counts[slot] += uses
    return counts


def build_all_series(
    hashtags: set[str],
    tweets: Iterable[Tweet],
    slotting: Slotting,
    n_slots: int,
) -> dict[str, np.ndarray]:
    """One pass over the corpus building every retained hashtag's series."""
    series = {h: np.zeros(n_slots, dtype=np.int64) for h in hashtags}
    for tweet in tweets:
        slot = None
        for tag in tweet.hashtags:
            counts = series.get(tag)
            if counts is None:
                continue
            if slot is None:
                slot = slotting.index_of(tweet.timestamp)
            if 0 <= slot < n_slots:
                counts[slot] += 1
    return series


def active_slots(counts: np.ndarray) -> np.ndarray:
    return np.flatnonzero(counts)


def active_intervals(counts: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of consecutive nonzero slots, as inclusive (start, end)."""
    active = active_slots(counts)
    if active.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(active) > 1)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [active.size - 1]))
    return [(int(active[s]), int(active[e])) for s, e in zip(starts, ends)]


def _min_active_distance(a_active: np.ndarray, b_active: np.ndarray) -> int | None:
    if a_active.size == 0 or b_active.size == 0:
        return None
    pos = np.searchsorted(b_active, a_active)
    best = np.iinfo(np.int64).max
    for i, p in enumerate(pos):
        if p < b_active.size:
            best = min(best, abs(int(b_active[p]) - int(a_active[i])))
        if p > 0:
            best = min(best, abs(int(a_active[i]) - int(b_active[p - 1])))
    return int(best)


def pairwise_related(a: np.ndarray, b: np.ndarray, gap_threshold_slots: int = 2) -> bool:
    """True iff active slots overlap or the nearest active slots are within the gap.

    Overlap is distance 0 and adjacency ("meets") is distance 1, so both are
    subsumed by the inclusive distance test.
    """
    if len(a) != len(b):
        raise ContractViolation(f"series length mismatch: {len(a)} vs {len(b)}")
    dist = _min_active_distance(active_slots(np.asarray(a)), active_slots(np.asarray(b)))
    return dist is not None and dist <= gap_threshold_slots


class _UnionFind:
    def __init__(self, items: Iterable[str]) -> None:
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def temporal_components(
    hashtags: set[str],
    series: Mapping[str, np.ndarray],
    gap_threshold_slots: int = 2,
) -> list[set[str]]:
    """Connected components under pairwise relatedness (the transitive closure).

    Traversal-order independent; components are returned sorted by their
    lexicographically smallest member.
    """
    missing = hashtags - series.keys()
    if missing:
        raise ContractViolation(f"missing usage series for {sorted(missing)[:5]}")
    ordered = sorted(hashtags)
    actives = {h: active_slots(np.asarray(series[h])) for h in ordered}
    uf = _UnionFind(ordered)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1 :]:
            dist = _min_active_distance(actives[a], actives[b])
            if dist is not None and dist <= gap_threshold_slots:
                uf.union(a, b)
    groups: dict[str, set[str]] = {}
    for h in ordered:
        groups.setdefault(uf.find(h), set()).add(h)
    return sorted(groups.values(), key=lambda g: min(g))


def split_semantic_cluster(
    cluster: SemanticCluster,
    series: Mapping[str, np.ndarray],
    gap_threshold_slots: int = 2,
    k_label: int | None = None,
) -> list[TopicCluster]:
    """Split one semantic cluster into topic clusters by temporal component.

    Split indices follow earliest first-active slot (ties by smallest member),
    so topic ids are deterministic.
    """
    components = temporal_components(set(cluster.members), series, gap_threshold_slots)

    def sort_key(component: set[str]) -> tuple[int, str]:
        firsts = [
            int(active_slots(np.asarray(series[h]))[0])
            for h in component
            if active_slots(np.asarray(series[h])).size
        ]
        return (min(firsts) if firsts else np.iinfo(np.int64).max, min(component))

    components.sort(key=sort_key)
    prefix = f"k{k_label}-" if k_label is not None else ""
    return [
        TopicCluster(f"{prefix}s{cluster.cluster_id}-t{idx}", set(component), cluster.cluster_id)
        for idx, component in enumerate(components)
    ]
