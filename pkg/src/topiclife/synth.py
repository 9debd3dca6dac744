"""Synthetic corpus generator with planted communities, topics and lifecycles.

Emits a tweet file, follower edge file and word-vector lexicon in the exact
formats the ingestion stage consumes, together with the ground truth (true
partition, true topic membership, scheduled morph and death events) as JSON.
Generation is fully deterministic given the spec seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from topiclife.errors import ConfigurationError

_EPOCH = datetime(2009, 6, 11, tzinfo=timezone.utc)


@dataclass
class CommunitySpec:
    size: int
    intra_edge_prob: float = 0.4
    inter_edge_prob: float = 0.02


@dataclass
class TopicSpec:
    """One planted topic: member hashtags, a private vocabulary, and a
    per-community dominant-hashtag schedule (None = community inactive)."""

    name: str
    members: list[str]
    vocabulary: list[str]
    schedules: list[list[str | None]]  # [community][slot] -> dominant or None


@dataclass
class SynthSpec:
    seed: int = 0
    communities: list[CommunitySpec] = field(default_factory=list)
    topics: list[TopicSpec] = field(default_factory=list)
    tweets_per_user_per_slot: int = 2
    slot_count: int = 10
    dominant_prob: float = 0.8
    embedding_dim: int = 16
    anchor_noise_sigma: float = 0.05


@dataclass
class GroundTruth:
    partition: dict[str, int]
    topic_of: dict[str, str]
    morphs: list[dict]
    deaths: list[dict]
    alive: list[dict]

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def default_spec(seed: int = 0) -> SynthSpec:
    """Two 30-user communities, three 3-hashtag topics over 10 slots.

    topic0 morphs in both communities at different slots, topic1 dies in
    community 0 but stays alive in community 1, topic2 is constant.
    """

    def const(tag: str, start: int, end: int, n: int = 10) -> list[str | None]:
        return [tag if start <= s <= end else None for s in range(n)]

    def switch(a: str, b: str, switch_at: int, n: int = 10) -> list[str | None]:
        return [a if s < switch_at else b for s in range(n)]

    topics = [
        TopicSpec(
            "topic0",
            ["federer", "rogerfederer", "tennisgoat"],
            [f"tennis{i}" for i in range(20)],
            [switch("federer", "rogerfederer", 3), switch("federer", "rogerfederer", 6)],
        ),
        TopicSpec(
            "topic1",
            ["marijuana", "drugwar", "smoking"],
            [f"policy{i}" for i in range(20)],
            [const("marijuana", 0, 4), const("marijuana", 0, 9)],
        ),
        TopicSpec(
            "topic2",
            ["iranrevolution", "freeiran", "revolution"],
            [f"iran{i}" for i in range(20)],
            [const("iranrevolution", 0, 9), const("iranrevolution", 0, 9)],
        ),
    ]
    return SynthSpec(
        seed=seed,
        communities=[CommunitySpec(30), CommunitySpec(30)],
        topics=topics,
    )


def validate_spec(spec: SynthSpec) -> None:
    problems: list[str] = []
    if not spec.communities:
        problems.append("no communities")
    if not spec.topics:
        problems.append("no topics")
    for c in spec.communities:
        if c.intra_edge_prob <= c.inter_edge_prob:
            problems.append(f"intra_edge_prob {c.intra_edge_prob} must exceed inter {c.inter_edge_prob}")
    seen_tags: set[str] = set()
    for t in spec.topics:
        if len(t.schedules) != len(spec.communities):
            problems.append(f"{t.name}: schedule count != community count")
        for sched in t.schedules:
            if len(sched) != spec.slot_count:
                problems.append(f"{t.name}: schedule length != slot_count")
            for tag in sched:
                if tag is not None and tag not in t.members:
                    problems.append(f"{t.name}: scheduled hashtag {tag!r} not a member")
        overlap = seen_tags & set(t.members)
        if overlap:
            problems.append(f"{t.name}: hashtags {sorted(overlap)} reused across topics")
        seen_tags |= set(t.members)
    if problems:
        raise ConfigurationError("; ".join(problems))


def _schedule_events(spec: SynthSpec) -> tuple[list[dict], list[dict], list[dict]]:
    morphs, deaths, alive = [], [], []
    for topic in spec.topics:
        for cid, sched in enumerate(topic.schedules):
            live = [s for s in range(spec.slot_count) if sched[s] is not None]
            for s in live:
                prev = s - 1
                if prev in live and sched[prev] != sched[s]:
                    morphs.append(
                        {
                            "community": cid,
                            "topic": topic.name,
                            "slot_from": prev,
                            "slot_to": s,
                            "dominant_from": sched[prev],
                            "dominant_to": sched[s],
                        }
                    )
            if not live:
                continue
            if live[-1] == spec.slot_count - 1:
                alive.append({"community": cid, "topic": topic.name})
            else:
                deaths.append({"community": cid, "topic": topic.name, "death_slot": live[-1] + 1})
    return morphs, deaths, alive


def _write_lexicon(spec: SynthSpec, rng: np.random.Generator, path: Path) -> None:
    # one near-orthogonal anchor direction per topic; words cluster around it
    raw = rng.standard_normal((len(spec.topics), spec.embedding_dim))
    anchors, _ = np.linalg.qr(raw.T)
    anchors = anchors.T[: len(spec.topics)]
    lines = []
    for t_idx, topic in enumerate(spec.topics):
        for word in topic.vocabulary:
            vec = anchors[t_idx] + spec.anchor_noise_sigma * rng.standard_normal(spec.embedding_dim)
            comps = " ".join(f"{v:.6f}" for v in vec)
            lines.append(f"{word} {comps}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_edges(spec: SynthSpec, users: list[list[str]], rng: np.random.Generator, path: Path) -> None:
    flat = [(cid, u) for cid, members in enumerate(users) for u in members]
    lines = []
    for i in range(len(flat)):
        for j in range(i + 1, len(flat)):
            ci, ui = flat[i]
            cj, uj = flat[j]
            if ci == cj:
                p = spec.communities[ci].intra_edge_prob
            else:
                p = 0.5 * (spec.communities[ci].inter_edge_prob + spec.communities[cj].inter_edge_prob)
            if rng.random() < p:
                lines.append(f"{ui}\t{uj}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_tweets(spec: SynthSpec, users: list[list[str]], rng: np.random.Generator, path: Path) -> None:
    records = []
    day = timedelta(days=1)
    for slot in range(spec.slot_count):
        for cid, members in enumerate(users):
            active = [t for t in spec.topics if t.schedules[cid][slot] is not None]
            if not active:
                continue
            for user in members:
                for _ in range(spec.tweets_per_user_per_slot):
                    topic = active[int(rng.integers(len(active)))]
                    dominant = topic.schedules[cid][slot]
                    others = [h for h in topic.members if h != dominant]
                    if others and rng.random() >= spec.dominant_prob:
                        tag = others[int(rng.integers(len(others)))]
                    else:
                        tag = dominant
                    words = [
                        topic.vocabulary[int(rng.integers(len(topic.vocabulary)))] for _ in range(6)
                    ]
                    ts = _EPOCH + slot * day + timedelta(seconds=int(rng.integers(86400)))
                    records.append(
                        "T\t{}\nU\thttp://twitter.com/{}\nW\t{} #{}".format(
                            ts.strftime("%Y-%m-%d %H:%M:%S"), user, " ".join(words), tag
                        )
                    )
    path.write_text("\n\n".join(records) + "\n", encoding="utf-8")


def generate(spec: SynthSpec, out_dir: str | Path) -> GroundTruth:
    """Write tweets.txt, edges.txt, lexicon.txt and ground_truth.json.

    Byte-identical outputs for identical (spec, seed).
    """
    validate_spec(spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)

    users = [
        [f"c{cid}u{idx:03d}" for idx in range(c.size)] for cid, c in enumerate(spec.communities)
    ]
    partition = {u: cid for cid, members in enumerate(users) for u in members}
    topic_of = {h: t.name for t in spec.topics for h in t.members}
    morphs, deaths, alive = _schedule_events(spec)

    _write_lexicon(spec, rng, out / "lexicon.txt")
    _write_edges(spec, users, rng, out / "edges.txt")
    _write_tweets(spec, users, rng, out / "tweets.txt")

    truth = GroundTruth(partition, topic_of, morphs, deaths, alive)
    (out / "ground_truth.json").write_text(truth.to_json() + "\n", encoding="utf-8")
    return truth
